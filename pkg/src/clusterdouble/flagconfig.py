"""Flag configurations on triangulated polygons (rank 2).

For ``PGL_2`` the flag variety is the projective line and a decorated flag is
a nonzero vector in ``Q^2`` spanning the line.  On a polygon (a disk with
marked points) a framed local system is just a flag per vertex, and the
coordinates are

* ``A_e = det(a_u, a_v)`` for an edge ``e = u - v`` with ``u`` before ``v``
  in the vertex order,
* ``X_e``, a cross-ratio of the four flags around an internal edge,
* ``B_e = A_e(back) / A_e(front)`` for a pair of decorated configurations on
  the polygon and its mirror image.

``X_e`` is normalized so that ``X_e = prod_j A_j ** eps_ej`` with ``eps`` the
exchange matrix of :func:`clusterdouble.surface.m_triangulation_seed`; see
:func:`x_from_cross_ratio`.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, NamedTuple, Union

from .ratfunc import format_rational, parse_rational
from .surface import IdealTriangulation, TriangulationError, validate

__all__ = [
    "INF",
    "DegenerateConfigurationError",
    "DecoratedFlag2",
    "FramedPolygonConfig",
    "DecoratedPolygonConfig",
    "DoubleConfig",
    "DoubleCoordinates",
    "det2",
    "cross_ratio",
    "x_from_cross_ratio",
    "X_SIGN",
    "X_EXPONENT",
    "a_coord",
    "a_coords",
    "x_coord",
    "x_coords",
    "double_coords",
    "reconstruct_framed",
    "reconstruct_decorated",
    "reconstruct_double",
    "h_rescale",
    "mirror_x_coords",
    "lift_of",
    "flag_of",
    "check_polygon",
    "config_to_json",
    "config_from_json",
]


class DegenerateConfigurationError(ArithmeticError):
    """A determinant or cross-ratio denominator vanished."""


class _Infinity:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()
Flag = Union[Fraction, _Infinity]

# X = X_SIGN * cross_ratio ** X_EXPONENT; fixed so that X_e = prod_j A_j^eps_ej
X_SIGN = -1
X_EXPONENT = -1


def _q(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


def _flag(v) -> Flag:
    if v is INF or (isinstance(v, str) and v.strip().lower() in ("inf", "infinity", "oo")):
        return INF
    return parse_rational(v) if isinstance(v, str) else _q(v)


@dataclass(frozen=True)
class DecoratedFlag2:
    """A nonzero vector of ``Q^2``; its flag is the line it spans."""

    x: Fraction
    y: Fraction

    def __post_init__(self):
        object.__setattr__(self, "x", _q(self.x))
        object.__setattr__(self, "y", _q(self.y))
        if self.x == 0 and self.y == 0:
            raise DegenerateConfigurationError("a decorated flag must be a nonzero vector")

    @property
    def flag(self) -> Flag:
        return flag_of(self)

    def scaled(self, lam) -> "DecoratedFlag2":
        lam = _q(lam)
        return DecoratedFlag2(lam * self.x, lam * self.y)

    def __iter__(self):
        yield self.x
        yield self.y

    def to_json(self) -> list[str]:
        return [format_rational(self.x), format_rational(self.y)]

    @classmethod
    def from_json(cls, data) -> "DecoratedFlag2":
        return cls(parse_rational(data[0]), parse_rational(data[1]))


def lift_of(flag: Flag) -> DecoratedFlag2:
    """Standard lift: ``t -> (t, 1)`` and ``inf -> (1, 0)``."""
    if flag is INF:
        return DecoratedFlag2(Fraction(1), Fraction(0))
    return DecoratedFlag2(_q(flag), Fraction(1))


def flag_of(v: DecoratedFlag2) -> Flag:
    if v.y == 0:
        return INF
    return v.x / v.y


def det2(u: DecoratedFlag2, v: DecoratedFlag2) -> Fraction:
    return u.x * v.y - u.y * v.x


def cross_ratio(vp, vq, vr, vs) -> Fraction:
    """``det(p,q) det(r,s) / (det(q,r) det(s,p))`` for lifts of four flags."""
    den = det2(vq, vr) * det2(vs, vp)
    if den == 0:
        raise DegenerateConfigurationError("cross-ratio undefined: coincident flags")
    return det2(vp, vq) * det2(vr, vs) / den


def x_from_cross_ratio(cr: Fraction) -> Fraction:
    if cr == 0:
        raise DegenerateConfigurationError("cross-ratio vanishes: coincident flags")
    return X_SIGN * cr**X_EXPONENT


def check_polygon(t: IdealTriangulation) -> None:
    """Raise unless ``t`` is a valid triangulation of a polygon."""
    rep = validate(t)
    if not rep.valid:
        raise TriangulationError("invalid triangulation: " + "; ".join(rep.problems or ["orientation/self-folded"]))
    n = len(t.vertices)
    if n < 3 or len(t.triangles) != n - 2 or len(t.boundary_edges) != n:
        raise TriangulationError("configurations are only supported on triangulated polygons")
    seen, queue = {0}, deque([0])
    while queue:
        a = queue.popleft()
        for s in range(3):
            e = t.edge_of_side((a, s))
            for b, _ in e.sides:
                if b not in seen:
                    seen.add(b)
                    queue.append(b)
    if len(seen) != len(t.triangles):
        raise TriangulationError("triangulation is not connected")


class FramedPolygonConfig:
    """A flag at every vertex of a triangulated polygon."""

    def __init__(self, triangulation: IdealTriangulation, flags: Mapping[str, Flag], *, check: bool = True):
        self.triangulation = triangulation
        self.flags = {v: _flag(flags[v]) for v in triangulation.vertices}
        if check:
            check_polygon(triangulation)
            for e in triangulation.edges:
                u, v = triangulation.endpoints(e.label)
                if self.flags[u] == self.flags[v]:
                    raise DegenerateConfigurationError(f"flags at the ends of edge {e.label!r} coincide")

    def lift(self, v: str) -> DecoratedFlag2:
        return lift_of(self.flags[v])

    def with_triangulation(self, t: IdealTriangulation) -> "FramedPolygonConfig":
        return FramedPolygonConfig(t, self.flags)

    def __eq__(self, other):
        return isinstance(other, FramedPolygonConfig) and self.flags == other.flags and self.triangulation == other.triangulation

    def __repr__(self):
        return f"FramedPolygonConfig({self.flags})"


class DecoratedPolygonConfig:
    """A framed configuration together with a lift of every flag."""

    def __init__(self, triangulation: IdealTriangulation, lifts: Mapping[str, DecoratedFlag2], *, check: bool = True):
        self.lifts = {v: lifts[v] if isinstance(lifts[v], DecoratedFlag2) else DecoratedFlag2(*lifts[v]) for v in triangulation.vertices}
        self.framed = FramedPolygonConfig(triangulation, {v: flag_of(a) for v, a in self.lifts.items()}, check=check)

    @property
    def triangulation(self) -> IdealTriangulation:
        return self.framed.triangulation

    def lift(self, v: str) -> DecoratedFlag2:
        return self.lifts[v]

    def with_triangulation(self, t: IdealTriangulation) -> "DecoratedPolygonConfig":
        return DecoratedPolygonConfig(t, self.lifts)

    def scaled(self, lambdas: Mapping[str, Fraction]) -> "DecoratedPolygonConfig":
        return DecoratedPolygonConfig(
            self.triangulation, {v: a.scaled(lambdas.get(v, 1)) for v, a in self.lifts.items()}, check=False
        )

    def __eq__(self, other):
        return isinstance(other, DecoratedPolygonConfig) and self.lifts == other.lifts and self.triangulation == other.triangulation

    def __repr__(self):
        return f"DecoratedPolygonConfig({self.lifts})"


def a_coord(c: DecoratedPolygonConfig, e: str) -> Fraction:
    u, v = c.triangulation.endpoints(e)
    value = det2(c.lifts[u], c.lifts[v])
    if value == 0:
        raise DegenerateConfigurationError(f"A-coordinate of edge {e!r} vanishes")
    return value


def a_coords(c: DecoratedPolygonConfig) -> dict[str, Fraction]:
    return {e.label: a_coord(c, e.label) for e in c.triangulation.edges}


def _lifts_for(c) -> tuple[IdealTriangulation, Mapping[str, DecoratedFlag2]]:
    if isinstance(c, DecoratedPolygonConfig):
        return c.triangulation, c.lifts
    return c.triangulation, {v: lift_of(f) for v, f in c.flags.items()}


def x_coord(c: FramedPolygonConfig | DecoratedPolygonConfig, e: str) -> Fraction:
    """Cross-ratio coordinate of an internal edge; independent of lifts."""
    t, lifts = _lifts_for(c)
    p, q, r, s = t.quadrilateral(e)
    return x_from_cross_ratio(cross_ratio(lifts[p], lifts[q], lifts[r], lifts[s]))


def x_coords(c: FramedPolygonConfig | DecoratedPolygonConfig) -> dict[str, Fraction]:
    t = c.triangulation
    return {e: x_coord(c, e) for e in t.internal_edges}


class DoubleCoordinates(NamedTuple):
    B: dict[str, Fraction]
    X: dict[str, Fraction]

    def as_point(self) -> dict[str, Fraction]:
        """Values keyed by D-torus coordinate names (``B_e``, ``X_e``)."""
        out = {f"B_{e}": v for e, v in self.B.items()}
        out.update({f"X_{e}": v for e, v in self.X.items()})
        return out

    def to_json(self) -> dict:
        return {
            "B": {e: format_rational(v) for e, v in self.B.items()},
            "X": {e: format_rational(v) for e, v in self.X.items()},
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "DoubleCoordinates":
        return cls(
            {e: parse_rational(v) for e, v in data.get("B", {}).items()},
            {e: parse_rational(v) for e, v in data["X"].items()},
        )


class DoubleConfig:
    """Decorated configurations on a polygon and on its mirror image.

    ``front`` lives on the triangulation ``T`` and ``back`` on
    ``T.mirror()``.  The gluing of lifts is vertexwise: the lift of ``p`` in
    front corresponds to the lift of ``p`` in back.  Boundary edges must
    carry equal A-coordinates on both sides.
    """

    def __init__(self, front: DecoratedPolygonConfig, back: DecoratedPolygonConfig, *, check: bool = True):
        t, tb = front.triangulation, back.triangulation
        if check:
            if t.vertices != tb.vertices or tb != t.mirror():
                raise TriangulationError("back configuration must live on the mirror triangulation")
            for e in t.boundary_edges:
                if a_coord(front, e) != a_coord(back, e):
                    raise DegenerateConfigurationError(f"frozen condition A = A° fails on boundary edge {e!r}")
        self.front = front
        self.back = back

    @property
    def triangulation(self) -> IdealTriangulation:
        return self.front.triangulation

    @property
    def correspondence(self) -> dict[str, tuple[DecoratedFlag2, DecoratedFlag2]]:
        return {v: (self.front.lifts[v], self.back.lifts[v]) for v in self.triangulation.vertices}

    def with_triangulation(self, t: IdealTriangulation) -> "DoubleConfig":
        return DoubleConfig(self.front.with_triangulation(t), self.back.with_triangulation(t.mirror()), check=False)

    def __eq__(self, other):
        return isinstance(other, DoubleConfig) and self.front == other.front and self.back == other.back

    def __repr__(self):
        return f"DoubleConfig(front={self.front.lifts}, back={self.back.lifts})"

    # -- file format -------------------------------------------------------

    def to_json(self) -> dict:
        t = self.triangulation
        return {
            "triangulation": t.to_json(),
            "vertices": [
                {
                    "label": v,
                    "flag": _flag_text(self.front.framed.flags[v]),
                    "lift": self.front.lifts[v].to_json(),
                    "back": self.back.lifts[v].to_json(),
                }
                for v in t.vertices
            ],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def _flag_text(f: Flag) -> str:
    return "inf" if f is INF else format_rational(f)


def config_to_json(c: FramedPolygonConfig | DecoratedPolygonConfig | DoubleConfig) -> dict:
    if isinstance(c, DoubleConfig):
        return c.to_json()
    t = c.triangulation
    if isinstance(c, DecoratedPolygonConfig):
        verts = [{"label": v, "flag": _flag_text(c.framed.flags[v]), "lift": c.lifts[v].to_json()} for v in t.vertices]
    else:
        verts = [{"label": v, "flag": _flag_text(c.flags[v])} for v in t.vertices]
    return {"triangulation": t.to_json(), "vertices": verts}


def config_from_json(data: Mapping) -> FramedPolygonConfig | DecoratedPolygonConfig | DoubleConfig:
    """Parse a configuration document; the richest complete level wins."""
    t = IdealTriangulation.from_json(data["triangulation"])
    verts = {str(d["label"]): d for d in data["vertices"]}
    if set(verts) != set(t.vertices):
        raise TriangulationError("configuration vertices do not match the triangulation")
    if all("lift" in d for d in verts.values()):
        front = DecoratedPolygonConfig(t, {v: DecoratedFlag2.from_json(d["lift"]) for v, d in verts.items()})
        for v, d in verts.items():
            if "flag" in d and _flag(d["flag"]) != front.framed.flags[v]:
                raise DegenerateConfigurationError(f"lift at {v!r} does not span the stated flag")
        if all("back" in d for d in verts.values()):
            back = DecoratedPolygonConfig(t.mirror(), {v: DecoratedFlag2.from_json(d["back"]) for v, d in verts.items()})
            return DoubleConfig(front, back)
        return front
    return FramedPolygonConfig(t, {v: _flag(d["flag"]) for v, d in verts.items()})


def double_coords(d: DoubleConfig, t: IdealTriangulation | None = None) -> DoubleCoordinates:
    """``B_j = A_j°/A_j`` and ``X_j`` over the internal edges of ``t``.

    ``t`` defaults to the triangulation ``d`` was built on; any other
    triangulation of the same polygon may be passed.
    """
    if t is not None and t != d.triangulation:
        d = d.with_triangulation(t)
    t = d.triangulation
    B = {e: a_coord(d.back, e) / a_coord(d.front, e) for e in t.internal_edges}
    X = {e: x_coord(d.front, e) for e in t.internal_edges}
    return DoubleCoordinates(B, X)


def mirror_x_coords(d: DoubleConfig) -> dict[str, Fraction]:
    """X-coordinates of the back configuration, read as coordinates on S.

    The cross-ratios are taken on the mirror triangulation; orientation
    reversal inverts them, so they are inverted back to land on the same
    torus as the front coordinates.
    """
    return {e: 1 / x_coord(d.back, e) for e in d.back.triangulation.internal_edges}


def h_rescale(d: DoubleConfig, lambdas: Mapping[str, Fraction]) -> DoubleConfig:
    """Scale the front and back lifts at each vertex by the same factor."""
    for v, lam in lambdas.items():
        if lam == 0:
            raise ValueError(f"rescaling factor at {v!r} must be nonzero")
    return DoubleConfig(d.front.scaled(lambdas), d.back.scaled(lambdas), check=False)


# -- reconstruction ----------------------------------------------------------


def _triangle_order(t: IdealTriangulation):
    """Triangles in breadth-first order over the dual tree, with entry edges."""
    order = [(0, None)]
    seen = {0}
    queue = deque([0])
    while queue:
        a = queue.popleft()
        for s in range(3):
            e = t.edge_of_side((a, s))
            if not e.internal:
                continue
            for b, _ in e.sides:
                if b not in seen:
                    seen.add(b)
                    order.append((b, e.label))
                    queue.append(b)
    return order


def _check_nonzero(values: Mapping[str, Fraction], what: str):
    for k, v in values.items():
        if v == 0:
            raise DegenerateConfigurationError(f"{what} coordinate of {k!r} is zero")


def reconstruct_framed(t: IdealTriangulation, xs: Mapping[str, Fraction]) -> FramedPolygonConfig:
    """Flags with the prescribed X-coordinates.

    The corners ``c0, c1, c2`` of the first triangle get the flags ``0, -1,
    inf``; every other flag is then forced by one cross-ratio equation,
    moving across the dual tree.
    """
    check_polygon(t)
    xs = {e: _q(xs[e]) for e in t.internal_edges}
    _check_nonzero(xs, "X")
    c0, c1, c2 = t.triangles[0]
    lifts: dict[str, DecoratedFlag2] = {c2: lift_of(INF), c0: lift_of(Fraction(0)), c1: lift_of(Fraction(-1))}
    for _, e in _triangle_order(t)[1:]:
        p, q, r, s = t.quadrilateral(e)
        if q in lifts and s not in lifts:
            new, known = s, (p, q, r)
        elif s in lifts and q not in lifts:
            # rotate to (r, s, p, q)
            new, known = q, (r, s, p)
        else:
            raise TriangulationError(f"cannot propagate across {e!r}")
        a, b, c = (lifts[k] for k in known)
        dab, dbc = det2(a, b), det2(b, c)
        # solves x * det(a,b) * det(c,new) = -det(b,c) * det(new,a)
        coef_c, coef_a = xs[e] * dab, -dbc
        v = DecoratedFlag2(coef_c * c.x + coef_a * a.x, coef_c * c.y + coef_a * a.y)
        lifts[new] = lift_of(flag_of(v))
    return FramedPolygonConfig(t, {v: flag_of(a) for v, a in lifts.items()})


def reconstruct_decorated(t: IdealTriangulation, a_values: Mapping[str, Fraction]) -> DecoratedPolygonConfig:
    """Lifts with prescribed A-coordinates on every edge.

    The first triangle's corners ``c0, c1`` get ``(1, 0)`` and
    ``(0, +-A)``; in every further triangle the third lift solves two linear
    determinant equations.
    """
    check_polygon(t)
    a_values = {e.label: _q(a_values[e.label]) for e in t.edges}
    _check_nonzero(a_values, "A")
    vpos = {v: k for k, v in enumerate(t.vertices)}

    def oriented(u, v):
        """det(a_u, a_v) demanded by the data."""
        e = _edge_between(t, u, v)
        val = a_values[e]
        return val if vpos[u] < vpos[v] else -val

    c0, c1, c2 = t.triangles[0]
    lifts = {c0: DecoratedFlag2(Fraction(1), Fraction(0)), c1: DecoratedFlag2(Fraction(0), oriented(c0, c1))}

    def solve(u, w, z):
        duw = det2(lifts[u], lifts[w])
        if duw == 0:
            raise DegenerateConfigurationError("known lifts are parallel")
        # a_z = alpha a_u + beta a_w
        beta = oriented(u, z) / duw
        alpha = -oriented(w, z) / duw
        au, aw = lifts[u], lifts[w]
        lifts[z] = DecoratedFlag2(alpha * au.x + beta * aw.x, alpha * au.y + beta * aw.y)

    solve(c0, c1, c2)
    for ti, _ in _triangle_order(t)[1:]:
        tri = t.triangles[ti]
        unknown = [v for v in tri if v not in lifts]
        if len(unknown) != 1:
            raise TriangulationError("triangle does not share an edge with the solved region")
        (z,) = unknown
        u, w = [v for v in tri if v != z]
        solve(u, w, z)
    return DecoratedPolygonConfig(t, lifts)


def _edge_between(t: IdealTriangulation, u: str, v: str) -> str:
    key = (u, v) if t.vertex_position(u) < t.vertex_position(v) else (v, u)
    cache = t.__dict__.setdefault("_endpoint_index", None)
    if cache is None:
        cache = {t.endpoints(e.label): e.label for e in t.edges}
        t.__dict__["_endpoint_index"] = cache
    try:
        return cache[key]
    except KeyError:
        raise TriangulationError(f"no edge between {u!r} and {v!r}") from None


def reconstruct_double(
    t: IdealTriangulation, bs: Mapping[str, Fraction], xs: Mapping[str, Fraction]
) -> DoubleConfig:
    """A double configuration whose coordinates are ``(bs, xs)``.

    Front: flags from ``xs`` with standard lifts.  Back: lifts on the mirror
    triangulation with ``A° = B * A``, where ``B = 1`` on boundary edges.
    """
    bs = {e: _q(bs[e]) for e in t.internal_edges}
    _check_nonzero(bs, "B")
    framed = reconstruct_framed(t, xs)
    front = DecoratedPolygonConfig(t, {v: lift_of(f) for v, f in framed.flags.items()})
    a_front = a_coords(front)
    a_back = {e: bs.get(e, Fraction(1)) * a for e, a in a_front.items()}
    back = reconstruct_decorated(t.mirror(), a_back)
    return DoubleConfig(front, back)
