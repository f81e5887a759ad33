"""Ideal triangulations, flips and the exchange matrix of an m-triangulation.

Triangles are corner triples listed in the order given by the surface
orientation.  Side ``s`` of a triangle runs from corner ``s`` to corner
``s + 1`` (mod 3).  Every side is either glued to exactly one other side
(an internal edge) or marked boundary (an external edge).

Orientation convention for the exchange matrix: inside each triangle the
upward small triangles with corners ``(a+1,b,c), (a,b+1,c), (a,b,c+1)`` are
traversed in that cyclic order, and every small edge that does not lie on a
side of the triangle inherits the direction of the unique upward triangle
containing it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .seed import Seed, mutate_seed

__all__ = [
    "Side",
    "Edge",
    "IdealTriangulation",
    "TriangulationError",
    "ValidationReport",
    "FlipVerdict",
    "validate",
    "flip",
    "m_triangulation_seed",
    "m_labels",
    "expected_label_count",
    "flip_mutation_check",
    "polygon_triangulation",
    "all_polygon_triangulations",
    "flip_graph",
]

Side = tuple[int, int]  # (triangle index, side index)


class TriangulationError(ValueError):
    pass


@dataclass(frozen=True)
class Edge:
    label: str
    sides: tuple[Side, ...]  # one side (boundary) or two (internal)

    @property
    def internal(self) -> bool:
        return len(self.sides) == 2


@dataclass
class ValidationReport:
    valid: bool
    self_folded: list[int] = field(default_factory=list)
    orientation_errors: list[tuple[Side, Side]] = field(default_factory=list)
    problems: list[str] = field(default_factory=list)

    def __bool__(self):
        return self.valid


def _side_ends(triangles, side: Side) -> tuple[str, str]:
    t, s = side
    tri = triangles[t]
    return tri[s], tri[(s + 1) % 3]


class IdealTriangulation:
    """Combinatorial ideal triangulation of a decorated surface."""

    def __init__(
        self,
        vertices: Sequence[str],
        triangles: Sequence[Sequence[str]],
        gluings: Iterable[tuple[Side, Side]],
        boundary: Iterable[Side],
        labels: Sequence[str] | None = None,
    ):
        self.vertices = tuple(str(v) for v in vertices)
        self.triangles = tuple(tuple(str(c) for c in tri) for tri in triangles)
        gluings = [tuple(tuple(map(int, side)) for side in pair) for pair in gluings]
        boundary = [tuple(map(int, side)) for side in boundary]
        self._vpos = {v: k for k, v in enumerate(self.vertices)}
        if len(self._vpos) != len(self.vertices):
            raise TriangulationError("duplicate vertex labels")
        for tri in self.triangles:
            if len(tri) != 3:
                raise TriangulationError(f"triangle {tri} does not have three corners")
            for c in tri:
                if c not in self._vpos:
                    raise TriangulationError(f"corner {c!r} is not a vertex")
        for side in [s for pair in gluings for s in pair] + boundary:
            if not (0 <= side[0] < len(self.triangles) and 0 <= side[1] < 3):
                raise TriangulationError(f"side {side} does not exist")

        sides = [tuple(p) for p in gluings] + [(b,) for b in boundary]
        if labels is None:
            labels = self._default_labels(sides)
        elif len(labels) != len(sides) or len(set(labels)) != len(labels):
            raise TriangulationError("need one distinct label per gluing and boundary side")
        self.edges = tuple(Edge(str(lab), s) for lab, s in zip(labels, sides))
        self._edge_of_side: dict[Side, Edge] = {}
        self._duplicates: list[Side] = []
        for e in self.edges:
            for sd in e.sides:
                if sd in self._edge_of_side:
                    self._duplicates.append(sd)
                self._edge_of_side[sd] = e
        self._by_label = {e.label: e for e in self.edges}

    def _default_labels(self, sides) -> list[str]:
        labels = []
        seen: dict[str, int] = {}
        for group in sides:
            u, v = self._oriented_ends(group)
            base = f"{u}-{v}"
            seen[base] = seen.get(base, 0) + 1
            labels.append(base if seen[base] == 1 else f"{base}#{seen[base]}")
        return labels

    def _oriented_ends(self, group: Sequence[Side]) -> tuple[str, str]:
        """Edge endpoints, smaller vertex (in vertex-list order) first."""
        u, v = _side_ends(self.triangles, group[0])
        if self._vpos[u] > self._vpos[v]:
            u, v = v, u
        return u, v

    # -- accessors ---------------------------------------------------------

    def edge(self, label: str) -> Edge:
        try:
            return self._by_label[label]
        except KeyError:
            raise TriangulationError(f"no edge labelled {label!r}") from None

    def edge_of_side(self, side: Side) -> Edge:
        return self._edge_of_side[side]

    @property
    def internal_edges(self) -> list[str]:
        return [e.label for e in self.edges if e.internal]

    @property
    def boundary_edges(self) -> list[str]:
        return [e.label for e in self.edges if not e.internal]

    @property
    def gluings(self) -> list[tuple[Side, Side]]:
        return [e.sides for e in self.edges if e.internal]

    @property
    def boundary(self) -> list[Side]:
        return [e.sides[0] for e in self.edges if not e.internal]

    def endpoints(self, label: str) -> tuple[str, str]:
        return self._oriented_ends(self.edge(label).sides)

    def vertex_position(self, v: str) -> int:
        return self._vpos[v]

    def edge_direction(self, label: str) -> tuple[str, str]:
        """Direction used to place points along an edge.

        From the smaller endpoint to the larger one; a loop uses the
        direction of its first side.
        """
        e = self.edge(label)
        u, v = _side_ends(self.triangles, e.sides[0])
        if u != v and self._vpos[u] > self._vpos[v]:
            u, v = v, u
        return u, v

    def quadrilateral(self, label: str) -> tuple[str, str, str, str]:
        """``(p, q, r, s)`` around an internal edge ``p - r``, oriented.

        The first triangle reads ``(p, q, r)`` and the second ``(r, s, p)`` in
        their corner orders.  The rotation ``(r, s, p, q)`` describes the same
        quadrilateral.
        """
        e = self.edge(label)
        if not e.internal:
            raise TriangulationError(f"{label!r} is a boundary edge")
        (t1, s1), (t2, s2) = e.sides
        a, b = self.triangles[t1], self.triangles[t2]
        r, p, q = a[s1], a[(s1 + 1) % 3], a[(s1 + 2) % 3]
        p2, r2, s = b[s2], b[(s2 + 1) % 3], b[(s2 + 2) % 3]
        if (p2, r2) != (p, r):
            raise TriangulationError(f"edge {label!r} is glued inconsistently")
        return p, q, r, s

    def mirror(self) -> "IdealTriangulation":
        """Same surface with the opposite orientation.

        Each triangle ``(a, b, c)`` becomes ``(a, c, b)``; side 0 of the
        mirror is the old side 2, side 1 is the old side 1, side 2 the old
        side 0.  Edge labels are kept.
        """
        remap = {0: 2, 1: 1, 2: 0}
        tris = [(a, c, b) for a, b, c in self.triangles]
        gl = [tuple((t, remap[s]) for t, s in e.sides) for e in self.edges if e.internal]
        bd = [(e.sides[0][0], remap[e.sides[0][1]]) for e in self.edges if not e.internal]
        labels = [e.label for e in self.edges if e.internal] + [e.label for e in self.edges if not e.internal]
        return IdealTriangulation(self.vertices, tris, gl, bd, labels)

    def __eq__(self, other):
        if not isinstance(other, IdealTriangulation):
            return NotImplemented
        return self.to_json() == other.to_json()

    def __repr__(self):
        return f"IdealTriangulation(vertices={list(self.vertices)}, triangles={[list(t) for t in self.triangles]})"

    def fingerprint(self) -> str:
        """Relabelling-sensitive but order-insensitive description."""
        tris = sorted(tuple(_rotate_min(t, self._vpos)) for t in self.triangles)
        return ";".join(",".join(t) for t in tris)

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        internal = [e for e in self.edges if e.internal]
        external = [e for e in self.edges if not e.internal]
        return {
            "vertices": list(self.vertices),
            "triangles": [list(t) for t in self.triangles],
            "gluings": [[list(a), list(b)] for a, b in (e.sides for e in internal)],
            "boundary": [list(e.sides[0]) for e in external],
            "labels": [e.label for e in internal + external],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def from_json(cls, data: dict) -> "IdealTriangulation":
        try:
            gl = [(tuple(a), tuple(b)) for a, b in data.get("gluings", [])]
            bd = [tuple(b) for b in data.get("boundary", [])]
            return cls(data["vertices"], data["triangles"], gl, bd, data.get("labels"))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, TriangulationError):
                raise
            raise TriangulationError(f"malformed triangulation document: {exc}") from exc

    @classmethod
    def loads(cls, text: str) -> "IdealTriangulation":
        return cls.from_json(json.loads(text))

    @classmethod
    def from_triangles(cls, vertices: Sequence[str], triangles: Sequence[Sequence[str]]) -> "IdealTriangulation":
        """Glue sides with matching reversed endpoints; the rest is boundary.

        Only meaningful when an edge is determined by its endpoints, as for a
        triangulated polygon.
        """
        triangles = [tuple(map(str, t)) for t in triangles]
        open_sides: dict[tuple[str, str], Side] = {}
        gluings = []
        for t, tri in enumerate(triangles):
            for s in range(3):
                u, v = tri[s], tri[(s + 1) % 3]
                other = open_sides.pop((v, u), None)
                if other is not None:
                    gluings.append((other, (t, s)))
                else:
                    if (u, v) in open_sides:
                        raise TriangulationError(f"side {u}->{v} occurs twice with the same direction")
                    open_sides[(u, v)] = (t, s)
        return cls(vertices, triangles, gluings, sorted(open_sides.values()))


def _rotate_min(tri, vpos):
    k = min(range(3), key=lambda i: vpos[tri[i]])
    return tri[k:] + tri[:k]


# -- validation ------------------------------------------------------------


def validate(t: IdealTriangulation) -> ValidationReport:
    rep = ValidationReport(True)
    seen = set()
    for e in t.edges:
        seen.update(e.sides)
    for d in t._duplicates:
        rep.problems.append(f"side {d} is used by more than one edge")
    for ti in range(len(t.triangles)):
        for s in range(3):
            if (ti, s) not in seen:
                rep.problems.append(f"side {(ti, s)} is neither glued nor boundary")
    for e in t.edges:
        if not e.internal:
            continue
        a, b = e.sides
        if a[0] == b[0]:
            if a[0] not in rep.self_folded:
                rep.self_folded.append(a[0])
        ua, va = _side_ends(t.triangles, a)
        ub, vb = _side_ends(t.triangles, b)
        if (ua, va) == (vb, ub):
            continue
        if (ua, va) == (ub, vb):
            rep.orientation_errors.append((a, b))
        else:
            rep.problems.append(f"edge {e.label!r} glues sides with different endpoints")
    rep.valid = not (rep.self_folded or rep.orientation_errors or rep.problems)
    return rep


# -- flips -----------------------------------------------------------------


def flip(t: IdealTriangulation, label: str) -> tuple[IdealTriangulation, dict[str, str]]:
    """Flip an internal edge.

    Returns the new triangulation and the edge correspondence (old label ->
    new label; every label maps to itself except the flipped one).  The two
    triangles keep their indices: the first becomes ``(q, r, s)`` and the
    second ``(s, p, q)``, with the new diagonal on side 2 of both.
    """
    e = t.edge(label)
    if not e.internal:
        raise TriangulationError(f"cannot flip boundary edge {label!r}")
    rep = validate(t)
    (t1, s1), (t2, s2) = e.sides
    if t1 == t2 or t1 in rep.self_folded or t2 in rep.self_folded:
        raise TriangulationError(f"flip at {label!r} is not regular (self-folded triangle)")
    p, q, r, s = t.quadrilateral(label)

    tris = list(t.triangles)
    tris[t1] = (q, r, s)
    tris[t2] = (s, p, q)
    moved = {
        (t1, (s1 + 2) % 3): (t1, 0),  # q -> r
        (t2, (s2 + 1) % 3): (t1, 1),  # r -> s
        (t2, (s2 + 2) % 3): (t2, 0),  # s -> p
        (t1, (s1 + 1) % 3): (t2, 1),  # p -> q
    }

    vpos = {v: k for k, v in enumerate(t.vertices)}
    a, b = (q, s) if vpos[q] <= vpos[s] else (s, q)
    existing = {x.label for x in t.edges if x.label != label}
    new_label = f"{a}-{b}"
    if new_label in existing:
        new_label = f"{label}'"

    internal, external = [], []
    for x in t.edges:
        if x.label == label:
            internal.append((new_label, ((t1, 2), (t2, 2))))
            continue
        sides = tuple(moved.get(sd, sd) for sd in x.sides)
        (internal if x.internal else external).append((x.label, sides))
    labels = [lab for lab, _ in internal] + [lab for lab, _ in external]
    out = IdealTriangulation(
        t.vertices, tris, [sd for _, sd in internal], [sd[0] for _, sd in external], labels
    )
    corr = {x.label: x.label for x in t.edges}
    corr[label] = new_label
    return out, corr


# -- m-triangulations ------------------------------------------------------


def _lattice(m: int):
    for x in range(m + 1):
        for y in range(m + 1 - x):
            yield x, y, m - x - y


def m_labels(t: IdealTriangulation, m: int) -> tuple[list[str], list[str], dict[tuple[int, tuple[int, int, int]], str]]:
    """Labels of ``I_m^T``, the frozen (boundary) ones, and the point map.

    The point map sends ``(triangle, (x, y, z))`` to a label, with ``x, y, z``
    the weights on corners 0, 1, 2.  Corners of T are not in it.
    """
    if m < 2:
        raise ValueError("m must be at least 2")

    def edge_label(lab, r):
        return lab if m == 2 else f"{lab}:{r}"

    indices: list[str] = []
    frozen: list[str] = []
    for e in t.edges:
        for r in range(1, m):
            indices.append(edge_label(e.label, r))
            if not e.internal:
                frozen.append(indices[-1])

    where: dict[tuple[int, tuple[int, int, int]], str] = {}
    for ti, tri in enumerate(t.triangles):
        for pt in _lattice(m):
            if m in pt:
                continue
            zeros = [c for c in range(3) if pt[c] == 0]
            if not zeros:
                lab = f"t{ti}[{pt[0]},{pt[1]},{pt[2]}]"
                indices.append(lab)
                where[(ti, pt)] = lab
                continue
            # side s runs corner s -> corner s+1; its points have zero weight on corner s+2
            s = (zeros[0] + 1) % 3
            pos = pt[(s + 1) % 3]
            e = t.edge_of_side((ti, s))
            u, v = t.edge_direction(e.label)
            if u == v:
                agrees = e.sides[0] == (ti, s)
            else:
                agrees = tri[s] == u
            r = pos if agrees else m - pos
            where[(ti, pt)] = edge_label(e.label, r)
    return indices, frozen, where


def expected_label_count(t: IdealTriangulation, m: int) -> int:
    return len(t.edges) * (m - 1) + len(t.triangles) * (m - 1) * (m - 2) // 2


def m_triangulation_seed(t: IdealTriangulation, m: int = 2) -> Seed:
    rep = validate(t)
    if rep.self_folded:
        raise TriangulationError(f"self-folded triangles {rep.self_folded} are not supported")
    if not rep.valid:
        raise TriangulationError("; ".join(rep.problems) or "inconsistent orientation")
    indices, frozen, where = m_labels(t, m)
    pos = {lab: k for k, lab in enumerate(indices)}
    n = len(indices)
    eps = [[0] * n for _ in range(n)]
    for ti in range(len(t.triangles)):
        for a, b, c in _lattice(m - 1):
            cyc = [(a + 1, b, c), (a, b + 1, c), (a, b, c + 1)]
            for u, v in zip(cyc, cyc[1:] + cyc[:1]):
                if any(u[k] == 0 and v[k] == 0 for k in range(3)):
                    continue  # lies on a side of the triangle
                i, j = pos[where[(ti, u)]], pos[where[(ti, v)]]
                eps[i][j] += 1
                eps[j][i] -= 1
    return Seed(tuple(indices), frozenset(frozen), tuple(map(tuple, eps)))


@dataclass
class FlipVerdict:
    equal: bool
    edge: str
    discrepancy: tuple[str, str, int, int] | None = None  # (i, j, mutated, flipped)

    def __bool__(self):
        return self.equal


def flip_mutation_check(t: IdealTriangulation, label: str, m: int = 2) -> FlipVerdict:
    """Compare the seed of ``flip(t, e)`` with ``mu_e`` of the seed of ``t``."""
    if m != 2:
        raise NotImplementedError("flip/mutation comparison is only available for m = 2")
    before = m_triangulation_seed(t, m)
    mutated = mutate_seed(before, label)
    t2, corr = flip(t, label)
    after = m_triangulation_seed(t2, m)
    back = {v: k for k, v in corr.items()}
    if {back[i] for i in after.indices} != set(before.indices):
        return FlipVerdict(False, label, None)
    for i in before.indices:
        for j in before.indices:
            want = mutated.e(i, j)
            got = after.e(corr[i], corr[j])
            if want != got:
                return FlipVerdict(False, label, (i, j, want, got))
    if {corr[f] for f in before.frozen} != set(after.frozen):
        return FlipVerdict(False, label, None)
    return FlipVerdict(True, label)


# -- polygons --------------------------------------------------------------


def _polygon_triangles(verts: Sequence[str]) -> list[list[tuple[str, str, str]]]:
    """All triangulations of the convex polygon with vertices in this order."""
    if len(verts) < 3:
        return [[]]
    out = []
    first, last = verts[0], verts[-1]
    for k in range(1, len(verts) - 1):
        for left in _polygon_triangles(verts[: k + 1]):
            for right in _polygon_triangles(verts[k:]):
                out.append(left + [(first, verts[k], last)] + right)
    return out


def polygon_triangulation(n: int, triangles: Sequence[Sequence[str]] | None = None) -> IdealTriangulation:
    """Triangulated n-gon with vertices ``"1".."n"`` counterclockwise.

    Defaults to the fan from vertex 1.
    """
    if n < 3:
        raise TriangulationError("a polygon needs at least three vertices")
    verts = [str(k) for k in range(1, n + 1)]
    if triangles is None:
        triangles = [("1", verts[k], verts[k + 1]) for k in range(1, n - 1)]
    vpos = {v: k for k, v in enumerate(verts)}
    tris = [_rotate_min(tuple(sorted(map(str, tri), key=vpos.__getitem__)), vpos) for tri in triangles]
    return IdealTriangulation.from_triangles(verts, tris)


def all_polygon_triangulations(n: int) -> list[IdealTriangulation]:
    verts = [str(k) for k in range(1, n + 1)]
    return [polygon_triangulation(n, tris) for tris in _polygon_triangles(verts)]


def flip_graph(n: int) -> tuple[list[str], set[tuple[int, int]]]:
    """Flip graph of the n-gon: triangulation fingerprints and flip edges."""
    tris = all_polygon_triangulations(n)
    keys = [t.fingerprint() for t in tris]
    index = {k: i for i, k in enumerate(keys)}
    edges = set()
    for i, t in enumerate(tris):
        for lab in t.internal_edges:
            j = index[flip(t, lab)[0].fingerprint()]
            edges.add((min(i, j), max(i, j)))
    return keys, edges
