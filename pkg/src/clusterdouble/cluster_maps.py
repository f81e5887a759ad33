"""Cluster transformations and structural maps stored as pullbacks.

A :class:`ClusterMap` from torus ``S`` to torus ``T`` is stored as the
pullback of every coordinate of ``T``: a rational function in the
coordinates of ``S``.  Composition is therefore substitution, in the reverse
of the geometric order: ``compose(f, g)`` is "first ``f``, then ``g``".

Coordinate naming:

==========  =============================================
torus       coordinates
==========  =============================================
A           ``A_i`` for ``i`` in I
A x A       ``A_i`` then ``Ao_i`` (the second factor)
X           ``X_j`` for ``j`` in J
X x X       ``X_j`` (``X_j (x) 1``) then ``Xo_j`` (``1 (x) X_j``)
D           ``B_j`` for ``j`` in J, then ``X_j``
==========  =============================================

With frozen indices the structural maps run in one of two modes.  Strict mode
refuses them.  Permissive mode identifies ``Ao_i`` with ``A_i`` and sets
``B_i = 1`` on frozen ``i``, which is what the moduli-space construction on
surfaces with boundary needs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .ratfunc import RationalFunction, VarSet
from .seed import Seed, SeedError, mutate_seed

__all__ = [
    "ClusterMap",
    "ClusterMapError",
    "FrozenIndexError",
    "a_name",
    "ao_name",
    "x_name",
    "xo_name",
    "b_name",
    "a_torus",
    "aa_torus",
    "x_torus",
    "xx_torus",
    "d_torus",
    "torus",
    "identity_map",
    "a_mutation",
    "x_mutation",
    "d_mutation",
    "aa_mutation",
    "xx_mutation",
    "p_map",
    "pp_map",
    "phi_map",
    "pi_map",
    "iota_map",
    "j_map",
    "swap_map",
    "compose",
    "compose_all",
    "is_identity_up_to_permutation",
]


class ClusterMapError(ValueError):
    pass


class FrozenIndexError(ClusterMapError, SeedError):
    pass


def a_name(i: str) -> str:
    return f"A_{i}"


def ao_name(i: str) -> str:
    return f"Ao_{i}"


def x_name(i: str) -> str:
    return f"X_{i}"


def xo_name(i: str) -> str:
    return f"Xo_{i}"


def b_name(i: str) -> str:
    return f"B_{i}"


def a_torus(s: Seed) -> VarSet:
    return VarSet(a_name(i) for i in s.indices)


def aa_torus(s: Seed) -> VarSet:
    """A x A; in permissive mode frozen ``Ao_i`` are identified with ``A_i``."""
    return VarSet([a_name(i) for i in s.indices] + [ao_name(j) for j in s.mutable])


def x_torus(s: Seed) -> VarSet:
    return VarSet(x_name(j) for j in s.mutable)


def xx_torus(s: Seed) -> VarSet:
    return VarSet([x_name(j) for j in s.mutable] + [xo_name(j) for j in s.mutable])


def d_torus(s: Seed) -> VarSet:
    return VarSet([b_name(j) for j in s.mutable] + [x_name(j) for j in s.mutable])


_TORI = {"A": a_torus, "AA": aa_torus, "X": x_torus, "XX": xx_torus, "D": d_torus}


def torus(kind: str, s: Seed) -> VarSet:
    try:
        return _TORI[kind](s)
    except KeyError:
        raise ClusterMapError(f"unknown torus kind {kind!r}") from None


@dataclass(frozen=True)
class ClusterMap:
    """Birational map ``source -> target`` given by its pullback."""

    source_vars: VarSet
    target_vars: VarSet
    pullback: Mapping[str, RationalFunction]
    source_seed: Seed | None = None
    target_seed: Seed | None = None
    name: str = ""

    def __post_init__(self):
        pb = dict(self.pullback)
        if set(pb) != set(self.target_vars.names):
            extra = sorted(set(pb) - set(self.target_vars.names))
            missing = sorted(set(self.target_vars.names) - set(pb))
            raise ClusterMapError(f"pullback keys do not match target coordinates (missing {missing}, extra {extra})")
        for t, f in pb.items():
            if f.varset != self.source_vars:
                raise ClusterMapError(f"pullback of {t} is not a function of the source coordinates")
            if f.is_zero():
                raise ClusterMapError(f"pullback of {t} is identically zero")
        object.__setattr__(self, "pullback", {t: pb[t] for t in self.target_vars.names})

    def __getitem__(self, target: str) -> RationalFunction:
        return self.pullback[target]

    def __eq__(self, other):
        if not isinstance(other, ClusterMap):
            return NotImplemented
        return (
            self.source_vars == other.source_vars
            and self.target_vars == other.target_vars
            and self.pullback == other.pullback
        )

    def __hash__(self):
        return hash((self.source_vars, self.target_vars, tuple(self.pullback.values())))

    def is_identity(self) -> bool:
        return self.source_vars == self.target_vars and all(
            f.as_variable() == t for t, f in self.pullback.items()
        )

    def evaluate(self, point: Mapping[str, Fraction | int]) -> dict[str, Fraction]:
        """Image of a source point, as target coordinates."""
        return {t: f.evaluate(point) for t, f in self.pullback.items()}

    def rename(self, source: Mapping[str, str] | None = None, target: Mapping[str, str] | None = None) -> "ClusterMap":
        """Rename source and/or target coordinates (missing names are kept)."""
        source = source or {}
        target = target or {}
        src = VarSet(source.get(n, n) for n in self.source_vars.names)
        tgt = VarSet(target.get(n, n) for n in self.target_vars.names)
        moved = {n: src.var(source.get(n, n)) for n in self.source_vars.names}
        pb = {target.get(t, t): f.substitute(moved, varset=src) for t, f in self.pullback.items()}
        return ClusterMap(src, tgt, pb, self.source_seed, self.target_seed, self.name)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "source": list(self.source_vars.names),
            "target": list(self.target_vars.names),
            "pullback": [[t, f.to_json()] for t, f in self.pullback.items()],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def from_json(cls, data: Mapping) -> "ClusterMap":
        src = VarSet(data["source"])
        tgt = VarSet(data["target"])
        pb = {t: RationalFunction.from_json(src, f) for t, f in data["pullback"]}
        return cls(src, tgt, pb, name=data.get("name", ""))


def identity_map(vars: VarSet, seed: Seed | None = None) -> ClusterMap:
    return ClusterMap(vars, vars, {n: vars.var(n) for n in vars.names}, seed, seed, "id")


def _check_mutable(s: Seed, k: str) -> str:
    k = str(k)
    s.position(k)
    if k in s.frozen:
        raise FrozenIndexError(f"cannot mutate at frozen index {k!r}")
    return k


def _exchange_sides(s: Seed, k: str) -> tuple[dict[str, int], dict[str, int]]:
    """Positive and negative parts of row ``k`` as ``{j: |eps_kj|}``."""
    pos, neg = {}, {}
    for j, e in s.row(k).items():
        if e > 0:
            pos[j] = e
        elif e < 0:
            neg[j] = -e
    return pos, neg


def a_mutation(s: Seed, k: str) -> ClusterMap:
    """Pullback of the A-torus of ``mu_k(s)`` to the A-torus of ``s``."""
    k = _check_mutable(s, k)
    V = a_torus(s)
    pos, neg = _exchange_sides(s, k)
    plus = RationalFunction.monomial(V, {a_name(j): e for j, e in pos.items()})
    minus = RationalFunction.monomial(V, {a_name(j): e for j, e in neg.items()})
    pb = {n: V.var(n) for n in V.names}
    pb[a_name(k)] = (plus + minus) / V.var(a_name(k))
    return ClusterMap(V, V, pb, s, mutate_seed(s, k), f"mu_{k}^A")


def _x_pullback(s: Seed, k: str, V: VarSet, name) -> dict[str, RationalFunction]:
    xk = V.var(name(k))
    pb = {}
    for i in s.mutable:
        xi = V.var(name(i))
        if i == k:
            pb[name(i)] = 1 / xk
            continue
        e = s.e(i, k)
        if e == 0:
            pb[name(i)] = xi
        else:
            sign = 1 if e > 0 else -1
            pb[name(i)] = xi * (1 + xk ** (-sign)) ** (-e)
    return pb


def x_mutation(s: Seed, k: str) -> ClusterMap:
    k = _check_mutable(s, k)
    V = x_torus(s)
    return ClusterMap(V, V, _x_pullback(s, k, V, x_name), s, mutate_seed(s, k), f"mu_{k}^X")


def d_mutation(s: Seed, k: str) -> ClusterMap:
    """Mutation of the symplectic-double torus.

    Products over frozen ``j`` are dropped, i.e. frozen ``B_j`` are taken to
    be 1 (the double torus has no coordinates there).
    """
    k = _check_mutable(s, k)
    V = d_torus(s)
    pb = _x_pullback(s, k, V, x_name)
    pos, neg = _exchange_sides(s, k)
    J = set(s.mutable)
    plus = RationalFunction.monomial(V, {b_name(j): e for j, e in pos.items() if j in J})
    minus = RationalFunction.monomial(V, {b_name(j): e for j, e in neg.items() if j in J})
    xk = V.var(x_name(k))
    for j in s.mutable:
        pb[b_name(j)] = V.var(b_name(j))
    pb[b_name(k)] = (xk * plus + minus) / ((1 + xk) * V.var(b_name(k)))
    return ClusterMap(V, V, pb, s, mutate_seed(s, k), f"mu_{k}^D")


def aa_mutation(s: Seed, k: str) -> ClusterMap:
    """``mu_k`` acting on both factors of A x A."""
    k = _check_mutable(s, k)
    V = aa_torus(s)
    pos, neg = _exchange_sides(s, k)
    pb = {n: V.var(n) for n in V.names}

    def second(j):
        return ao_name(j) if j not in s.frozen else a_name(j)

    for name in (a_name, second):
        plus = RationalFunction.monomial(V, {name(j): e for j, e in pos.items()})
        minus = RationalFunction.monomial(V, {name(j): e for j, e in neg.items()})
        pb[name(k)] = (plus + minus) / V.var(name(k))
    return ClusterMap(V, V, pb, s, mutate_seed(s, k), f"mu_{k}^AxA")


def xx_mutation(s: Seed, k: str) -> ClusterMap:
    """``mu_k`` acting on both factors of X x X."""
    k = _check_mutable(s, k)
    V = xx_torus(s)
    pb = _x_pullback(s, k, V, x_name)
    pb.update(_x_pullback(s, k, V, xo_name))
    return ClusterMap(V, V, pb, s, mutate_seed(s, k), f"mu_{k}^XxX")


def _structural_guard(s: Seed, strict: bool, what: str):
    if strict and s.frozen:
        raise FrozenIndexError(f"{what} needs a seed without frozen indices (pass strict=False to extend)")


def p_map(s: Seed) -> ClusterMap:
    """``p: A -> X``, ``X_i = prod_j A_j^eps_ij`` over all of I."""
    A = a_torus(s)
    pb = {x_name(i): RationalFunction.monomial(A, {a_name(j): e for j, e in s.row(i).items() if e}) for i in s.mutable}
    return ClusterMap(A, x_torus(s), pb, s, s, "p")


def pp_map(s: Seed) -> ClusterMap:
    """``p x p: A x A -> X x X`` (permissive identification on frozen)."""
    V = aa_torus(s)
    pb = {}
    for i in s.mutable:
        row = s.row(i)
        pb[x_name(i)] = RationalFunction.monomial(V, {a_name(j): e for j, e in row.items() if e})
        pb[xo_name(i)] = RationalFunction.monomial(
            V, {(a_name(j) if j in s.frozen else ao_name(j)): e for j, e in row.items() if e}
        )
    return ClusterMap(V, xx_torus(s), pb, s, s, "pxp")


def phi_map(s: Seed, strict: bool = True) -> ClusterMap:
    """``phi: A x A -> D``; ``X_i = prod A_j^eps_ij`` and ``B_i = Ao_i / A_i``."""
    _structural_guard(s, strict, "phi")
    V = aa_torus(s)
    pb = {}
    for i in s.mutable:
        pb[b_name(i)] = V.var(ao_name(i)) / V.var(a_name(i))
        pb[x_name(i)] = RationalFunction.monomial(V, {a_name(j): e for j, e in s.row(i).items() if e})
    return ClusterMap(V, d_torus(s), pb, s, s, "phi")


def _b_twist(s: Seed, V: VarSet, i: str) -> RationalFunction:
    """``prod_{j in J} B_j^eps_ij``."""
    return RationalFunction.monomial(V, {b_name(j): s.e(i, j) for j in s.mutable if s.e(i, j)})


def pi_map(s: Seed, strict: bool = True) -> ClusterMap:
    """``pi: D -> X x X``; ``X_i (x) 1 = X_i``, ``1 (x) X_i = X_i prod B_j^eps_ij``."""
    _structural_guard(s, strict, "pi")
    V = d_torus(s)
    pb = {}
    for i in s.mutable:
        pb[x_name(i)] = V.var(x_name(i))
    for i in s.mutable:
        pb[xo_name(i)] = V.var(x_name(i)) * _b_twist(s, V, i)
    return ClusterMap(V, xx_torus(s), pb, s, s, "pi")


def iota_map(s: Seed, strict: bool = True) -> ClusterMap:
    _structural_guard(s, strict, "iota")
    V = d_torus(s)
    pb = {}
    for i in s.mutable:
        pb[b_name(i)] = 1 / V.var(b_name(i))
    for i in s.mutable:
        pb[x_name(i)] = V.var(x_name(i)) * _b_twist(s, V, i)
    return ClusterMap(V, V, pb, s, s, "iota")


def j_map(s: Seed, strict: bool = True) -> ClusterMap:
    """Embedding ``X -> D`` along ``B_i = 1``."""
    _structural_guard(s, strict, "j")
    X = x_torus(s)
    pb = {}
    for i in s.mutable:
        pb[b_name(i)] = X.const(1)
    for i in s.mutable:
        pb[x_name(i)] = X.var(x_name(i))
    return ClusterMap(X, d_torus(s), pb, s, s, "j")


def swap_map(s: Seed) -> ClusterMap:
    """Exchange the two factors of X x X."""
    V = xx_torus(s)
    pb = {}
    for i in s.mutable:
        pb[x_name(i)] = V.var(xo_name(i))
        pb[xo_name(i)] = V.var(x_name(i))
    return ClusterMap(V, V, pb, s, s, "swap")


def compose(f: ClusterMap, g: ClusterMap) -> ClusterMap:
    """First ``f``, then ``g``.  Requires ``g.source_vars == f.target_vars``.

    Raises :class:`~clusterdouble.ratfunc.CompositionError` if some pullback
    leaves the domain of definition.
    """
    if g.source_vars != f.target_vars:
        raise ClusterMapError(f"cannot compose: {f.target_vars!r} vs {g.source_vars!r}")
    pb = {}
    for t, h in g.pullback.items():
        name = h.as_variable()
        pb[t] = f.pullback[name] if name is not None else h.substitute(f.pullback, varset=f.source_vars)
    name = f"{g.name}.{f.name}" if f.name and g.name else ""
    return ClusterMap(f.source_vars, g.target_vars, pb, f.source_seed, g.target_seed, name)


def compose_all(*maps: ClusterMap) -> ClusterMap:
    out = maps[0]
    for m in maps[1:]:
        out = compose(out, m)
    return out


def is_identity_up_to_permutation(f: ClusterMap) -> dict[str, str] | None:
    """The permutation ``sigma`` with ``pullback(c) = sigma(c)``, if any.

    Returns a dict target-name -> source-name, or ``None`` if some pullback is
    not a single coordinate or two targets hit the same coordinate.
    """
    if len(f.source_vars) != len(f.target_vars):
        raise ClusterMapError("source and target have different dimensions")
    perm = {}
    for t, h in f.pullback.items():
        name = h.as_variable()
        if name is None:
            return None
        perm[t] = name
    if len(set(perm.values())) != len(perm):
        return None
    return perm
