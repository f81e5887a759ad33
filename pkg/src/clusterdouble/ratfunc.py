"""Exact multivariate rational functions over the rationals.

Every :class:`RationalFunction` is kept in a canonical form, so two functions
are equal exactly when their stored numerator/denominator pairs agree.  The
canonical form is:

* ``gcd(numerator, denominator)`` is a unit,
* both polynomials have integer coefficients whose joint content is 1,
* the leading coefficient of the denominator (graded-lex order over the
  variable order of the :class:`VarSet`) is positive.

Polynomial storage is delegated to sympy's sparse polynomial rings.  The
multivariate gcd uses python-flint when it is installed and sympy otherwise;
both are exact, so the canonical form does not depend on which one ran.
Normalization, substitution, evaluation and serialization live here.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple, Union

from sympy import Symbol
from sympy.polys.domains import QQ
from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyElement, PolyRing

try:  # optional accelerator for the multivariate gcd
    import flint as _flint
except ImportError:  # pragma: no cover - exercised only without python-flint
    _flint = None

__all__ = [
    "VarSet",
    "Polynomial",
    "RationalFunction",
    "LaurentReport",
    "VarSetMismatchError",
    "PoleError",
    "CompositionError",
    "rf_arith",
    "rf_substitute",
    "rf_eval",
    "rf_is_laurent",
    "format_rational",
    "parse_rational",
]

Scalar = Union[int, Fraction]


class VarSetMismatchError(ValueError):
    """Operands live over different variable sets."""


class PoleError(ZeroDivisionError):
    """A denominator vanished: division by zero or evaluation at a pole."""


class CompositionError(PoleError):
    """Substitution produced an identically zero denominator.

    Callers read this as "the composite birational map is not defined here".
    """


def format_rational(q) -> str:
    q = Fraction(int(q.numerator), int(q.denominator))
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text: str) -> Fraction:
    return Fraction(text.strip())


_RINGS: dict[tuple[str, ...], PolyRing] = {}


def _ring_for(names: tuple[str, ...]) -> PolyRing:
    ring = _RINGS.get(names)
    if ring is None:
        ring = PolyRing([Symbol(n) for n in names], QQ, grlex)
        _RINGS[names] = ring
    return ring


class VarSet:
    """Ordered, immutable tuple of distinct coordinate names."""

    __slots__ = ("names", "_index", "_ring")

    def __init__(self, names: Iterable[str]):
        names = tuple(str(n) for n in names)
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names!r}")
        self.names = names
        self._index = {n: i for i, n in enumerate(names)}
        self._ring = _ring_for(names)

    def __len__(self):
        return len(self.names)

    def __iter__(self):
        return iter(self.names)

    def __contains__(self, name):
        return name in self._index

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"{name!r} is not a variable of {self.names!r}") from None

    def __eq__(self, other):
        return isinstance(other, VarSet) and self.names == other.names

    def __hash__(self):
        return hash(self.names)

    def __repr__(self):
        return f"VarSet({list(self.names)!r})"

    @property
    def ring(self) -> PolyRing:
        return self._ring

    def var(self, name: str) -> "RationalFunction":
        return RationalFunction.variable(self, name)

    def vars(self) -> list["RationalFunction"]:
        return [self.var(n) for n in self.names]

    def const(self, value: Scalar) -> "RationalFunction":
        return RationalFunction.constant(self, value)


class Polynomial:
    """Read-only view of a sparse polynomial over a :class:`VarSet`."""

    __slots__ = ("varset", "_poly")

    def __init__(self, varset: VarSet, poly: PolyElement):
        self.varset = varset
        self._poly = poly

    @classmethod
    def from_terms(cls, varset: VarSet, terms: Mapping[tuple[int, ...], Scalar]) -> "Polynomial":
        ring = varset.ring
        poly = ring.zero
        for exps, c in terms.items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != len(varset) or any(e < 0 for e in exps):
                raise ValueError(f"bad exponent vector {exps!r} for {varset!r}")
            c = Fraction(c)
            if c:
                poly = poly + ring({exps: QQ(c.numerator, c.denominator)})
        return cls(varset, poly)

    @property
    def terms(self) -> dict[tuple[int, ...], Fraction]:
        return {m: Fraction(int(c.numerator), int(c.denominator)) for m, c in self._poly.items()}

    def sorted_terms(self) -> list[tuple[tuple[int, ...], Fraction]]:
        """Terms in decreasing graded-lex order (leading term first)."""
        return [
            (m, Fraction(int(c.numerator), int(c.denominator)))
            for m, c in self._poly.terms()
        ]

    def is_zero(self) -> bool:
        return not self._poly

    def is_monomial(self) -> bool:
        return len(self._poly) == 1

    def __len__(self):
        return len(self._poly)

    def __eq__(self, other):
        return isinstance(other, Polynomial) and self.varset == other.varset and self._poly == other._poly

    def __hash__(self):
        return hash((self.varset, frozenset(self._poly.items())))

    def __repr__(self):
        return f"Polynomial({self._poly})"

    def __str__(self):
        return str(self._poly)

    def to_json(self) -> list:
        return [[list(m), format_rational(c)] for m, c in self.sorted_terms()]

    @classmethod
    def from_json(cls, varset: VarSet, data: list) -> "Polynomial":
        terms: dict[tuple[int, ...], Fraction] = {}
        for exps, c in data:
            key = tuple(int(e) for e in exps)
            if key in terms:
                raise ValueError(f"repeated exponent vector {key!r}")
            terms[key] = parse_rational(c)
        return cls.from_terms(varset, terms)


def _monomial_gcd(p: PolyElement, mono: tuple[int, ...]) -> tuple[int, ...]:
    out = list(mono)
    for m in p.keys():
        for i, e in enumerate(m):
            if e < out[i]:
                out[i] = e
    return tuple(out)


def _divide_monomial(p: PolyElement, mono: tuple[int, ...]) -> PolyElement:
    ring = p.ring
    return ring({tuple(a - b for a, b in zip(m, mono)): c for m, c in p.items()})


def _flint_cofactors(num: PolyElement, den: PolyElement) -> tuple[PolyElement, PolyElement]:
    ring = num.ring
    ctx = _flint.fmpz_mpoly_ctx.get(tuple(f"v{i}" for i in range(ring.ngens)), "deglex")
    lcm = 1
    for c in list(num.values()) + list(den.values()):
        lcm = math.lcm(lcm, int(c.denominator))
    fn = ctx.from_dict({m: int(c.numerator) * (lcm // int(c.denominator)) for m, c in num.items()})
    fd = ctx.from_dict({m: int(c.numerator) * (lcm // int(c.denominator)) for m, c in den.items()})
    g = fn.gcd(fd)
    if g.is_one():
        return num, den
    fn = fn // g
    fd = fd // g
    return (
        ring({tuple(map(int, m)): QQ(int(c)) for m, c in fn.to_dict().items()}),
        ring({tuple(map(int, m)): QQ(int(c)) for m, c in fd.to_dict().items()}),
    )


def _cofactors(num: PolyElement, den: PolyElement) -> tuple[PolyElement, PolyElement]:
    if _flint is not None and num.ring.ngens:
        return _flint_cofactors(num, den)
    _, num, den = num.cofactors(den)
    return num, den


def _normalize(num: PolyElement, den: PolyElement) -> tuple[PolyElement, PolyElement]:
    ring = num.ring
    if not den:
        raise PoleError("zero denominator")
    if not num:
        return ring.zero, ring.one

    # gcd, with cheap paths for the monomial denominators that dominate here
    if len(den) == 1:
        (mono,) = den.keys()
        g = _monomial_gcd(num, mono)
        if any(g):
            num = _divide_monomial(num, g)
            den = _divide_monomial(den, g)
    elif len(num) == 1:
        (mono,) = num.keys()
        g = _monomial_gcd(den, mono)
        if any(g):
            num = _divide_monomial(num, g)
            den = _divide_monomial(den, g)
    elif not (num.is_ground or den.is_ground):
        num, den = _cofactors(num, den)

    # integer coefficients with joint content 1
    coeffs = list(num.values()) + list(den.values())
    lcm = 1
    for c in coeffs:
        lcm = math.lcm(lcm, int(c.denominator))
    content = 0
    for c in coeffs:
        content = math.gcd(content, int(c.numerator * (lcm // c.denominator)))
    scale = QQ(lcm, content)
    if den.LC < 0:
        scale = -scale
    if scale != 1:
        num = num.mul_ground(scale)
        den = den.mul_ground(scale)
    return num, den


def _to_qq(value) -> object:
    value = Fraction(value)
    return QQ(value.numerator, value.denominator)


class RationalFunction:
    """Immutable canonical-form quotient of two polynomials."""

    __slots__ = ("varset", "_num", "_den", "_hash")

    def __init__(self, varset: VarSet, num: PolyElement, den: PolyElement | None = None, *, _canonical=False):
        ring = varset.ring
        if den is None:
            den = ring.one
        if num.ring is not ring or den.ring is not ring:
            raise VarSetMismatchError("polynomials are not over this VarSet")
        if not _canonical:
            num, den = _normalize(num, den)
        self.varset = varset
        self._num = num
        self._den = den
        self._hash = None

    # -- construction ------------------------------------------------------

    @classmethod
    def variable(cls, varset: VarSet, name: str) -> "RationalFunction":
        i = varset.index(name)
        return cls(varset, varset.ring.gens[i], _canonical=True)

    @classmethod
    def constant(cls, varset: VarSet, value: Scalar) -> "RationalFunction":
        return cls(varset, varset.ring(_to_qq(value)))

    @classmethod
    def from_polynomials(cls, num: Polynomial, den: Polynomial) -> "RationalFunction":
        if num.varset != den.varset:
            raise VarSetMismatchError("numerator and denominator over different VarSets")
        return cls(num.varset, num._poly, den._poly)

    @classmethod
    def monomial(cls, varset: VarSet, exponents: Mapping[str, int], coeff: Scalar = 1) -> "RationalFunction":
        """``coeff * prod(name**e)`` with possibly negative exponents."""
        top = [0] * len(varset)
        bottom = [0] * len(varset)
        for name, e in exponents.items():
            i = varset.index(name)
            if e >= 0:
                top[i] += e
            else:
                bottom[i] -= e
        ring = varset.ring
        return cls(varset, ring({tuple(top): _to_qq(coeff)}), ring({tuple(bottom): QQ(1)}))

    # -- accessors ---------------------------------------------------------

    @property
    def numerator(self) -> Polynomial:
        return Polynomial(self.varset, self._num)

    @property
    def denominator(self) -> Polynomial:
        return Polynomial(self.varset, self._den)

    def is_zero(self) -> bool:
        return not self._num

    def is_constant(self) -> bool:
        return self._num.is_ground and self._den.is_ground

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return Fraction(self.evaluate({}))

    def as_variable(self) -> str | None:
        """Name of the variable this function equals, if it is one."""
        if len(self._num) != 1 or self._den != self.varset.ring.one:
            return None
        ((m, c),) = self._num.items()
        if c != 1 or sum(m) != 1:
            return None
        return self.varset.names[m.index(1)]

    def variables(self) -> set[str]:
        """Names of the variables that actually occur."""
        used = [False] * len(self.varset)
        for poly in (self._num, self._den):
            for m in poly.keys():
                for i, e in enumerate(m):
                    if e:
                        used[i] = True
        return {n for n, u in zip(self.varset.names, used) if u}

    # -- comparison --------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, RationalFunction):
            return self.varset == other.varset and self._num == other._num and self._den == other._den
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_value() == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.varset, frozenset(self._num.items()), frozenset(self._den.items())))
        return self._hash

    def __repr__(self):
        return f"RationalFunction({self})"

    def __str__(self):
        if self._den == self.varset.ring.one:
            return str(self._num)
        return f"({self._num})/({self._den})"

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            if other.varset != self.varset:
                raise VarSetMismatchError(f"{self.varset!r} vs {other.varset!r}")
            return other
        if isinstance(other, (int, Fraction)):
            return RationalFunction.constant(self.varset, other)
        raise TypeError(f"cannot combine RationalFunction with {type(other).__name__}")

    def __add__(self, other):
        other = self._coerce(other)
        if self._den == other._den:
            return RationalFunction(self.varset, self._num + other._num, self._den)
        return RationalFunction(
            self.varset, self._num * other._den + other._num * self._den, self._den * other._den
        )

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(self.varset, -self._num, self._den, _canonical=True)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        return RationalFunction(self.varset, self._num * other._num, self._den * other._den)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if not self._num:
            raise PoleError("inverse of the zero function")
        return RationalFunction(self.varset, self._den, self._num)

    def __truediv__(self, other):
        other = self._coerce(other)
        if not other._num:
            raise PoleError("division by the zero function")
        return RationalFunction(self.varset, self._num * other._den, self._den * other._num)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n >= 0:
            # coprime, primitive, positive leading coefficient all survive powers
            return RationalFunction(self.varset, self._num**n, self._den**n, _canonical=True)
        return self.inverse() ** (-n)

    # -- substitution and evaluation --------------------------------------

    def substitute(self, assignment: Mapping[str, "RationalFunction"], varset: VarSet | None = None) -> "RationalFunction":
        return rf_substitute(self, assignment, varset)

    def evaluate(self, point: Mapping[str, Scalar]) -> Fraction:
        return rf_eval(self, point)

    def is_laurent(self) -> "LaurentReport":
        return rf_is_laurent(self)

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        return {"num": self.numerator.to_json(), "den": self.denominator.to_json()}

    @classmethod
    def from_json(cls, varset: VarSet, data: Mapping) -> "RationalFunction":
        num = Polynomial.from_json(varset, data["num"])
        den = Polynomial.from_json(varset, data["den"])
        return cls.from_polynomials(num, den)


_OPS = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
    "div": lambda a, b: a / b,
}


def rf_arith(a: RationalFunction, b: RationalFunction, op: str) -> RationalFunction:
    if a.varset != b.varset:
        raise VarSetMismatchError(f"{a.varset!r} vs {b.varset!r}")
    try:
        return _OPS[op](a, b)
    except KeyError:
        raise ValueError(f"unknown operation {op!r}") from None


def _eval_poly(poly: PolyElement, values: list) -> object:
    total = QQ(0)
    for m, c in poly.items():
        term = c
        for v, e in zip(values, m):
            if e:
                term *= v**e
        total += term
    return total


def rf_substitute(
    f: RationalFunction, assignment: Mapping[str, RationalFunction], varset: VarSet | None = None
) -> RationalFunction:
    """Replace the variables of ``f`` by rational functions.

    Every variable occurring in ``f`` must be assigned, and all assigned
    functions must share one VarSet, which becomes the VarSet of the result
    (pass ``varset`` when the assignment may be empty).  Raises
    :class:`CompositionError` when the substituted denominator is
    identically zero.
    """
    targets = {g.varset for g in assignment.values()}
    if varset is not None:
        targets.add(varset)
    if len(targets) > 1:
        raise VarSetMismatchError("assigned functions live over different VarSets")
    target = targets.pop() if targets else f.varset

    used = f.variables()
    missing = used - set(assignment)
    if missing:
        raise KeyError(f"unassigned variables {sorted(missing)}")
    if not used:
        return RationalFunction.constant(target, f.constant_value())

    name = f.as_variable()
    if name is not None:
        return assignment[name]

    names = f.varset.names
    nvars = len(names)
    # max degree of each variable over numerator and denominator
    degs = [0] * nvars
    for poly in (f._num, f._den):
        for m in poly.keys():
            for i, e in enumerate(m):
                if e > degs[i]:
                    degs[i] = e

    ring = target.ring
    tops = [None] * nvars
    bottoms = [None] * nvars
    for i in range(nvars):
        if degs[i]:
            g = assignment[names[i]]
            tops[i] = g._num
            bottoms[i] = g._den

    cache: dict[tuple[int, int, int], PolyElement] = {}

    def power(i, which, e):
        if e == 0:
            return ring.one
        key = (i, which, e)
        p = cache.get(key)
        if p is None:
            base = tops[i] if which == 0 else bottoms[i]
            p = base if e == 1 else power(i, which, e - 1) * base
            cache[key] = p
        return p

    def homogenized(poly: PolyElement) -> PolyElement:
        out = ring.zero
        for m, c in poly.items():
            term = ring(c)
            for i, e in enumerate(m):
                if degs[i]:
                    term = term * power(i, 0, e) * power(i, 1, degs[i] - e)
            out += term
        return out

    num = homogenized(f._num)
    den = homogenized(f._den)
    if not den:
        raise CompositionError("denominator vanishes identically after substitution")
    return RationalFunction(target, num, den)


def rf_eval(f: RationalFunction, point: Mapping[str, Scalar]) -> Fraction:
    values = []
    used = f.variables()
    for n in f.varset.names:
        if n in point:
            values.append(_to_qq(point[n]))
        elif n in used:
            raise KeyError(f"no value for variable {n!r}")
        else:
            values.append(QQ(0))
    den = _eval_poly(f._den, values)
    if den == 0:
        raise PoleError(f"denominator of {f} vanishes at {dict(point)}")
    value = _eval_poly(f._num, values) / den
    return Fraction(int(value.numerator), int(value.denominator))


class LaurentReport(NamedTuple):
    is_laurent: bool
    positive: bool | None  # all numerator coefficients > 0; None when not Laurent

    def __bool__(self):
        return self.is_laurent


def rf_is_laurent(f: RationalFunction) -> LaurentReport:
    if len(f._den) != 1:
        return LaurentReport(False, None)
    # canonical form makes the monomial denominator's coefficient positive
    return LaurentReport(True, all(c > 0 for c in f._num.values()))
