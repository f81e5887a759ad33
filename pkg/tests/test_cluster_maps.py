import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clusterdouble.cluster_maps import (
    ClusterMap,
    ClusterMapError,
    FrozenIndexError,
    a_mutation,
    a_torus,
    compose,
    d_mutation,
    d_torus,
    identity_map,
    iota_map,
    is_identity_up_to_permutation,
    j_map,
    p_map,
    phi_map,
    pi_map,
    x_mutation,
    x_torus,
)
from clusterdouble.ratfunc import CompositionError, RationalFunction, VarSet
from clusterdouble.rng import SplitMix64
from clusterdouble.seed import Seed, a_n_seed, mutate_seed
from clusterdouble.verify import (
    check_iota,
    check_j_diagonal,
    check_laurent,
    check_naturality,
    check_pentagon,
    check_phi_pi,
    check_pi_iota,
)

A2 = a_n_seed(2)
ZERO3 = Seed.from_matrix([[0] * 3 for _ in range(3)])


def var(m: ClusterMap, name: str) -> RationalFunction:
    return m.source_vars.var(name)


@st.composite
def seeds(draw, max_n=4, frozen=False):
    n = draw(st.integers(1, max_n))
    eps = [[0] * n for _ in range(n)]
    for a in range(n):
        for b in range(a + 1, n):
            v = draw(st.integers(-2, 2))
            eps[a][b], eps[b][a] = v, -v
    labels = [str(i + 1) for i in range(n)]
    fz = draw(st.sets(st.sampled_from(labels), max_size=n - 1)) if frozen and n > 1 else set()
    return Seed.from_matrix(eps, fz, labels)


def positive_point(names, rng):
    return {n: rng.rational(positive=True) for n in names}


# -- reference formulas evaluated with plain Fractions --------------------------------


def a_reference(s, k, A):
    pos = [A[f"A_{j}"] ** e for j, e in s.row(k).items() if e > 0]
    neg = [A[f"A_{j}"] ** -e for j, e in s.row(k).items() if e < 0]
    out = dict(A)
    out[f"A_{k}"] = (math.prod(pos, start=Fraction(1)) + math.prod(neg, start=Fraction(1))) / A[f"A_{k}"]
    return out


def x_reference(s, k, X):
    out = {}
    for i in s.mutable:
        e = s.e(i, k)
        if i == k:
            out[f"X_{i}"] = 1 / X[f"X_{k}"]
        elif e == 0:
            out[f"X_{i}"] = X[f"X_{i}"]
        else:
            sgn = 1 if e > 0 else -1
            out[f"X_{i}"] = X[f"X_{i}"] * (1 + X[f"X_{k}"] ** -sgn) ** -e
    return out


def d_reference(s, k, P):
    out = x_reference(s, k, {n: P[n] for n in P if n.startswith("X_")})
    for i in s.mutable:
        out[f"B_{i}"] = P[f"B_{i}"]
    pos, neg = Fraction(1), Fraction(1)
    for j in s.mutable:
        e = s.e(k, j)
        if e > 0:
            pos *= P[f"B_{j}"] ** e
        elif e < 0:
            neg *= P[f"B_{j}"] ** -e
    xk = P[f"X_{k}"]
    out[f"B_{k}"] = (xk * pos + neg) / ((1 + xk) * P[f"B_{k}"])
    return out


@given(seeds(max_n=4, frozen=True), st.integers(0, 2**32))
def test_mutations_match_reference_formulas(s, seed):
    rng = SplitMix64(seed)
    for k in s.mutable:
        A = positive_point(a_torus(s).names, rng)
        assert a_mutation(s, k).evaluate(A) == a_reference(s, k, A)
        X = positive_point(x_torus(s).names, rng)
        assert x_mutation(s, k).evaluate(X) == x_reference(s, k, X)
        P = positive_point(d_torus(s).names, rng)
        assert d_mutation(s, k).evaluate(P) == d_reference(s, k, P)


# -- worked examples ------------------------------------------------------------------------


def test_a_mutation_examples():
    m = a_mutation(A2, "1")
    assert m["A_1"] == (var(m, "A_2") + 1) / var(m, "A_1")
    assert m["A_2"] == var(m, "A_2")
    z = a_mutation(ZERO3, "2")
    assert z["A_2"] == 2 / var(z, "A_2")


def test_x_mutation_examples():
    m = x_mutation(A2, "2")
    x1, x2 = var(m, "X_1"), var(m, "X_2")
    assert m["X_2"] == 1 / x2
    assert m["X_1"] == x1 * x2 / (x2 + 1)
    # eps_ik = -1
    n = x_mutation(A2, "1")
    assert n["X_2"] == var(n, "X_2") * (1 + var(n, "X_1"))


def test_d_mutation_examples():
    m = d_mutation(A2, "1")
    b1, b2, x1 = var(m, "B_1"), var(m, "B_2"), var(m, "X_1")
    assert m["B_1"] == (x1 * b2 + 1) / ((1 + x1) * b1)
    assert m["B_2"] == b2
    s = Seed.from_matrix([[0, 1, -2], [-1, 0, 1], [2, -1, 0]])
    for k in s.mutable:
        pt = {n: Fraction(1) for n in d_torus(s).names}
        assert d_mutation(s, k).evaluate(pt)[f"B_{k}"] == 1
    z = d_mutation(ZERO3, "3")
    assert z["B_3"] == 1 / var(z, "B_3")


def test_p_map_examples():
    assert all(f == 1 for f in p_map(ZERO3).pullback.values())
    m = p_map(A2)
    assert m["X_1"] == var(m, "A_2")
    assert m["X_2"] == 1 / var(m, "A_1")


def test_structural_map_examples():
    phi = phi_map(A2)
    assert phi["X_1"] == var(phi, "A_2")
    assert phi["B_1"] == var(phi, "Ao_1") / var(phi, "A_1")
    z = phi_map(ZERO3)
    assert z["X_2"] == 1 and z["B_2"] == var(z, "Ao_2") / var(z, "A_2")

    pi = pi_map(A2)
    assert pi["X_1"] == var(pi, "X_1")
    assert pi["Xo_1"] == var(pi, "X_1") * var(pi, "B_2")
    assert pi_map(ZERO3)["Xo_1"] == var(pi_map(ZERO3), "X_1")

    io = iota_map(A2)
    assert io["B_1"] == 1 / var(io, "B_1")
    assert io["X_1"] == var(io, "X_1") * var(io, "B_2")
    assert compose(io, io).is_identity()

    j = j_map(A2)
    assert j["B_1"] == 1 and j["X_1"] == var(j, "X_1")
    jp = compose(j, pi_map(A2))
    assert jp["Xo_1"] == var(jp, "X_1") == jp["X_1"]


def test_compose_examples():
    f = d_mutation(A2, "2")
    assert compose(f, identity_map(f.target_vars)) == f
    assert compose(identity_map(f.source_vars), f) == f
    s2 = mutate_seed(A2, "2")
    assert compose(x_mutation(A2, "2"), x_mutation(s2, "2")).is_identity()


def test_pentagon():
    assert check_pentagon(SplitMix64(11), points=20) == []


def test_is_identity_up_to_permutation_examples():
    V = d_torus(A2)
    assert is_identity_up_to_permutation(identity_map(V)) == {n: n for n in V.names}
    assert is_identity_up_to_permutation(a_mutation(A2, "1")) is None


def test_compose_requires_matching_tori():
    with pytest.raises(ClusterMapError):
        compose(a_mutation(A2, "1"), x_mutation(A2, "1"))


def test_composition_outside_domain():
    V = VarSet(["X_1"])
    f = ClusterMap(V, V, {"X_1": V.const(-1)})
    g = ClusterMap(V, V, {"X_1": 1 / (1 + V.var("X_1"))})
    with pytest.raises(CompositionError):
        compose(f, g)


def test_map_validation():
    V = VarSet(["a", "b"])
    with pytest.raises(ClusterMapError):
        ClusterMap(V, V, {"a": V.var("a")})
    with pytest.raises(ClusterMapError):
        ClusterMap(V, V, {"a": V.var("a"), "b": V.var("a") - V.var("a")})


def test_frozen_modes():
    s = Seed.from_matrix([[0, 1, -1], [-1, 0, 1], [1, -1, 0]], frozen=["3"])
    for build in (phi_map, pi_map, iota_map, j_map):
        with pytest.raises(FrozenIndexError):
            build(s)
    phi = phi_map(s, strict=False)
    assert set(phi.pullback) == {"B_1", "B_2", "X_1", "X_2"}
    # frozen A's enter X through the first factor only
    assert phi["X_1"] == var(phi, "A_2") / var(phi, "A_3")
    io = iota_map(s, strict=False)
    assert compose(io, io).is_identity()
    with pytest.raises(FrozenIndexError):
        a_mutation(s, "3")


def test_json_round_trip():
    m = d_mutation(Seed.from_matrix([[0, 2, -1], [-2, 0, 1], [1, -1, 0]]), "1")
    again = ClusterMap.from_json(m.to_json())
    assert again == m
    assert again.dumps() == m.dumps()
    assert [t for t, _ in m.to_json()["pullback"]] == list(m.target_vars.names)


def test_rename():
    m = a_mutation(A2, "1").rename(target={"A_1": "C_1"})
    assert m.target_vars.names == ("C_1", "A_2")
    assert m["C_1"] == (var(m, "A_2") + 1) / var(m, "A_1")


# -- structure-map identities on random seeds (small hypothesis budget) ----------------------


@settings(max_examples=40)
@given(seeds())
def test_structural_identities(s):
    assert check_phi_pi(s) == []
    assert check_j_diagonal(s) == []
    assert check_iota(s) == []
    assert check_pi_iota(s) == []


@settings(max_examples=25)
@given(seeds(max_n=3))
def test_naturality(s):
    assert check_naturality(s) == []


@pytest.mark.parametrize("n", [2, 3])
def test_laurent_positivity(n):
    checked, problems = check_laurent(a_n_seed(n), 6)
    assert checked > 0 and problems == []


def test_laurent_check_counts_coordinates():
    # two first steps, then one non-repeating step after each
    checked, _ = check_laurent(Seed.from_matrix([[0, 0], [0, 0]]), 2)
    assert checked == 2 + 2
