import itertools
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clusterdouble.seed import Seed, canonical_form, mutate_seed
from clusterdouble.surface import (
    IdealTriangulation,
    TriangulationError,
    all_polygon_triangulations,
    expected_label_count,
    flip,
    flip_graph,
    flip_mutation_check,
    m_labels,
    m_triangulation_seed,
    polygon_triangulation,
    validate,
)


def catalan(k):
    return comb(2 * k, k) // (k + 1)


def lattice_count(t: IdealTriangulation, m: int) -> int:
    """Non-corner lattice points, counted per triangle with shared edges merged."""
    per_triangle = (m + 1) * (m + 2) // 2 - 3
    return len(t.triangles) * per_triangle - (m - 1) * len(t.internal_edges)


SQUARE = polygon_triangulation(4)
PENTAGON = polygon_triangulation(5)
ZIGZAG = polygon_triangulation(6, [("1", "2", "6"), ("2", "5", "6"), ("2", "3", "5"), ("3", "4", "5")])
TORUS = IdealTriangulation(
    ["p"],
    [("p", "p", "p"), ("p", "p", "p")],
    [((0, 0), (1, 0)), ((0, 1), (1, 1)), ((0, 2), (1, 2))],
    [],
    labels=["a", "b", "c"],
)


@st.composite
def polygon_triangulations(draw, n_max=10):
    n = draw(st.integers(3, n_max))
    t = polygon_triangulation(n)
    # random walk in the flip graph
    for _ in range(draw(st.integers(0, 12))):
        if not t.internal_edges:
            break
        t = flip(t, draw(st.sampled_from(t.internal_edges)))[0]
    return t


# -- validate -------------------------------------------------------------------------


def test_square_is_valid():
    rep = validate(SQUARE)
    assert rep.valid and len(SQUARE.internal_edges) == 1 and len(SQUARE.boundary_edges) == 4


def test_self_folded_triangle_is_flagged():
    t = IdealTriangulation(["p", "q"], [("p", "q", "p")], [((0, 0), (0, 1))], [(0, 2)])
    rep = validate(t)
    assert rep.self_folded == [0] and not rep.valid
    with pytest.raises(TriangulationError):
        m_triangulation_seed(t, 2)


def test_inconsistent_orientation_is_flagged():
    t = IdealTriangulation(
        ["1", "2", "3", "4"],
        [("1", "2", "3"), ("1", "2", "4")],
        [((0, 0), (1, 0))],
        [(0, 1), (0, 2), (1, 1), (1, 2)],
    )
    rep = validate(t)
    assert rep.orientation_errors and not rep.valid


def test_unaccounted_side_is_reported():
    t = IdealTriangulation(["1", "2", "3"], [("1", "2", "3")], [], [(0, 0), (0, 1)])
    assert not validate(t).valid


# -- flips ----------------------------------------------------------------------------


def test_square_flip_swaps_diagonal():
    t2, corr = flip(SQUARE, "1-3")
    assert corr["1-3"] == "2-4"
    assert t2.internal_edges == ["2-4"]
    assert sorted(t2.endpoints("2-4")) == ["2", "4"]
    assert validate(t2).valid


def test_flip_is_an_involution():
    for t in all_polygon_triangulations(6):
        for e in t.internal_edges:
            t2, c1 = flip(t, e)
            t3, c2 = flip(t2, c1[e])
            assert t3.fingerprint() == t.fingerprint()
            assert {c2[c1[x]] for x in c1} == {e.label for e in t3.edges}


def test_boundary_flip_rejected():
    with pytest.raises(TriangulationError):
        flip(SQUARE, "1-2")


@pytest.mark.parametrize("n", [4, 5, 6, 7, 8])
def test_triangulation_counts_are_catalan(n):
    keys, edges = flip_graph(n)
    assert len(keys) == len(set(keys)) == catalan(n - 2)
    # every triangulation has n-3 flips, each edge counted from both ends
    assert len(edges) == catalan(n - 2) * (n - 3) // 2


def test_pentagon_flip_graph_is_a_cycle():
    keys, edges = flip_graph(5)
    degree = {i: 0 for i in range(len(keys))}
    for a, b in edges:
        degree[a] += 1
        degree[b] += 1
    assert len(keys) == 5 and set(degree.values()) == {2}


# -- seeds of m-triangulations ----------------------------------------------------------


def test_square_seed():
    s = m_triangulation_seed(SQUARE, 2)
    assert len(s.indices) == 5 and s.mutable == ("1-3",)
    row = s.row("1-3")
    # cyclic boundary order starting at 2-3: (+1, -1, +1, -1)
    assert [row[e] for e in ("2-3", "3-4", "1-4", "1-2")] == [1, -1, 1, -1]


def test_single_triangle_m3():
    t = polygon_triangulation(3)
    s = m_triangulation_seed(t, 3)
    assert len(s.indices) == 7 and len(s.mutable) == 1


def test_single_triangle_m2_is_a_cycle():
    s = m_triangulation_seed(polygon_triangulation(3), 2)
    eps = [list(r) for r in s.eps]
    cyc = [[0, 1, -1], [-1, 0, 1], [1, -1, 0]]
    assert eps in (cyc, [[-v for v in r] for r in cyc])


def test_torus_gives_markov_quiver():
    s = m_triangulation_seed(TORUS, 2)
    markov = Seed.from_matrix([[0, 2, -2], [-2, 0, 2], [2, -2, 0]])
    assert canonical_form(s) == canonical_form(markov)
    for e in TORUS.internal_edges:
        assert flip_mutation_check(TORUS, e, 2).equal


def test_m_labels_are_shared_across_edges():
    t = polygon_triangulation(5)
    indices, frozen, where = m_labels(t, 4)
    used = set(where.values())
    assert used == set(indices)
    assert set(frozen) == {f"{e}:{r}" for e in t.boundary_edges for r in (1, 2, 3)}


@pytest.mark.parametrize("t", [SQUARE, PENTAGON, ZIGZAG], ids=["square", "pentagon", "zigzag"])
def test_flip_mutation_examples(t):
    for e in t.internal_edges:
        assert flip_mutation_check(t, e, 2).equal


def test_flip_does_not_match_mutation_at_another_edge():
    t = PENTAGON
    e, other = t.internal_edges
    s = m_triangulation_seed(t, 2)
    t2, corr = flip(t, e)
    s2 = m_triangulation_seed(t2, 2)
    wrong = mutate_seed(s, other)
    mismatch = any(s2.e(corr[i], corr[j]) != wrong.e(i, j) for i, j in itertools.product(s.indices, repeat=2))
    assert mismatch


def test_higher_m_flip_check_unsupported():
    with pytest.raises(NotImplementedError):
        flip_mutation_check(SQUARE, "1-3", 3)


@settings(max_examples=60)
@given(polygon_triangulations(), st.sampled_from([2, 3, 4]))
def test_seed_skew_symmetry_and_label_count(t, m):
    s = m_triangulation_seed(t, m)
    n = len(s.indices)
    assert all(s.eps[a][b] == -s.eps[b][a] for a in range(n) for b in range(n))
    assert n == expected_label_count(t, m) == lattice_count(t, m)
    assert len(s.frozen) == (m - 1) * len(t.boundary_edges)


def test_json_round_trip():
    t = flip(ZIGZAG, "2-5")[0]
    again = IdealTriangulation.loads(t.dumps())
    assert again == t and again.dumps() == t.dumps()
    minimal = {k: v for k, v in t.to_json().items() if k != "labels"}
    assert IdealTriangulation.from_json(minimal).fingerprint() == t.fingerprint()


def test_mirror_reverses_orientation():
    m = SQUARE.mirror()
    assert validate(m).valid
    assert m.mirror() == SQUARE
    s, sm = m_triangulation_seed(SQUARE, 2), m_triangulation_seed(m, 2)
    assert all(sm.e(i, j) == -s.e(i, j) for i in s.indices for j in s.indices)
