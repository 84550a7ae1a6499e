import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from conftest import build
from strategies import complex_and_subset, median_graphs
from cubical import (CubeComplex, NotConvex, NotMedian, convex_hull, crossing_set, distance,
                     gate, gate_image, gate_map, grid, halfspace_hull, hyperplanes, interval,
                     is_convex, median, separates, subcomplex, validate_cube_complex)
from cubical.errors import DisconnectedPair, EmptyInput, MalformedInput, SelfCrossing
from cubical.generators import ACCEPTANCE_FIXTURES


def V(C, label):
    return C.vertex_of(label)


def hp_between(C, a, b):
    """Hyperplane dual to the edge between labelled vertices a and b."""
    e = tuple(sorted((V(C, a), V(C, b))))
    return int(C.table.edge_class[C.edges.index(e)])


def cycle(n):
    return CubeComplex(n, [(i, (i + 1) % n) for i in range(n)], name=f"cycle{n}")


# ----------------------------------------------------------------- validation

@pytest.mark.parametrize("name", ACCEPTANCE_FIXTURES)
def test_fixtures_are_median_graphs(name):
    C = build(name)
    rep = validate_cube_complex(C)
    assert rep.valid and rep.median_violations == 0
    if C.n <= 30:
        assert oracles.is_median_graph(C)


def test_square_valid():
    rep = validate_cube_complex(build("C_square"))
    assert rep.valid and rep.median_mode == "exhaustive" and rep.triples_checked == 4


def test_five_cycle_not_median_with_witness():
    with pytest.raises(NotMedian) as err:
        validate_cube_complex(cycle(5))
    x, y, z, count = err.value.witness
    assert count != 1
    assert len({x, y, z}) == 3


@pytest.mark.parametrize("G,why", [
    (CubeComplex(5, [(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)]), "K_{2,3}"),
    (cycle(6), "six-cycle"),
])
def test_bipartite_non_median_rejected(G, why):
    rep = validate_cube_complex(G, raise_on_failure=False)
    assert not rep.valid, why
    assert oracles.is_median_graph(G) is False


def test_sampled_mode_beyond_cap():
    C = grid(3, 3)
    rep = validate_cube_complex(C, cap=5, samples=500, seed=1)
    assert rep.median_mode == "sampled" and rep.triples_checked == 500 and rep.valid


def test_disconnected_and_malformed():
    rep = validate_cube_complex(CubeComplex(3, [(0, 1)]), raise_on_failure=False)
    assert not rep.connected and not rep.valid
    with pytest.raises(DisconnectedPair):
        CubeComplex(3, [(0, 1)]).table
    with pytest.raises(MalformedInput):
        CubeComplex(2, [(0, 0)])
    with pytest.raises(MalformedInput):
        CubeComplex(2, [(0, 1), (1, 0)])
    with pytest.raises(MalformedInput):
        CubeComplex(2, [(0, 2)])


def test_triangle_self_crossing():
    with pytest.raises(SelfCrossing):
        CubeComplex(3, [(0, 1), (1, 2), (0, 2)]).table


@given(median_graphs())
def test_generated_graphs_validate(C):
    assert validate_cube_complex(C).valid


# --------------------------------------------------------------------- median

def test_median_examples():
    S = build("C_square")
    assert median(S, V(S, "0,0"), V(S, "1,0"), V(S, "0,1")) == V(S, "0,0")
    G = build("C_grid(2,2)")
    assert median(G, V(G, "0,0"), V(G, "2,0"), V(G, "1,2")) == V(G, "1,0")


@given(median_graphs(), st.data())
def test_median_matches_brute_force(C, data):
    D = oracles.distances(C)
    x, y, z = (data.draw(st.integers(0, C.n - 1)) for _ in range(3))
    assert [median(C, x, y, z)] == oracles.medians(D, C.n, x, y, z)
    assert median(C, x, x, y) == x


# ------------------------------------------------------------ interval/distance

def test_interval_examples():
    P = build("C_path3")
    assert interval(P, 0, 3) == frozenset(range(4)) and distance(P, 0, 3) == 3
    S = build("C_square")
    assert interval(S, V(S, "0,0"), V(S, "1,1")) == frozenset(range(4))
    G = build("C_grid(2,2)")
    assert len(interval(G, V(G, "0,0"), V(G, "2,1"))) == 6


@given(median_graphs(), st.data())
def test_interval_and_distance_match_bfs(C, data):
    D = oracles.distances(C)
    x = data.draw(st.integers(0, C.n - 1))
    y = data.draw(st.integers(0, C.n - 1))
    assert distance(C, x, y) == D[x][y]
    assert interval(C, x, y) == frozenset(oracles.interval(D, C.n, x, y))


# ----------------------------------------------------------------- hyperplanes

@pytest.mark.parametrize("name,count", [
    ("C_square", 2), ("C_path3", 3), ("C_tripod", 3), ("C_grid(2,2)", 4), ("C_cube3", 3),
    ("C_edge", 1), ("C_grid(3,3)", 6), ("C_dumbbell", 5),
])
def test_hyperplane_counts_match_djokovic_oracle(name, count):
    C = build(name)
    assert C.table.count == count == len(oracles.theta_classes(C))


@pytest.mark.parametrize("name", ACCEPTANCE_FIXTURES)
def test_hyperplane_partition_matches_djokovic(name):
    C = build(name)
    ours = {frozenset(hp.edges) for hp in hyperplanes(C)}
    assert ours == oracles.theta_classes(C)


def test_hyperplane_example_shapes():
    S = build("C_square")
    assert [len(hp.edges) for hp in hyperplanes(S)] == [2, 2]
    P = build("C_path3")
    assert [len(hp.edges) for hp in hyperplanes(P)] == [1, 1, 1]
    G = build("C_grid(2,2)")
    assert sorted(len(hp.edges) for hp in hyperplanes(G)) == [3, 3, 3, 3]


@given(median_graphs())
def test_hyperplane_invariants(C):
    T = C.table
    assert {frozenset(hp.edges) for hp in hyperplanes(C)} == oracles.theta_classes(C)
    seen = set()
    for hp in hyperplanes(C):
        # dual edges form a perfect matching between H^- and H^+
        minus = [a if not T.side[hp.id, a] else b for a, b in hp.edges]
        plus = [b if not T.side[hp.id, a] else a for a, b in hp.edges]
        assert sorted(minus) == sorted(hp.side_minus.vertices)
        assert sorted(plus) == sorted(hp.side_plus.vertices)
        assert not (seen & set(hp.edges))
        seen |= set(hp.edges)
        near_a, near_b = oracles.halfspaces(C, hp.edges)
        side = frozenset(np.nonzero(T.side[hp.id])[0].tolist())
        assert side in (near_a, near_b)
    assert seen == set(C.edges)


def test_separates_examples():
    E = build("C_edge")
    assert separates(E, 0, 0, 1)
    assert not separates(E, 0, 1, 1)
    G = build("C_grid(2,2)")
    v1 = hp_between(G, "0,0", "1,0")
    assert separates(G, v1, V(G, "0,2"), V(G, "2,0"))


@given(median_graphs(), st.data())
def test_separation_counts_distance(C, data):
    x = data.draw(st.integers(0, C.n - 1))
    y = data.draw(st.integers(0, C.n - 1))
    assert sum(separates(C, h, x, y) for h in range(C.table.count)) == distance(C, x, y)


# ------------------------------------------------------------------ convexity

def test_convexity_examples():
    G = build("C_grid(2,2)")
    assert convex_hull(G, [4]).vertices == frozenset([4])
    ball = [V(G, s) for s in ("1,1", "0,1", "2,1", "1,0", "1,2")]
    assert not is_convex(G, ball)
    assert convex_hull(G, ball).vertices == frozenset(range(9))
    assert convex_hull(G, [0, 1]).vertices == frozenset([0, 1])
    with pytest.raises(EmptyInput):
        convex_hull(G, [])


@given(complex_and_subset())
def test_hull_matches_oracles(CS):
    C, S = CS
    H = convex_hull(C, S)
    assert H.vertices == oracles.hull(C, S) == halfspace_hull(C, S)
    assert S <= H.vertices and is_convex(C, H.vertices)
    assert convex_hull(C, H.vertices).vertices == H.vertices
    assert is_convex(C, S) == oracles.is_convex(C, S)


# ----------------------------------------------------------------------- gates

def test_gate_examples():
    P = build("C_path3")
    K = subcomplex(P, [0, 1])
    assert gate(P, K, 3) == 1 and gate(P, K, 0) == 0
    G = build("C_grid(2,2)")
    col0 = subcomplex(G, [V(G, f"0,{y}") for y in range(3)])
    assert gate(G, col0, V(G, "2,1")) == V(G, "0,1")
    with pytest.raises(NotConvex):
        gate(G, subcomplex(G, [0, 8]), 4)


@given(complex_and_subset(), st.data())
def test_gate_is_unique_nearest_and_separates(CS, data):
    C, S = CS
    K = convex_hull(C, S)
    x = data.draw(st.integers(0, C.n - 1))
    near = oracles.nearest(C, K.vertices, x)
    assert near == [gate(C, K, x)]
    g = near[0]
    for h in range(C.table.count):
        from_all = all(separates(C, h, x, k) for k in K.vertices)
        assert separates(C, h, x, g) == from_all


@given(complex_and_subset(), st.data())
def test_monotone_gates(CS, data):
    C, S = CS
    A = convex_hull(C, S)
    extra = data.draw(st.sets(st.integers(0, C.n - 1), max_size=3))
    B = convex_hull(C, S | extra)
    gA, gB = gate_map(C, A), gate_map(C, B)
    x = data.draw(st.integers(0, C.n - 1))
    y = data.draw(st.integers(0, C.n - 1))
    for h in range(C.table.count):
        if separates(C, h, int(gA[x]), int(gA[y])):
            assert separates(C, h, int(gB[x]), int(gB[y]))


def test_gate_image_examples():
    G = build("C_grid(2,2)")
    col = [subcomplex(G, [V(G, f"{x},{y}") for y in range(3)]) for x in range(3)]
    assert gate_image(G, col[0], col[2]).vertices == col[0].vertices
    D = build("C_dumbbell")
    left = subcomplex(D, [V(D, "0,0"), V(D, "0,1")])
    right = subcomplex(D, [V(D, "3,0"), V(D, "3,1")])
    img = gate_image(D, left, right)
    assert len(img.vertices) == 1 and img.vertices <= left.vertices


@given(complex_and_subset(), st.data())
def test_gate_image_crossing_and_intersection(CS, data):
    C, S = CS
    K = convex_hull(C, S)
    S2 = data.draw(st.sets(st.integers(0, C.n - 1), min_size=1, max_size=3))
    K2 = convex_hull(C, S2)
    img = gate_image(C, K, K2)
    assert crossing_set(C, img) == crossing_set(C, K) & crossing_set(C, K2)
    if K.vertices & K2.vertices:
        assert img.vertices == K.vertices & K2.vertices


# ------------------------------------------------------------------ crossing set

def test_crossing_set_examples():
    G = build("C_grid(2,2)")
    assert crossing_set(G, [0]) == frozenset()
    assert crossing_set(G, range(9)) == frozenset(range(4))
    K = convex_hull(G, [V(G, "0,0"), V(G, "1,1")])
    assert crossing_set(G, K) == {hp_between(G, "0,0", "1,0"), hp_between(G, "0,0", "0,1")}


@given(complex_and_subset())
def test_crossing_set_matches_oracle(CS):
    C, S = CS
    ours = {frozenset(C.table.class_edges[h]) for h in crossing_set(C, S)}
    assert ours == oracles.crossing_classes(C, S)


def test_exhaustive_gate_characterization_on_grid():
    G = build("C_grid(3,3)")
    for S in itertools.combinations(range(G.n), 2):
        K = convex_hull(G, S)
        g = gate_map(G, K)
        for x in range(G.n):
            assert [int(g[x])] == oracles.nearest(G, K.vertices, x)
