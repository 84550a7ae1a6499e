import functools
import itertools

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from conftest import build, factor_system
from cubical.errors import BadIndex, Inconsistent
from cubical.hierarchy import (ProjectionTuple, bgi_sweep, check_bgi_hyperplane,
                               check_geodesic_near_gate, check_large_links, consistency_check,
                               distance_formula_rhs, fit_distance_constants, hierarchy_path,
                               length_comparison, perturbed_tuples, realize, sample_geodesics,
                               tuple_of, verify_hierarchy_path)

SMALL = ["C_edge", "C_square", "C_path3", "C_tripod", "C_cube3", "C_grid(2,2)", "C_dumbbell"]


def V(C, label):
    return C.vertex_of(label)


# ------------------------------------------------------------------ oracles

@functools.lru_cache(maxsize=None)
def fcg_nx(name, i):
    G = factor_system(name).fcg(i).graph
    H = nx.Graph()
    H.add_nodes_from(G.nodes)
    H.add_edges_from(G.edges)
    return dict(nx.all_pairs_shortest_path_length(H))


def oracle_projection(name, i, x):
    """Hyperplanes crossing member i whose carrier holds the nearest point to x."""
    FS = factor_system(name)
    C = FS.C
    g = oracles.nearest(C, FS.members[i].vertices, x)[0]
    return frozenset(h for h in FS.crossing[i]
                     if any(g in e for e in C.table.class_edges[h]))


def oracle_set_distance(name, i, A, B):
    D = fcg_nx(name, i)
    return min(D[("H", a)][("H", b)] for a in A for b in B)


def oracle_terms(name, x, y):
    FS = factor_system(name)
    out = {}
    for k, c in enumerate(FS.classes):
        if not c.crossing:
            continue
        out[k] = oracle_set_distance(name, c.rep, oracle_projection(name, c.rep, x),
                                     oracle_projection(name, c.rep, y))
    return out


# ---------------------------------------------------------------- hierarchy paths

@pytest.mark.parametrize("name", SMALL + ["C_grid(3,3)"])
def test_hierarchy_paths_are_geodesics(name):
    FS = factor_system(name)
    C = FS.C
    D = oracles.distances(C)
    for x, y in itertools.product(range(C.n), repeat=2):
        hp = hierarchy_path(FS, x, y)
        assert hp.path[0] == x and hp.path[-1] == y
        assert len(hp.path) - 1 == D[x][y]
        assert all(D[a][b] == 1 for a, b in zip(hp.path, hp.path[1:]))
        assert verify_hierarchy_path(FS, hp).passed
        assert length_comparison(FS, hp).passed


def test_grid_corner_path():
    FS = factor_system("C_grid(2,2)")
    C = FS.C
    hp = hierarchy_path(FS, V(C, "0,0"), V(C, "2,2"))
    assert len(hp.path) == 5
    assert len(hp.geodesic) - 1 == oracle_set_distance(
        "C_grid(2,2)", FS.top, oracle_projection("C_grid(2,2)", FS.top, V(C, "0,0")),
        oracle_projection("C_grid(2,2)", FS.top, V(C, "2,2")))
    assert hp.to_dict(C)["path"]


def test_corrupted_path_is_rejected():
    FS = factor_system("C_grid(2,2)")
    C = FS.C
    hp = hierarchy_path(FS, V(C, "0,0"), V(C, "2,2"))
    hp.path = hp.path[:2] + hp.path[:1] + hp.path[1:]
    assert not verify_hierarchy_path(FS, hp).passed


# ---------------------------------------------------------------- distance formula

@pytest.mark.parametrize("name", SMALL)
def test_terms_match_oracle(name):
    FS = factor_system(name)
    C = FS.C
    for x, y in itertools.combinations(range(C.n), 2):
        want = oracle_terms(name, x, y)
        for s in (1, 2):
            total, table = distance_formula_rhs(FS, x, y, s)
            kept = {k: t for k, t in want.items() if t >= s and t > 0}
            assert table == kept and total == sum(kept.values())


def test_grid_corner_rhs():
    FS = factor_system("C_grid(2,2)")
    C = FS.C
    total, table = distance_formula_rhs(FS, V(C, "0,0"), V(C, "2,2"), 1)
    assert total == sum(oracle_terms("C_grid(2,2)", V(C, "0,0"), V(C, "2,2")).values())
    assert sorted(table.values()) == [1, 1, 1]


def oracle_fit(name, s):
    """Least K + C (ties: smaller K) with rhs/K - C <= d <= K*rhs + C, K on a 1/8 grid."""
    FS = factor_system(name)
    C = FS.C
    D = oracles.distances(C)
    rows = []
    for x, y in itertools.combinations(range(C.n), 2):
        terms = oracle_terms(name, x, y)
        rows.append((D[x][y], sum(t for t in terms.values() if t >= s)))
    top = max(1, max(d for d, _ in rows))
    best = None
    for step in range(0, int(8 * (top - 1)) + 1):
        K = 1 + step / 8
        c = 0
        while not all(r / K - c <= d <= K * r + c for d, r in rows):
            c += 1
        if best is None or K + c < sum(best):
            best = (K, c)
    return best


@pytest.mark.parametrize("name", SMALL)
@pytest.mark.parametrize("s", [1, 2, 14])
def test_fit_matches_oracle(name, s):
    fit = fit_distance_constants(factor_system(name), s)
    assert (fit.K, fit.C) == oracle_fit(name, s)


def test_fit_pins():
    G = fit_distance_constants(factor_system("C_grid(2,2)"), 1)
    assert G.K <= 2 and G.C <= 2
    E = fit_distance_constants(factor_system("C_edge"), 1)
    assert E.K == 1 and E.C <= 1
    FS = factor_system("C_grid(2,2)")
    huge = fit_distance_constants(FS, 10 ** 6)
    assert huge.C == max(max(r.values()) for r in oracles.distances(FS.C).values())


@pytest.mark.parametrize("name", ["C_grid(2,2)", "C_dumbbell", "C_cube3"])
def test_fit_c_monotone_in_threshold(name):
    FS = factor_system(name)
    cs = [fit_distance_constants(FS, s).C for s in range(1, 8)]
    assert all(fit_distance_constants(FS, s).K + c >= 1 for s, c in zip(range(1, 8), cs))
    # a larger threshold discards terms, so the additive slack cannot shrink at K = 1
    lows = []
    D = oracles.distances(FS.C)
    for s in range(1, 8):
        worst = 0
        for x, y in itertools.combinations(range(FS.C.n), 2):
            worst = max(worst, D[x][y] - distance_formula_rhs(FS, x, y, s)[0])
        lows.append(worst)
    assert lows == sorted(lows)


# ------------------------------------------------------ consistency / realization

def oracle_realize(name, b):
    FS = factor_system(name)
    best, arg = None, []
    for y in range(FS.C.n):
        cost = 0
        for k, c in enumerate(FS.classes):
            if not c.crossing:
                continue
            cost = max(cost, oracle_set_distance(name, c.rep, b[k],
                                                 oracle_projection(name, c.rep, y)))
        if best is None or cost < best:
            best, arg = cost, [y]
        elif cost == best:
            arg.append(y)
    return best, tuple(arg)


@pytest.mark.parametrize("name", SMALL)
def test_tuples_of_vertices_are_consistent_and_realized(name):
    FS = factor_system(name)
    for x in range(FS.C.n):
        b = tuple_of(FS, x)
        assert consistency_check(FS, b).passed
        r = realize(FS, b)
        assert r.theta == 0 and x in r.minimizers
        assert (r.theta, r.minimizers) == oracle_realize(name, b)


@pytest.mark.parametrize("name", ["C_grid(2,2)", "C_dumbbell", "C_cube3"])
def test_perturbed_tuples_realize_within_bound(name):
    FS = factor_system(name)
    kappa = FS.xi + 2
    for b in perturbed_tuples(FS, 30, seed=3):
        r = realize(FS, b)
        assert (r.theta, r.minimizers) == oracle_realize(name, b)
        assert r.theta <= 2 * kappa + 1


def test_inconsistent_tuple_raises():
    """A ladder with a long tail: moving only the top-level coordinate to the tail
    end leaves the long side's coordinate far from where the tail projects."""
    from cubical import bridge_join, grid, tree
    from cubical.factors import minimal_factor_system
    L = grid(6, 1)
    C = bridge_join(L, L.vertex_of("6,0"), tree([]), 0, 6)
    FS = minimal_factor_system(C)
    x = C.vertex_of("L0,0")
    far = max(range(C.n), key=lambda y: oracles.distances(C)[x][y])
    b = tuple_of(FS, x).replace(0, tuple_of(FS, far)[0])
    assert consistency_check(FS, tuple_of(FS, x)).passed
    res = consistency_check(FS, b)
    assert not res.passed and res.witness is not None
    with pytest.raises(Inconsistent):
        realize(FS, b)


def test_bad_index():
    FS = factor_system("C_grid(2,2)")
    with pytest.raises(BadIndex):
        consistency_check(FS, ProjectionTuple((frozenset(),)))


@given(st.sampled_from(SMALL), st.data())
@settings(max_examples=40)
def test_realize_is_left_inverse_on_distinct_tuples(name, data):
    FS = factor_system(name)
    x = data.draw(st.integers(0, FS.C.n - 1))
    r = realize(FS, tuple_of(FS, x))
    assert tuple_of(FS, r.vertex) == tuple_of(FS, x)


# ---------------------------------------------------------- BGI and large links

@pytest.mark.parametrize("name", SMALL + ["C_grid(3,3)"])
def test_bgi_sweep_has_no_violations(name):
    FS = factor_system(name)
    res = bgi_sweep(FS, sample_geodesics(FS.C, 60, seed=1))
    assert res["hyperplane"][2] is None and res["factored"][2] is None
    assert res["hyperplane"][0] == 60 * FS.C.table.count


def test_bgi_hyperplane_pins():
    G = build("C_grid(2,2)")
    path = (V(G, "0,0"), V(G, "1,0"), V(G, "2,0"))
    for h in range(G.table.count):
        assert check_bgi_hyperplane(G, path, h).passed


def test_large_links_vacuous_on_small_complexes():
    FS = factor_system("C_grid(2,2)")
    C = FS.C
    for x, y in itertools.combinations(range(C.n), 2):
        hp = hierarchy_path(FS, x, y)
        for i in range(len(FS)):
            if FS.crossing[i]:
                res = check_large_links(FS, x, y, hp.carriers, i)
                assert res.passed and res.value == "vacuous"
                assert check_geodesic_near_gate(FS, i, x, y, [hp.path]).passed


def test_geodesic_samples_are_geodesics():
    C = build("C_grid(3,3)")
    D = oracles.distances(C)
    for g in sample_geodesics(C, 40, seed=5):
        assert len(g) - 1 == D[g[0]][g[-1]]
        assert all(D[a][b] == 1 for a, b in zip(g, g[1:]))
    assert sample_geodesics(C, 5, seed=2) == sample_geodesics(C, 5, seed=2)
