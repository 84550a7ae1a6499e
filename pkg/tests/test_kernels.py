import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from strategies import median_graphs
from cubical import kernels


def _both(fn):
    out = {}
    for name in ("python", "cython"):
        kernels.use_backend(name)
        try:
            out[name] = fn()
        finally:
            kernels.use_backend("cython")
    return out["python"], out["cython"]


def _same(a, b):
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
        return np.array_equal(np.asarray(a), np.asarray(b))
    if isinstance(a, (tuple, list)):
        return len(a) == len(b) and all(_same(x, y) for x, y in zip(a, b))
    return a == b


def test_compiled_backend_loaded():
    assert kernels.BACKEND == "cython"
    with pytest.raises(ValueError):
        kernels.use_backend("fortran")


@given(median_graphs())
def test_distances_agree_with_bfs(C):
    py, cy = _both(lambda: kernels.all_pairs_distances(C.n, C.adjacency))
    assert _same(py, cy)
    D = oracles.distances(C)
    assert all(int(cy[u][v]) == D[u][v] for u in range(C.n) for v in range(C.n))


@given(median_graphs())
def test_median_scan_agrees(C):
    D = kernels.all_pairs_distances(C.n, C.adjacency)
    assert _same(*_both(lambda: kernels.median_scan(D)))


@given(median_graphs(), st.data())
def test_median_scan_triples_agree(C, data):
    D = kernels.all_pairs_distances(C.n, C.adjacency)
    tri = np.array(data.draw(st.lists(st.tuples(*[st.integers(0, C.n - 1)] * 3),
                                      min_size=1, max_size=20)), dtype=np.int64)
    assert _same(*_both(lambda: kernels.median_scan_triples(D, tri)))


@given(median_graphs(), st.data())
def test_interval_closure_agrees_with_hull(C, data):
    D = kernels.all_pairs_distances(C.n, C.adjacency)
    seeds = data.draw(st.sets(st.integers(0, C.n - 1), min_size=1, max_size=4))
    py, cy = _both(lambda: kernels.interval_closure(D, sorted(seeds)))
    assert _same(py, cy)
    got = np.asarray(cy)
    verts = set(np.nonzero(got)[0].tolist()) if got.dtype == bool else set(got.tolist())
    assert verts == oracles.hull(C, seeds)


@given(median_graphs(), st.data())
def test_components_without_agree(C, data):
    indptr, indices = kernels.csr(C.n, C.adjacency)
    removed = np.array(data.draw(st.lists(st.booleans(), min_size=C.n, max_size=C.n)))
    assert _same(*_both(lambda: kernels.components_without(C.n, indptr, indices, removed)))
