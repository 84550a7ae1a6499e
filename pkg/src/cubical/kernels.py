"""Hot loops: compiled extension when available, numpy fallback otherwise.

Set CUBICAL_PURE=1 to force the fallback.
"""

import os

import numpy as np

from . import _pykernels

BACKEND = "python"
_impl = _pykernels
if os.environ.get("CUBICAL_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels


def use_backend(name):
    """Switch backend at runtime ("cython" or "python"); used by the benchmark."""
    global _impl, BACKEND
    if name == "python":
        _impl, BACKEND = _pykernels, "python"
    elif name == "cython":
        from . import _kernels

        _impl, BACKEND = _kernels, "cython"
    else:
        raise ValueError(name)


def csr(n, adjacency):
    indptr = np.zeros(n + 1, dtype=np.int32)
    for v in range(n):
        indptr[v + 1] = indptr[v] + len(adjacency[v])
    indices = np.fromiter((w for v in range(n) for w in adjacency[v]), dtype=np.int32,
                          count=int(indptr[-1]))
    return indptr, indices


def all_pairs_distances(n, adjacency):
    indptr, indices = csr(n, adjacency)
    return _impl.bfs_all_pairs(n, indptr, indices)


def median_scan(D):
    return _impl.median_scan(np.ascontiguousarray(D, dtype=np.int32))


def median_scan_triples(D, triples):
    return _impl.median_scan_triples(np.ascontiguousarray(D, dtype=np.int32),
                                     np.ascontiguousarray(triples, dtype=np.int64))


def interval_closure(D, seeds):
    return _impl.interval_closure(np.ascontiguousarray(D, dtype=np.int32),
                                  [int(s) for s in seeds])


def components_without(n, indptr, indices, removed):
    return _impl.components_without(n, indptr, indices, np.asarray(removed, dtype=bool))
