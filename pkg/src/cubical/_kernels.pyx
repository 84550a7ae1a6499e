# cython: boundscheck=False, wraparound=False, cdivision=True
import numpy as np
cimport numpy as cnp

cnp.import_array()


def bfs_all_pairs(int n, const int[:] indptr, const int[:] indices):
    out = np.full((n, n), -1, dtype=np.int32)
    cdef int[:, :] D = out
    cdef int[:] queue = np.empty(max(n, 1), dtype=np.int32)
    cdef int s, head, tail, u, v, k, du
    for s in range(n):
        D[s, s] = 0
        queue[0] = s
        head = 0
        tail = 1
        while head < tail:
            u = queue[head]
            head += 1
            du = D[s, u]
            for k in range(indptr[u], indptr[u + 1]):
                v = indices[k]
                if D[s, v] < 0:
                    D[s, v] = du + 1
                    queue[tail] = v
                    tail += 1
    return out


cdef inline int _count_medians(const int[:, :] D, int n, int x, int y, int z) noexcept nogil:
    cdef int m, c = 0
    cdef int dxy = D[x, y], dyz = D[y, z], dxz = D[x, z]
    for m in range(n):
        if (D[x, m] + D[m, y] == dxy and D[y, m] + D[m, z] == dyz
                and D[x, m] + D[m, z] == dxz):
            c += 1
            if c > 1:
                return c
    return c


def median_scan(const int[:, :] D):
    """Scan all triples x<y<z; return (violations, first witness or None)."""
    cdef int n = D.shape[0]
    cdef int x, y, z, c
    cdef long bad = 0
    witness = None
    for x in range(n):
        for y in range(x + 1, n):
            for z in range(y + 1, n):
                c = _count_medians(D, n, x, y, z)
                if c != 1:
                    if bad == 0:
                        witness = (x, y, z, c)
                    bad += 1
    return bad, witness


def median_scan_triples(const int[:, :] D, const long[:, :] triples):
    cdef int n = D.shape[0]
    cdef Py_ssize_t i
    cdef int c
    cdef long bad = 0
    witness = None
    for i in range(triples.shape[0]):
        c = _count_medians(D, n, <int>triples[i, 0], <int>triples[i, 1], <int>triples[i, 2])
        if c != 1:
            if bad == 0:
                witness = (int(triples[i, 0]), int(triples[i, 1]), int(triples[i, 2]), c)
            bad += 1
    return bad, witness


def interval_closure(const int[:, :] D, seeds):
    """Close a vertex set under geodesic intervals; returns a boolean mask."""
    cdef int n = D.shape[0]
    mask_arr = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[:] mask = mask_arr
    order_arr = np.empty(n, dtype=np.int32)
    cdef int[:] order = order_arr
    cdef int size = 0, p = 0, q, a, b, v, dab
    for s in seeds:
        v = s
        if not mask[v]:
            mask[v] = 1
            order[size] = v
            size += 1
    while p < size:
        a = order[p]
        for q in range(p):
            b = order[q]
            dab = D[a, b]
            for v in range(n):
                if not mask[v] and D[a, v] + D[v, b] == dab:
                    mask[v] = 1
                    order[size] = v
                    size += 1
        p += 1
    return mask_arr.astype(bool)


def components_without(int n, const int[:] indptr, const int[:] indices, removed):
    """Component labels of the graph minus a vertex mask; removed vertices get -1."""
    cdef const unsigned char[:] rem = np.ascontiguousarray(removed, dtype=np.uint8)
    labels_arr = np.full(n, -1, dtype=np.int32)
    cdef int[:] labels = labels_arr
    cdef int[:] queue = np.empty(max(n, 1), dtype=np.int32)
    cdef int s, head, tail, u, v, k, comp = 0
    for s in range(n):
        if rem[s] or labels[s] >= 0:
            continue
        labels[s] = comp
        queue[0] = s
        head = 0
        tail = 1
        while head < tail:
            u = queue[head]
            head += 1
            for k in range(indptr[u], indptr[u + 1]):
                v = indices[k]
                if not rem[v] and labels[v] < 0:
                    labels[v] = comp
                    queue[tail] = v
                    tail += 1
        comp += 1
    return labels_arr
