"""Pure-Python/numpy versions of the compiled kernels (same signatures)."""

import numpy as np


def bfs_all_pairs(n, indptr, indices):
    D = np.full((n, n), -1, dtype=np.int32)
    for s in range(n):
        D[s, s] = 0
        frontier = [s]
        depth = 0
        while frontier:
            depth += 1
            nxt = []
            for u in frontier:
                for v in indices[indptr[u]:indptr[u + 1]]:
                    if D[s, v] < 0:
                        D[s, v] = depth
                        nxt.append(int(v))
            frontier = nxt
    return D


def _median_counts(D, x, y):
    # counts[z] = number of medians of (x, y, z), vectorised over z
    ixy = D[x] + D[y] == D[x, y]
    m2 = (D[y][None, :] + D) == D[y][:, None]
    m3 = (D[x][None, :] + D) == D[x][:, None]
    return (m2 & m3 & ixy[None, :]).sum(axis=1)


def median_scan(D):
    n = D.shape[0]
    bad = 0
    witness = None
    for x in range(n):
        for y in range(x + 1, n):
            counts = _median_counts(D, x, y)
            zs = np.nonzero(counts[y + 1:] != 1)[0] + y + 1
            if len(zs):
                if witness is None:
                    z = int(zs[0])
                    witness = (x, y, z, int(min(counts[z], 2)))
                bad += len(zs)
    return bad, witness


def median_scan_triples(D, triples):
    bad = 0
    witness = None
    for x, y, z in np.asarray(triples):
        ixy = D[x] + D[y] == D[x, y]
        iyz = D[y] + D[z] == D[y, z]
        ixz = D[x] + D[z] == D[x, z]
        c = int((ixy & iyz & ixz).sum())
        if c != 1:
            if witness is None:
                witness = (int(x), int(y), int(z), min(c, 2))
            bad += 1
    return bad, witness


def interval_closure(D, seeds):
    n = D.shape[0]
    mask = np.zeros(n, dtype=bool)
    order = []
    for s in seeds:
        if not mask[s]:
            mask[s] = True
            order.append(int(s))
    p = 0
    while p < len(order):
        a = order[p]
        if p:
            prev = np.asarray(order[:p])
            hit = ((D[a][None, :] + D[prev]) == D[a, prev][:, None]).any(axis=0) & ~mask
            new = np.nonzero(hit)[0]
            mask[new] = True
            order.extend(int(v) for v in new)
        p += 1
    return mask


def components_without(n, indptr, indices, removed):
    removed = np.asarray(removed, dtype=bool)
    labels = np.full(n, -1, dtype=np.int32)
    comp = 0
    for s in range(n):
        if removed[s] or labels[s] >= 0:
            continue
        labels[s] = comp
        stack = [s]
        while stack:
            u = stack.pop()
            for v in indices[indptr[u]:indptr[u + 1]]:
                if not removed[v] and labels[v] < 0:
                    labels[v] = comp
                    stack.append(int(v))
        comp += 1
    return labels
