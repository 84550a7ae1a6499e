"""Contact and crossing graphs, geodesic enumeration, bottleneck δ, leaf collapses."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import kernels
from .errors import CapExceeded, NoLeafHyperplane
from .median import Convexity, CubeComplex, Subcomplex, crossing_set, is_convex

DEFAULT_GEODESIC_CAP = 10_000


class SmallGraph:
    """Simple undirected graph on sortable node keys with cached distances."""

    def __init__(self, nodes, edges):
        self.nodes = tuple(sorted(set(nodes)))
        self.index = {v: i for i, v in enumerate(self.nodes)}
        adj = [set() for _ in self.nodes]
        for a, b in edges:
            i, j = self.index[a], self.index[b]
            if i != j:
                adj[i].add(j)
                adj[j].add(i)
        self.adj = tuple(tuple(sorted(a)) for a in adj)

    def __len__(self):
        return len(self.nodes)

    @cached_property
    def edges(self) -> tuple:
        return tuple((self.nodes[i], self.nodes[j]) for i in range(len(self.nodes))
                     for j in self.adj[i] if i < j)

    @cached_property
    def dist(self) -> np.ndarray:
        if not self.nodes:
            return np.zeros((0, 0), dtype=np.int32)
        return kernels.all_pairs_distances(len(self.nodes), self.adj)

    @cached_property
    def csr(self):
        return kernels.csr(len(self.nodes), self.adj)

    def neighbors(self, v):
        return tuple(self.nodes[j] for j in self.adj[self.index[v]])

    def has_edge(self, a, b) -> bool:
        return self.index[b] in self.adj[self.index[a]]

    def connected(self) -> bool:
        return len(self.nodes) <= 1 or bool((self.dist >= 0).all())

    def diameter(self) -> int:
        return int(self.dist.max()) if len(self.nodes) else 0

    def _idx(self, S):
        return np.fromiter((self.index[v] for v in S), dtype=np.int64)

    def set_distance(self, A, B) -> float:
        """min distance between node sets; an empty side gives 0 (nothing to compare)."""
        if not A or not B:
            return 0
        d = self.dist[np.ix_(self._idx(A), self._idx(B))]
        if (d < 0).any():
            d = np.where(d < 0, np.iinfo(np.int32).max, d)
        return int(d.min())

    def set_diameter(self, A) -> int:
        if not A:
            return 0
        idx = self._idx(A)
        d = self.dist[np.ix_(idx, idx)]
        return int(d.max()) if (d >= 0).all() else np.iinfo(np.int32).max

    def is_clique(self, A) -> bool:
        return self.set_diameter(A) <= 1

    def to_dot(self, name="G", label=str) -> str:
        lines = [f"graph {_dot_id(name)} {{"]
        for v in self.nodes:
            lines.append(f"  {_dot_id(label(v))};")
        for a, b in self.edges:
            lines.append(f"  {_dot_id(label(a))} -- {_dot_id(label(b))};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def _dot_id(s):
    s = str(s).replace('"', '\\"')
    return f'"{s}"'


@dataclass
class IntersectionGraph:
    kind: str
    graph: SmallGraph

    @property
    def nodes(self):
        return self.graph.nodes

    @property
    def edges(self):
        return self.graph.edges

    def to_dot(self) -> str:
        return self.graph.to_dot(self.kind, label=lambda h: f"H{h}")


def _relation_graph(C: CubeComplex, matrix, kind):
    nh = C.table.count
    ii, jj = np.nonzero(np.triu(matrix, 1))
    return IntersectionGraph(kind, SmallGraph(range(nh), zip(ii.tolist(), jj.tolist())))


def contact_graph(C: CubeComplex) -> IntersectionGraph:
    return _relation_graph(C, C.table.contact, "contact")


def crossing_graph(C: CubeComplex) -> IntersectionGraph:
    return _relation_graph(C, C.table.cross, "crossing")


# ---------------------------------------------------------------- geodesics

def _count_paths(G: SmallGraph, s: int, t: int):
    D = G.dist
    d = D[s, t]
    if d < 0:
        return 0
    layers = [[] for _ in range(d + 1)]
    for i in range(len(G.nodes)):
        if D[s, i] >= 0 and D[s, i] + D[i, t] == d:
            layers[D[s, i]].append(i)
    ways = {s: 1}
    for k in range(1, d + 1):
        for i in layers[k]:
            ways[i] = sum(ways.get(j, 0) for j in G.adj[i] if D[s, j] == k - 1)
    return ways.get(t, 0)


def _walk(G: SmallGraph, s: int, t: int, limit: int):
    D = G.dist
    out = []
    path = [s]

    def rec(u):
        if len(out) >= limit:
            return
        if u == t:
            out.append(tuple(G.nodes[i] for i in path))
            return
        for w in G.adj[u]:
            if D[s, w] == D[s, u] + 1 and D[w, t] == D[u, t] - 1:
                path.append(w)
                rec(w)
                path.pop()

    rec(s)
    return out


def graph_geodesics(G: SmallGraph, u, v, cap: int = DEFAULT_GEODESIC_CAP):
    """All geodesics from u to v in ascending-node order, with their count.

    Raises CapExceeded (carrying the count and the first ``cap`` paths) when
    there are more than ``cap`` of them.
    """
    s, t = G.index[u], G.index[v]
    count = _count_paths(G, s, t)
    paths = _walk(G, s, t, min(count, cap))
    if count > cap:
        raise CapExceeded(f"{count} geodesics exceed cap {cap}", count=count, best=paths)
    return paths, count


def set_geodesics(G: SmallGraph, A, B, cap: int = DEFAULT_GEODESIC_CAP):
    """Geodesics realising the distance between node sets A and B."""
    d = G.set_distance(A, B)
    out, total = [], 0
    for a in sorted(A):
        for b in sorted(B):
            if G.dist[G.index[a], G.index[b]] != d:
                continue
            s, t = G.index[a], G.index[b]
            count = _count_paths(G, s, t)
            total += count
            out.extend(_walk(G, s, t, max(0, min(count, cap - len(out)))))
    if total > cap:
        raise CapExceeded(f"{total} geodesics exceed cap {cap}", count=total, best=out)
    return out, total


# --------------------------------------------------------------- bottleneck

@dataclass
class BottleneckReport:
    delta: float
    tree_qi: tuple
    connected: bool
    witness: tuple | None = None
    pairs: int = 0

    def to_dict(self):
        return {"delta": self.delta, "tree_qi": list(self.tree_qi),
                "connected": self.connected,
                "witness": list(self.witness) if self.witness else None,
                "pairs": self.pairs}


def bottleneck_delta(G: SmallGraph) -> BottleneckReport:
    """Least δ such that every pair x, y has a near-midpoint m on a geodesic
    with every x–y path meeting the closed ball B(m, δ).

    Vertex balls of half-integer radius separate exactly like the integer
    radius below them, so the answer is an integer.
    """
    n = len(G.nodes)
    if n <= 1:
        return BottleneckReport(0.0, (0.0, 0.0), True, None, 0)
    D = G.dist.astype(np.int64)
    if (D < 0).any():
        return BottleneckReport(float("inf"), (float("inf"),) * 2, False, None, 0)
    indptr, indices = G.csr
    big = np.iinfo(np.int64).max
    best = np.full((n, n), big, dtype=np.int64)
    for m in range(n):
        cand = (D[:, [m]] + D[[m], :] == D) & (np.abs(2 * D[:, [m]] - D) <= 1)
        if not cand.any():
            continue
        first = np.full((n, n), big, dtype=np.int64)
        for k in range(int(D[m].max()) + 1):
            ball = D[m] <= k
            labels = kernels.components_without(n, indptr, indices, ball)
            meet = ball[:, None] | ball[None, :] | (labels[:, None] != labels[None, :])
            first = np.where((first == big) & meet, k, first)
        best = np.minimum(best, np.where(cand, first, big))
    iu = np.triu_indices(n, 1)
    vals = best[iu]
    worst = int(np.argmax(vals))
    delta = float(vals[worst])
    witness = (G.nodes[iu[0][worst]], G.nodes[iu[1][worst]])
    return BottleneckReport(delta, (26 * delta, 16 * delta), True, witness, len(vals))


# ------------------------------------------------------------ contractibility

@dataclass
class CollapseCertificate:
    steps: list = field(default_factory=list)  # (hyperplane id, remaining Subcomplex)
    final_edge: tuple = ()

    def to_dict(self):
        return {"steps": [{"leaf": h, "remaining": list(Y.key)} for h, Y in self.steps],
                "final_edge": list(self.final_edge)}


def collapse_contractibility(C: CubeComplex) -> CollapseCertificate:
    """Strip leaf hyperplanes (one halfspace is exactly one side of the
    carrier) until a single edge remains."""
    T = C.table
    E = C.edge_array
    if len(E) == 0:
        raise NoLeafHyperplane("complex has no edges")
    Y = np.ones(C.n, dtype=bool)
    cert = CollapseCertificate()
    while True:
        hs = sorted(crossing_set(C, np.nonzero(Y)[0].tolist()))
        if len(hs) == 1:
            inside = Y[E[:, 0]] & Y[E[:, 1]]
            cert.final_edge = tuple(int(t) for t in E[inside][0])
            return cert
        found = None
        for h in hs:
            dual = (T.edge_class == h) & Y[E[:, 0]] & Y[E[:, 1]]
            ends = np.zeros(C.n, dtype=bool)
            ends[E[dual].ravel()] = True
            for plus in (False, True):
                half = Y & (T.side[h] == plus)
                if np.array_equal(half, ends & half):
                    found = (h, Y & (T.side[h] != plus))
                    break
            if found:
                break
        if found is None:
            raise NoLeafHyperplane(f"no leaf hyperplane among {hs}")
        h, rest = found
        verts = frozenset(np.nonzero(rest)[0].tolist())
        state = Convexity.CONVEX if is_convex(C, verts) else Convexity.NONCONVEX
        cert.steps.append((h, Subcomplex(verts, state, C.name)))
        Y = rest
