"""Finite CAT(0) cube complexes stored as median graphs.

Cubes are implicit: everything is computed from the 1-skeleton metric.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import kernels
from .errors import (DisconnectedPair, EmptyInput, MalformedInput, NotConvex,
                     NotMedian, SelfCrossing)

DEFAULT_MEDIAN_CAP = 2000
DEFAULT_TRIPLE_SAMPLES = 200_000


class Convexity(enum.Enum):
    CONVEX = "verified-convex"
    NONCONVEX = "verified-nonconvex"
    UNCHECKED = "unchecked"


@dataclass(frozen=True)
class Subcomplex:
    """A vertex set of a complex; equality and hashing use the vertex set only."""

    vertices: frozenset
    convex: Convexity = field(default=Convexity.UNCHECKED, compare=False)
    parent: str = field(default="", compare=False)

    @cached_property
    def key(self) -> tuple:
        return tuple(sorted(self.vertices))

    @cached_property
    def array(self) -> np.ndarray:
        return np.asarray(self.key, dtype=np.int64)

    def __len__(self):
        return len(self.vertices)

    def __contains__(self, v):
        return v in self.vertices

    def __iter__(self):
        return iter(self.key)

    def __lt__(self, other):
        return self.key < other.key

    def __repr__(self):
        return f"Subcomplex({list(self.key)})"


@dataclass(frozen=True)
class Hyperplane:
    id: int
    edges: tuple
    carrier: Subcomplex
    side_minus: Subcomplex
    side_plus: Subcomplex


class CubeComplex:
    """A finite graph assumed (and checkable) to be a median graph.

    ``labels`` optionally names vertices (grid coordinates, group words);
    ``edge_labels`` optionally maps each edge to a generator name.
    """

    def __init__(self, n, edges, name="", labels=None, edge_labels=None):
        n = int(n)
        if n < 1:
            raise MalformedInput("a complex needs at least one vertex")
        norm = []
        for e in edges:
            a, b = (int(t) for t in e)
            if not (0 <= a < n and 0 <= b < n):
                raise MalformedInput(f"edge {tuple(e)} uses an id outside 0..{n - 1}")
            if a == b:
                raise MalformedInput(f"self-loop at {a}")
            norm.append((min(a, b), max(a, b)))
        norm.sort()
        for i in range(1, len(norm)):
            if norm[i] == norm[i - 1]:
                raise MalformedInput(f"duplicate edge {norm[i]}")
        self.n = n
        self.edges = tuple(norm)
        self.name = name
        self.labels = tuple(labels) if labels is not None else None
        if edge_labels is not None:
            edge_labels = {(min(a, b), max(a, b)): lab for (a, b), lab in edge_labels.items()}
        self.edge_labels = edge_labels
        adj = [[] for _ in range(n)]
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        self.adjacency = tuple(tuple(sorted(x)) for x in adj)

    def __eq__(self, other):
        return (isinstance(other, CubeComplex) and self.n == other.n
                and self.edges == other.edges and self.name == other.name
                and self.labels == other.labels and self.edge_labels == other.edge_labels)

    def __hash__(self):
        return hash((self.n, self.edges))

    def __repr__(self):
        return f"CubeComplex({self.name!r}, {self.n} vertices, {len(self.edges)} edges)"

    def label(self, v):
        return self.labels[v] if self.labels is not None else v

    def vertex_of(self, label):
        if self.labels is None:
            return int(label)
        return self.labels.index(label)

    @cached_property
    def dist(self) -> np.ndarray:
        return kernels.all_pairs_distances(self.n, self.adjacency)

    @cached_property
    def csr(self):
        return kernels.csr(self.n, self.adjacency)

    @cached_property
    def edge_array(self) -> np.ndarray:
        return np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)

    @cached_property
    def whole(self) -> Subcomplex:
        return Subcomplex(frozenset(range(self.n)), Convexity.CONVEX, self.name)

    @cached_property
    def table(self) -> "HyperplaneTable":
        return HyperplaneTable(self)

    def check_vertex(self, v):
        if not (isinstance(v, (int, np.integer)) and 0 <= v < self.n):
            raise MalformedInput(f"no vertex {v!r}")
        return int(v)


class HyperplaneTable:
    """Θ-classes plus dense matrices describing halfspaces, carriers and relations.

    side[h, v] is True when v lies in the plus halfspace of h; the minus
    halfspace is the one containing the smaller endpoint of the class's first edge.
    """

    def __init__(self, C: CubeComplex):
        D = C.dist
        if (D < 0).any():
            raise DisconnectedPair("complex is not connected")
        m = len(C.edges)
        eidx = {e: i for i, e in enumerate(C.edges)}
        parent = list(range(m))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        def union(i, j):
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)

        def eid(a, b):
            return eidx[(a, b) if a < b else (b, a)]

        adjset = [set(a) for a in C.adjacency]
        for u in range(C.n):
            nb = C.adjacency[u]
            for i in range(len(nb)):
                for j in range(i + 1, len(nb)):
                    v, w = nb[i], nb[j]
                    for z in adjset[v] & adjset[w]:
                        if z != u:
                            union(eid(u, v), eid(w, z))
                            union(eid(u, w), eid(v, z))
        roots = {}
        edge_class = np.empty(m, dtype=np.int64)
        for i in range(m):
            r = find(i)
            if r not in roots:
                roots[r] = len(roots)
            edge_class[i] = roots[r]
        nh = len(roots)
        E = C.edge_array
        side = np.zeros((nh, C.n), dtype=bool)
        carrier = np.zeros((C.n, nh), dtype=bool)
        class_edges = [[] for _ in range(nh)]
        for i, h in enumerate(edge_class):
            class_edges[h].append(C.edges[i])
        for h in range(nh):
            a, b = class_edges[h][0]
            plus = D[:, b] < D[:, a]
            if (D[:, a] == D[:, b]).any():
                raise SelfCrossing(f"edge {(a, b)} has equidistant vertices; not bipartite")
            cut = plus[E[:, 0]] != plus[E[:, 1]]
            mine = edge_class == h
            if not np.array_equal(cut, mine):
                bad = int(np.nonzero(cut != mine)[0][0])
                raise SelfCrossing(f"class {h} does not match the cut of edge {(a, b)}; "
                                   f"offending edge {C.edges[bad]}")
            side[h] = plus
            ends = E[mine].ravel()
            carrier[ends, h] = True
        self.complex_name = C.name
        self.count = nh
        self.edge_class = edge_class
        self.class_edges = [tuple(es) for es in class_edges]
        self.side = side
        self.carrier = carrier
        P = side.astype(np.int32)
        M = 1 - P
        quad = [(P @ P.T) > 0, (P @ M.T) > 0, (M @ P.T) > 0, (M @ M.T) > 0]
        cross = quad[0] & quad[1] & quad[2] & quad[3]
        np.fill_diagonal(cross, False)
        self.cross = cross
        A = carrier.astype(np.int32)
        contact = (A.T @ A) > 0
        np.fill_diagonal(contact, False)
        self.contact = contact
        self._name = C.name

    @cached_property
    def hyperplanes(self):
        out = []
        for h in range(self.count):
            carr = frozenset(np.nonzero(self.carrier[:, h])[0].tolist())
            plus = frozenset(v for v in carr if self.side[h, v])
            out.append(Hyperplane(
                h, self.class_edges[h],
                Subcomplex(carr, Convexity.CONVEX, self._name),
                Subcomplex(carr - plus, Convexity.CONVEX, self._name),
                Subcomplex(plus, Convexity.CONVEX, self._name),
            ))
        return out


# ---------------------------------------------------------------- validation

@dataclass
class ValidationReport:
    vertices: int
    edges: int
    connected: bool
    bipartite: bool
    median_mode: str
    triples_checked: int
    median_violations: int
    median_witness: tuple | None
    theta_ok: bool
    theta_detail: str
    hyperplanes: int | None
    valid: bool

    def to_dict(self):
        d = dict(self.__dict__)
        d["median_witness"] = list(self.median_witness) if self.median_witness else None
        return d


def validate_cube_complex(C: CubeComplex, cap: int = DEFAULT_MEDIAN_CAP,
                          samples: int = DEFAULT_TRIPLE_SAMPLES, seed: int = 0,
                          raise_on_failure: bool = True) -> ValidationReport:
    D = C.dist
    connected = bool((D >= 0).all())
    bipartite = connected and all((D[0, a] + D[0, b]) % 2 == 1 for a, b in C.edges)
    mode, checked, bad, witness = "skipped", 0, 0, None
    if connected:
        if C.n <= cap:
            mode = "exhaustive"
            checked = C.n * (C.n - 1) * (C.n - 2) // 6
            bad, witness = kernels.median_scan(D)
        else:
            mode = "sampled"
            rng = np.random.default_rng(seed)
            triples = rng.integers(0, C.n, size=(samples, 3))
            checked = samples
            bad, witness = kernels.median_scan_triples(D, triples)
    theta_ok, detail, nh = False, "skipped", None
    if connected and bipartite:
        try:
            nh = C.table.count
            theta_ok, detail = True, "each class is exactly the cut of its halfspaces"
        except SelfCrossing as exc:
            detail = str(exc)
    report = ValidationReport(C.n, len(C.edges), connected, bipartite, mode, int(checked),
                              int(bad), witness, theta_ok, detail, nh,
                              connected and bipartite and bad == 0 and theta_ok)
    if raise_on_failure and witness is not None:
        raise NotMedian(tuple(int(t) for t in witness), report)
    return report


# ------------------------------------------------------------ point geometry

def distance(C: CubeComplex, x, y) -> int:
    d = int(C.dist[C.check_vertex(x), C.check_vertex(y)])
    if d < 0:
        raise DisconnectedPair(f"{x} and {y} are in different components")
    return d


def interval_mask(C: CubeComplex, x, y) -> np.ndarray:
    D = C.dist
    return D[x] + D[y] == D[x, y]


def interval(C: CubeComplex, x, y) -> frozenset:
    distance(C, x, y)
    return frozenset(np.nonzero(interval_mask(C, x, y))[0].tolist())


def median(C: CubeComplex, x, y, z) -> int:
    for v in (x, y, z):
        C.check_vertex(v)
    mask = interval_mask(C, x, y) & interval_mask(C, y, z) & interval_mask(C, x, z)
    found = np.nonzero(mask)[0]
    if len(found) != 1:
        raise NotMedian((x, y, z, len(found)))
    return int(found[0])


def hyperplanes(C: CubeComplex) -> list:
    return C.table.hyperplanes


def separates(C: CubeComplex, h: int, x, y) -> bool:
    s = C.table.side[h]
    return bool(s[C.check_vertex(x)] != s[C.check_vertex(y)])


# ----------------------------------------------------------------- convexity

def _as_vertices(C, S):
    if isinstance(S, Subcomplex):
        return S.vertices
    verts = frozenset(C.check_vertex(int(v)) for v in S)
    if not verts:
        raise EmptyInput("empty vertex set")
    return verts


def is_convex(C: CubeComplex, S) -> bool:
    verts = _as_vertices(C, S)
    if not verts:
        raise EmptyInput("empty vertex set")
    D = C.dist
    idx = np.fromiter(sorted(verts), dtype=np.int64)
    outside = np.ones(C.n, dtype=bool)
    outside[idx] = False
    if not outside.any():
        return True
    sub = D[idx][:, outside]
    for i, a in enumerate(idx):
        # some v outside with d(a,v)+d(v,b)=d(a,b) for b in S
        lhs = D[a, outside][None, :] + sub
        if (lhs == D[a, idx][:, None]).any():
            return False
    return True


def subcomplex(C: CubeComplex, S, check: bool = True) -> Subcomplex:
    """Wrap a vertex set, certifying convexity when ``check`` is set."""
    verts = _as_vertices(C, S)
    if not check:
        return Subcomplex(verts, Convexity.UNCHECKED, C.name)
    state = Convexity.CONVEX if is_convex(C, verts) else Convexity.NONCONVEX
    return Subcomplex(verts, state, C.name)


def convex_hull(C: CubeComplex, S) -> Subcomplex:
    verts = _as_vertices(C, S)
    if not verts:
        raise EmptyInput("empty vertex set")
    mask = kernels.interval_closure(C.dist, sorted(verts))
    return Subcomplex(frozenset(np.nonzero(mask)[0].tolist()), Convexity.CONVEX, C.name)


def halfspace_hull(C: CubeComplex, S) -> frozenset:
    """Hull as the intersection of all halfspaces containing S."""
    idx = np.fromiter(sorted(_as_vertices(C, S)), dtype=np.int64)
    side = C.table.side
    keep = np.ones(C.n, dtype=bool)
    for h in range(C.table.count):
        vals = side[h, idx]
        if vals.all():
            keep &= side[h]
        elif not vals.any():
            keep &= ~side[h]
    return frozenset(np.nonzero(keep)[0].tolist())


def diameter(C: CubeComplex, S) -> int:
    idx = np.fromiter(sorted(_as_vertices(C, S)), dtype=np.int64)
    return int(C.dist[np.ix_(idx, idx)].max())


def _require_convex(K):
    if not isinstance(K, Subcomplex) or K.convex is not Convexity.CONVEX:
        raise NotConvex("gates need a verified-convex subcomplex")


def gate_map(C: CubeComplex, K: Subcomplex) -> np.ndarray:
    """Gate of every vertex onto K, as an array indexed by vertex."""
    _require_convex(K)
    idx = K.array
    return idx[C.dist[:, idx].argmin(axis=1)]


def gate(C: CubeComplex, K: Subcomplex, x) -> int:
    _require_convex(K)
    x = C.check_vertex(x)
    row = C.dist[x, K.array]
    best = row.min()
    hits = np.nonzero(row == best)[0]
    if len(hits) != 1:
        raise NotConvex(f"{len(hits)} closest points of K to {x}; K is not convex")
    return int(K.array[hits[0]])


def gate_image(C: CubeComplex, K: Subcomplex, K2: Subcomplex, check: bool = True) -> Subcomplex:
    """𝔤_K(K2) = {gate(K, x) : x in K2}."""
    _require_convex(K2)
    g = gate_map(C, K)
    verts = frozenset(g[K2.array].tolist())
    if check and not is_convex(C, verts):
        raise NotConvex("gate image is not convex; input is not a median graph")
    return Subcomplex(verts, Convexity.CONVEX, C.name)


def crossing_set(C: CubeComplex, K) -> frozenset:
    """Hyperplanes having a dual edge with both endpoints in K."""
    verts = _as_vertices(C, K)
    mask = np.zeros(C.n, dtype=bool)
    mask[list(verts)] = True
    E = C.edge_array
    if len(E) == 0:
        return frozenset()
    inside = mask[E[:, 0]] & mask[E[:, 1]]
    return frozenset(np.unique(C.table.edge_class[inside]).tolist())
