"""Hierarchy paths, the distance formula, bounded geodesic image,
large links, and consistency/realization of projection tuples."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .contact import DEFAULT_GEODESIC_CAP, set_geodesics
from .errors import BadIndex, CapExceeded, CubicalError, Inconsistent
from .factors import NESTED, TRANSVERSE, CheckResult, FactorSystem
from .median import Subcomplex, gate_map


class HierarchyPathNotFound(CubicalError):
    pass


# ----------------------------------------------------------- hierarchy paths

@dataclass
class Syllable:
    node: tuple  # ("H", h) or ("C", class index) in the factored contact graph of C
    carrier: Subcomplex
    vertices: tuple  # the syllable geodesic inside ``carrier``
    connector: tuple | None = None  # edge leaving the syllable, if any


@dataclass
class HierarchyPath:
    x: int
    y: int
    path: tuple
    syllables: list
    geodesic: tuple  # nodes of the factored contact graph of C
    mode: str = "combinatorial"

    @property
    def carriers(self):
        return [s.carrier for s in self.syllables]

    def to_dict(self, C=None):
        lab = (lambda v: C.label(v)) if C is not None else (lambda v: v)
        return {
            "from": lab(self.x), "to": lab(self.y),
            "path": [lab(v) for v in self.path],
            "length": len(self.path) - 1,
            "geodesic": [_node_name(n) for n in self.geodesic],
            "syllables": [{"node": _node_name(s.node), "carrier": [lab(v) for v in s.carrier.key],
                           "vertices": [lab(v) for v in s.vertices],
                           "connector": [lab(v) for v in s.connector] if s.connector else None}
                          for s in self.syllables],
            "mode": self.mode,
        }


def _node_name(n):
    return f"H{n[1]}" if n[0] == "H" else f"v[c{n[1]}]"


def _candidates(FS: FactorSystem, node, broad: bool):
    if node[0] == "C":
        return [FS.members[j] for j in FS.classes[node[1]].members]
    hp = FS.C.table.hyperplanes[node[1]]
    out = [hp.carrier]
    if broad:
        out += [hp.side_minus, hp.side_plus]
        S = frozenset(np.nonzero(FS.C.table.cross[node[1]])[0].tolist())
        for c in FS.classes:
            if c.crossing == S:
                out.extend(FS.members[j] for j in c.members if FS.members[j] not in out)
    return out


def _chain(FS, x, y, geo, broad):
    """Breadth-first search for a monotone x→y path split into syllables
    lying in subcomplexes attached to the nodes of ``geo``."""
    C = FS.C
    D = C.dist
    r = len(geo) - 1
    cands = [_candidates(FS, n, broad) for n in geo]
    cone = [n[0] == "C" for n in geo]
    dxy = D[x, y]

    def forward(p):
        return [q for q in C.adjacency[p] if D[x, q] == D[x, p] + 1 and D[q, y] == dxy - D[x, q]]

    start = [(0, t, x) for t, T in enumerate(cands[0]) if x in T]
    parent = {s: None for s in start}
    queue = deque(start)
    goal = None
    while queue:
        st = queue.popleft()
        i, t, p = st
        if i == r and p == y:
            goal = st
            break
        moves = []
        for q in forward(p):
            if q in cands[i][t]:
                moves.append(((i, t, q), None))
        if i < r:
            for t2, T2 in enumerate(cands[i + 1]):
                if p in T2:
                    moves.append(((i + 1, t2, p), None))
            if not cone[i] and not cone[i + 1]:
                for q in forward(p):
                    for t2, T2 in enumerate(cands[i + 1]):
                        if q in T2:
                            moves.append(((i + 1, t2, q), (p, q)))
        for nxt, conn in moves:
            if nxt not in parent:
                parent[nxt] = (st, conn)
                queue.append(nxt)
    if goal is None:
        return None
    trail = []
    st = goal
    while st is not None:
        prev = parent[st]
        trail.append((st, prev[1] if prev else None))
        st = prev[0] if prev else None
    trail.reverse()
    syllables = []
    path = [x]
    for (i, t, p), conn in trail:
        if not syllables or syllables[-1][0] != i:
            if syllables and conn is not None:
                syllables[-1][3] = conn
            syllables.append([i, t, [p], None])
        else:
            syllables[-1][2].append(p)
        if path[-1] != p:
            path.append(p)
    out = [Syllable(geo[i], cands[i][t], tuple(vs), tuple(c) if c else None)
           for i, t, vs, c in syllables]
    return tuple(path), out


def hierarchy_path(FS: FactorSystem, x: int, y: int,
                   cap: int = DEFAULT_GEODESIC_CAP) -> HierarchyPath:
    C = FS.C
    x, y = C.check_vertex(x), C.check_vertex(y)
    if FS.top is None:
        raise HierarchyPathNotFound("factor system lacks the whole complex")
    G = FS.fcg(FS.top)
    px = [("H", h) for h in sorted(FS.project(FS.top, x))]
    py = [("H", h) for h in sorted(FS.project(FS.top, y))]
    if not px:
        return HierarchyPath(x, y, (x,), [], ())
    truncated = False
    try:
        geodesics, _ = set_geodesics(G.graph, px, py, cap)
    except CapExceeded as exc:
        geodesics, truncated = exc.best, True
    for broad in (False, True):
        for geo in geodesics:
            found = _chain(FS, x, y, geo, broad)
            if found is not None:
                path, syl = found
                return HierarchyPath(x, y, path, syl, tuple(geo),
                                     "parallel-copies" if broad else "combinatorial")
    if truncated:
        raise CapExceeded(f"no hierarchy path among the first {cap} carrying geodesics",
                          count=len(geodesics))
    raise HierarchyPathNotFound(f"no hierarchy path from {x} to {y}")


def verify_hierarchy_path(FS: FactorSystem, hp: HierarchyPath) -> CheckResult:
    C = FS.C
    D = C.dist
    p = hp.path
    if p[0] != hp.x or p[-1] != hp.y or len(p) - 1 != D[hp.x, hp.y]:
        return CheckResult(False, witness="not a geodesic between the endpoints")
    if any(b not in C.adjacency[a] for a, b in zip(p, p[1:])):
        return CheckResult(False, witness="consecutive vertices not adjacent")
    if not hp.syllables:
        return CheckResult(hp.x == hp.y)
    G = FS.fcg(FS.top).graph
    geo = hp.geodesic
    for a, b in zip(geo, geo[1:]):
        if not G.has_edge(a, b):
            return CheckResult(False, witness=("carrying sequence not a path", a, b))
    px = [("H", h) for h in FS.project(FS.top, hp.x)]
    py = [("H", h) for h in FS.project(FS.top, hp.y)]
    if len(geo) - 1 != G.set_distance(px, py):
        return CheckResult(False, witness="carrying sequence is not a geodesic")
    joined = []
    for s in hp.syllables:
        if not set(s.vertices) <= s.carrier.vertices:
            return CheckResult(False, witness=("syllable leaves its carrier", s.node))
        if s.connector and (s.node[0] == "C"):
            return CheckResult(False, witness=("connector next to a cone vertex", s.node))
        joined.extend(s.vertices)
    dedup = [joined[0]] + [b for a, b in zip(joined, joined[1:]) if a != b]
    if tuple(dedup) != p:
        return CheckResult(False, witness="syllables do not concatenate to the path")
    return CheckResult(True)


def length_comparison(FS: FactorSystem, hp: HierarchyPath) -> CheckResult:
    """d(x,y) − d_ĈX(x,y) <= Σ d(g_Ti(x), g_Ti(y)) <= 3 d(x,y)."""
    D = FS.C.dist
    d = int(D[hp.x, hp.y])
    total = 0
    for s in hp.syllables:
        g = gate_map(FS.C, s.carrier)
        total += int(D[g[hp.x], g[hp.y]])
    r = max(len(hp.geodesic) - 1, 0)
    ok = d - r <= total <= 3 * d
    return CheckResult(ok, value=(d - r, total, 3 * d))


# ---------------------------------------------------------- distance formula

def _class_distance_table(FS: FactorSystem, k: int) -> np.ndarray:
    """d_{ĈF}(π_F(x), π_F(y)) for all vertex pairs, F the representative of class k."""
    cliques = FS.projection_cliques[k]
    uniq = sorted(set(cliques), key=sorted)
    pos = {c: i for i, c in enumerate(uniq)}
    G = FS.fcg(FS.rep(k))
    Q = np.zeros((len(uniq), len(uniq)), dtype=np.int64)
    for i, a in enumerate(uniq):
        for j in range(i + 1, len(uniq)):
            Q[i, j] = Q[j, i] = G.d(a, uniq[j])
    cid = np.array([pos[c] for c in cliques], dtype=np.int64)
    return Q[cid[:, None], cid[None, :]]


def term_tables(FS: FactorSystem) -> np.ndarray:
    if not hasattr(FS, "_terms"):
        FS._terms = np.stack([_class_distance_table(FS, k) for k in range(len(FS.classes))])
    return FS._terms


def threshold(A, s):
    return np.where(A >= s, A, 0)


def distance_formula_rhs(FS: FactorSystem, x: int, y: int, s: int):
    T = term_tables(FS)[:, x, y]
    table = {k: int(t) for k, t in enumerate(T) if t >= s and t > 0}
    return sum(table.values()), table


@dataclass
class DistanceFit:
    K: float
    C: int
    s: int
    lower_witness: tuple
    upper_witness: tuple
    rows: list = field(default_factory=list)  # (x, y, d, rhs)

    def to_dict(self):
        return {"K": self.K, "C": self.C, "s": self.s,
                "lower_witness": list(self.lower_witness),
                "upper_witness": list(self.upper_witness)}


def fit_distance_constants(FS: FactorSystem, s: int, k_step: float = 0.125) -> DistanceFit:
    """Smallest K + C (ties: smaller K) over K in steps of 1/8 and integer C
    with rhs/K − C <= d <= K·rhs + C for every pair."""
    D = FS.C.dist.astype(np.int64)
    R = threshold(term_tables(FS), s).sum(axis=0)
    n = FS.C.n
    iu = np.triu_indices(n, 1) if n > 1 else (np.array([0]), np.array([0]))
    d, rhs = D[iu], R[iu]
    k_max = max(1.0, float(d.max()) if len(d) else 1.0)
    best = None
    K = 1.0
    while K <= k_max + 1e-9:
        c_low = math.ceil(float((rhs / K - d).max()) - 1e-9)
        c_up = math.ceil(float((d - K * rhs).max()) - 1e-9)
        c = max(0, c_low, c_up)
        if best is None or K + c < best[0] + best[1] - 1e-12:
            best = (K, c)
        K += k_step
    K, c = best
    lo = int(np.argmax(rhs / K - d))
    up = int(np.argmax(d - K * rhs))
    rows = [(int(a), int(b), int(dd), int(rr)) for a, b, dd, rr in zip(iu[0], iu[1], d, rhs)]
    return DistanceFit(K, int(c), s, (int(iu[0][lo]), int(iu[1][lo])),
                       (int(iu[0][up]), int(iu[1][up])), rows)


# ---------------------------------------------------- bounded geodesic image

def sample_geodesics(C, count: int, seed: int = 0):
    """Seeded random geodesics: random endpoints, uniform monotone steps."""
    rng = np.random.default_rng(seed)
    D = C.dist
    out = []
    for _ in range(count):
        x, y = (int(t) for t in rng.integers(0, C.n, size=2))
        path = [x]
        while path[-1] != y:
            p = path[-1]
            nxt = [q for q in C.adjacency[p] if D[q, y] == D[p, y] - 1]
            path.append(nxt[int(rng.integers(0, len(nxt)))])
        out.append(tuple(path))
    return out


class BGIContext:
    """Precomputed gates and projections for batch BGI checks."""

    def __init__(self, FS: FactorSystem):
        self.FS = FS
        T = FS.C.table
        self.T = T
        self.ball = T.cross | np.eye(T.count, dtype=bool)
        self.hgates = [gate_map(FS.C, hp.side_plus) for hp in T.hyperplanes]

    def hyperplane(self, gamma, h) -> CheckResult:
        T = self.T
        idx = np.asarray(gamma, dtype=np.int64)
        image = T.carrier[idx].any(axis=0)
        if (image & self.ball[h]).any():
            return CheckResult(True, value="vacuous")
        g = self.hgates[h][idx]
        if (g == g[0]).all():
            return CheckResult(True)
        union = (T.carrier[g] & T.cross[h][None, :]).any(axis=0)
        hs = np.nonzero(union)[0]
        sub = T.contact[np.ix_(hs, hs)] | np.eye(len(hs), dtype=bool)
        if sub.all():
            return CheckResult(True)
        return CheckResult(False, witness=(tuple(gamma), h, hs.tolist()))

    def factored(self, F: int, gamma, U: int) -> CheckResult:
        FS = self.FS
        idx = np.asarray(gamma, dtype=np.int64)
        if not FS.contained(U, F) or not set(gamma) <= FS.members[F].vertices:
            raise ValueError("need U inside F and γ inside F")
        image = FS.proj_matrix(F)[idx].any(axis=0)
        if image[list(FS.crossing[U])].any():
            return CheckResult(True, value="vacuous")
        g = FS.gate(U)[idx]
        if (g == g[0]).all():
            return CheckResult(True)
        return CheckResult(False, witness=(tuple(gamma), F, U))


def check_bgi_hyperplane(C, gamma, h) -> CheckResult:
    from .factors import FactorSystem as _FS
    return BGIContext(_FS(C, [C.whole])).hyperplane(gamma, h)


def check_bgi_factored(FS: FactorSystem, F, gamma, U) -> CheckResult:
    return BGIContext(FS).factored(FS.member_index(F), gamma, FS.member_index(U))


def bgi_sweep(FS: FactorSystem, geodesics) -> dict:
    """Run both BGI checks over every hyperplane and every (F, U) pair."""
    ctx = BGIContext(FS)
    out = {"hyperplane": [0, 0, None], "factored": [0, 0, None]}  # checked, active, witness
    pairs = [(F, U) for F in range(len(FS)) for U in range(len(FS))
             if U != F and FS.contained(U, F)]
    for gamma in geodesics:
        gset = set(gamma)
        for h in range(ctx.T.count):
            res = ctx.hyperplane(gamma, h)
            out["hyperplane"][0] += 1
            if res.value != "vacuous":
                out["hyperplane"][1] += 1
            if not res.passed and out["hyperplane"][2] is None:
                out["hyperplane"][2] = res.witness
        for F, U in pairs:
            if not gset <= FS.members[F].vertices:
                continue
            res = ctx.factored(F, gamma, U)
            out["factored"][0] += 1
            if res.value != "vacuous":
                out["factored"][1] += 1
            if not res.passed and out["factored"][2] is None:
                out["factored"][2] = res.witness
    return out


def check_large_links(FS: FactorSystem, x, y, carriers, F, threshold_=None) -> CheckResult:
    """If d_ĈF(x, y) >= 4ξ+10 then F is parallel to a member inside some T_i."""
    i = FS.member_index(F)
    thr = 4 * FS.xi + 10 if threshold_ is None else threshold_
    d = FS.fcg(i).d(FS.project(i, x), FS.project(i, y))
    if d < thr:
        return CheckResult(True, value="vacuous")
    S = FS.crossing[i]
    for T in carriers:
        for j, m in enumerate(FS.members):
            if FS.crossing[j] == S and m.vertices <= T.vertices:
                return CheckResult(True, value=d, witness=(T, m))
        if S <= _crossing(FS, T):
            # T contains a parallel copy: the gate of F onto T
            return CheckResult(True, value=d, witness=(T, None))
    return CheckResult(False, value=d, witness=(x, y, i))


def _crossing(FS, T):
    from .median import crossing_set
    return crossing_set(FS.C, T)


def check_geodesic_near_gate(FS: FactorSystem, F, x, y, geodesics) -> CheckResult:
    """If d_ĈF(π_F x, π_F y) > 2ξ+4 every geodesic x→y meets a copy of F."""
    from .factors import parallel_copies
    i = FS.member_index(F)
    d = FS.fcg(i).d(FS.project(i, x), FS.project(i, y))
    if d <= 2 * FS.xi + 4:
        return CheckResult(True, value="vacuous")
    copies = [c.vertices for c in parallel_copies(FS.C, FS.crossing[i])]
    for g in geodesics:
        if not any(set(g) & c for c in copies):
            return CheckResult(False, value=d, witness=g)
    return CheckResult(True, value=d)


# -------------------------------------------------- consistency / realization

@dataclass(frozen=True)
class ProjectionTuple:
    coords: tuple  # frozenset of hyperplane ids per class, in class order
    kappa: float | None = None

    def __getitem__(self, k):
        return self.coords[k]

    def replace(self, k, value):
        c = list(self.coords)
        c[k] = frozenset(value)
        return ProjectionTuple(tuple(c), self.kappa)


def tuple_of(FS: FactorSystem, x: int) -> ProjectionTuple:
    x = FS.C.check_vertex(x)
    return ProjectionTuple(tuple(FS.projection_cliques[k][x] for k in range(len(FS.classes))),
                           FS.xi + 2)


def _rho_cached(FS, u, v):
    cache = FS.__dict__.setdefault("_rho_cache", {})
    if (u, v) not in cache:
        cache[(u, v)] = FS.rho(u, v)
    return cache[(u, v)]


def consistency_measure(FS: FactorSystem, b: ProjectionTuple):
    """Largest left-hand side over the transverse and nested inequalities,
    with the pair attaining it."""
    k = len(FS.classes)
    if len(b.coords) != k:
        raise BadIndex(f"tuple has {len(b.coords)} coordinates for {k} classes")
    worst, witness = 0, None
    for (u, v), r in sorted(FS.relations.items()):
        if r == TRANSVERSE and u < v:
            val = min(FS.fcg(FS.rep(u)).d(b[u], _rho_cached(FS, v, u)),
                      FS.fcg(FS.rep(v)).d(b[v], _rho_cached(FS, u, v)))
        elif r == NESTED:  # u ⊏ v: V := u nested into U := v
            U, V = v, u
            first = FS.fcg(FS.rep(U)).d(b[U], _rho_cached(FS, V, U))
            down = FS.rho_down(U, V, b[U])
            second = FS.fcg(FS.rep(V)).diam(b[V] | down)
            val = min(first, second)
        else:
            continue
        if val > worst:
            worst, witness = val, (u, v, r)
    return worst, witness


def consistency_check(FS: FactorSystem, b: ProjectionTuple, kappa=None) -> CheckResult:
    kappa = FS.xi + 2 if kappa is None else kappa
    worst, witness = consistency_measure(FS, b)
    return CheckResult(worst <= kappa, worst, witness if worst > kappa else None)


@dataclass
class Realization:
    vertex: int
    theta: int
    minimizers: tuple


def realization_costs(FS: FactorSystem, b: ProjectionTuple) -> np.ndarray:
    """max over classes of d_ĈF(b_F, π_F(y)), for every vertex y."""
    cost = np.zeros(FS.C.n, dtype=np.int64)
    for k in range(len(FS.classes)):
        G = FS.fcg(FS.rep(k))
        cache = {}
        row = np.empty(FS.C.n, dtype=np.int64)
        for y, clique in enumerate(FS.projection_cliques[k]):
            if clique not in cache:
                cache[clique] = G.d(frozenset(b[k]), clique)
            row[y] = cache[clique]
        cost = np.maximum(cost, row)
    return cost


def realize(FS: FactorSystem, b: ProjectionTuple, kappa=None) -> Realization:
    check = consistency_check(FS, b, kappa)
    if not check.passed:
        raise Inconsistent(f"tuple is not {kappa or FS.xi + 2}-consistent "
                           f"(measured {check.value})", check.witness)
    cost = realization_costs(FS, b)
    theta = int(cost.min())
    mins = tuple(int(v) for v in np.nonzero(cost == theta)[0])
    # set distance 0 only means the cliques touch; among minimizers prefer the
    # vertex whose projections equal the most coordinates exactly
    def exact(y):
        return sum(FS.projection_cliques[k][y] == b[k] for k in range(len(FS.classes)))
    best = max(mins, key=lambda y: (exact(y), -y))
    return Realization(best, theta, mins)


def perturbed_tuples(FS: FactorSystem, count: int = 100, seed: int = 0, kappa=None,
                     max_tries: int = 20_000):
    """Seeded tuples obtained from realized ones by swapping in coordinates of
    other vertices, kept only when they stay kappa-consistent."""
    rng = np.random.default_rng(seed)
    n, k = FS.C.n, len(FS.classes)
    out = []
    for _ in range(max_tries):
        if len(out) >= count:
            break
        b = tuple_of(FS, int(rng.integers(0, n)))
        for _ in range(int(rng.integers(1, max(2, k) + 1))):
            c = int(rng.integers(0, k))
            b = b.replace(c, FS.projection_cliques[c][int(rng.integers(0, n))])
        if consistency_check(FS, b, kappa).passed:
            out.append(b)
    return out
