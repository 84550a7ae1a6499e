"""Audit of the ten hierarchically-hyperbolic-space axioms on one factor system.

Every axiom always runs; failures are report entries.  A negative control
injects one documented corruption into the inputs of a single check:

    factor_system       drop the last non-whole member before checking the clauses
    projections         π_[C](vertex 0) gains a vertex outside the graph
    nesting             the strict nesting relation gains the loop [C] ⊏ [C]
    orthogonality       the orthogonality relation gains the loop [C] ⊥ [C]
    consistency         one inequality compares against a set outside the graph
    complexity          nesting gains a cycle, so chains are unbounded
    distance_formula    the right-hand side of one pair becomes infinite
    large_links         one coordinate is forced large with no container available
    bgi                 one ρ set gains a vertex outside the graph
    realization         one tuple coordinate gains a vertex outside the graph
    hierarchy_paths     one path is replaced by a walk that backtracks
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .contact import CapExceeded, bottleneck_delta, graph_geodesics
from .factors import NESTED, ORTHOGONAL, TRANSVERSE, FactorSystem, verify_factor_system
from .hierarchy import (hierarchy_path, perturbed_tuples, realization_costs, term_tables,
                        threshold, tuple_of, verify_hierarchy_path, _rho_cached)

INF = float("inf")
PHANTOM = ("X", -1)

AXIOMS = ("projections", "nesting", "orthogonality", "consistency", "complexity",
          "distance_formula", "large_links", "bgi", "realization", "hierarchy_paths")
CONTROLS = ("factor_system",) + AXIOMS


@dataclass
class AxiomResult:
    name: str
    passed: bool
    constants: dict = field(default_factory=dict)
    witness: object = None

    def to_dict(self):
        return {"name": self.name, "pass": self.passed,
                "constants": {k: _num(v) for k, v in sorted(self.constants.items())},
                "witness": _plain(self.witness)}


@dataclass
class AxiomReport:
    complex_name: str
    xi: int
    entries: list
    constants: dict
    negative_control: str | None = None

    @property
    def passed(self):
        return all(e.passed for e in self.entries)

    def entry(self, name):
        return next(e for e in self.entries if e.name == name)

    def failing(self):
        return [e.name for e in self.entries if not e.passed]

    def to_dict(self):
        return {"complex": self.complex_name, "xi": self.xi,
                "negative_control": self.negative_control, "pass": self.passed,
                "axioms": [e.to_dict() for e in self.entries],
                "constants": {k: _num(v) for k, v in sorted(self.constants.items())}}


def _num(v):
    if isinstance(v, float):
        if v == INF:
            return "inf"
        return int(v) if v == int(v) else round(v, 6)
    if isinstance(v, (np.integer,)):
        return int(v)
    return v


def _plain(x):
    if x is None or isinstance(x, (bool, int, str)):
        return x
    if isinstance(x, float):
        return _num(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (list, tuple)):
        return [_plain(t) for t in x]
    if isinstance(x, (set, frozenset)):
        return sorted((_plain(t) for t in x), key=str)
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if hasattr(x, "key"):
        return list(x.key)
    return str(x)


class _Graphs:
    """Set distances in factored contact graphs that tolerate foreign nodes."""

    def __init__(self, FS):
        self.FS = FS

    def G(self, k):
        return self.FS.fcg(self.FS.rep(k))

    @staticmethod
    def nodes(A):
        return [a if isinstance(a, tuple) else ("H", a) for a in A]

    def d(self, k, A, B):
        G = self.G(k).graph
        A, B = self.nodes(A), self.nodes(B)
        if any(a not in G.index for a in A + B):
            return INF
        return G.set_distance(A, B)

    def diam(self, k, A):
        G = self.G(k).graph
        A = self.nodes(A)
        if any(a not in G.index for a in A):
            return INF
        return G.set_diameter(A)


def _strict_order(FS, extra=()):
    k = len(FS.classes)
    rel = {(a, b) for a in range(k) for b in range(k) if FS.nested(a, b)}
    return rel | set(extra)


def _longest_chain(k, rel):
    adj = {a: sorted(b for (x, b) in rel if x == a) for a in range(k)}
    memo, onstack = {}, set()

    def depth(a):
        if a in onstack:
            return INF
        if a in memo:
            return memo[a]
        onstack.add(a)
        best = 1
        for b in adj[a]:
            best = max(best, 1 + depth(b))
        onstack.discard(a)
        memo[a] = best
        return best

    return max((depth(a) for a in range(k)), default=0)


# ------------------------------------------------------------------- axioms

def _ax_projections(FS, g, corrupt):
    worst, wit = 0, None
    for k in range(len(FS.classes)):
        seen = set()
        for x, clique in enumerate(FS.projection_cliques[k]):
            b = set(clique)
            if corrupt and k == 0 and x == 0:
                b.add(PHANTOM)
            key = frozenset(b)
            if key in seen:
                continue
            seen.add(key)
            val = g.diam(k, b)
            if val > worst:
                worst, wit = val, (k, x)
    return AxiomResult("projections", worst <= 1, {"xi_prime": worst}, wit if worst > 1 else None)


def _ax_nesting(FS, g, corrupt):
    k = len(FS.classes)
    rel = _strict_order(FS, [(0, 0)] if corrupt else [])
    problems = []
    for a, b in rel:
        if a == b:
            problems.append(("reflexive strict pair", a))
        if (b, a) in rel and a != b:
            problems.append(("not antisymmetric", a, b))
        for c in range(k):
            if (b, c) in rel and (a, c) not in rel and a != c:
                problems.append(("not transitive", a, b, c))
    maxima = [a for a in range(k) if not any((a, b) in rel for b in range(k) if b != a)]
    if maxima != [0] or FS.top is None or FS.class_of.get(FS.top) != 0:
        problems.append(("maximal classes", maxima))
    worst = 0
    for a, b in rel:
        if a != b:
            worst = max(worst, g.diam(b, _rho_cached(FS, a, b)))
    ok = not problems and worst <= FS.xi + 1
    return AxiomResult("nesting", ok, {"rho_diameter": worst}, problems[0] if problems else None)


def _ax_orthogonality(FS, g, corrupt):
    k = len(FS.classes)
    orth = {p for p, r in FS.relations.items() if r == ORTHOGONAL}
    if corrupt:
        orth.add((0, 0))
    nest = _strict_order(FS)
    problems = []
    for a, b in sorted(orth):
        if a == b:
            problems.append(("reflexive", a))
        if (b, a) not in orth:
            problems.append(("not symmetric", a, b))
        if (a, b) in nest or (b, a) in nest:
            problems.append(("orthogonal and nested", a, b))
        for c in range(k):
            if (c, a) in nest and (c, b) not in orth:
                problems.append(("not inherited", c, a, b))
    containers = {}

    def below(c, t):  # c ⊑ t
        return c == t or (c, t) in nest

    for t in range(k):
        for u in range(k):
            if not below(u, t):
                continue
            comp = [v for v in range(k) if below(v, t) and (v, u) in orth]
            if not comp:
                continue
            found = [w for w in range(k) if w != t and below(w, t)
                     and all(below(v, w) for v in comp)]
            if found:
                containers[(t, u)] = found[0]
            else:
                problems.append(("no container", t, u, comp))
    return AxiomResult("orthogonality", not problems,
                       {"containers": [[t, u, w] for (t, u), w in sorted(containers.items())]},
                       problems[0] if problems else None)


def _ax_consistency(FS, g, corrupt, vertices):
    k = len(FS.classes)
    pairs = [(u, v, r) for (u, v), r in sorted(FS.relations.items())
             if (r == TRANSVERSE and u < v) or r == NESTED]
    if corrupt and not pairs:
        pairs = [(0, 0, TRANSVERSE)]
    phantom = frozenset({PHANTOM})

    def rho(a, b, x, idx):
        if corrupt and x == 0 and idx == 0:
            return phantom
        return _rho_cached(FS, a, b)

    def rho_down(a, b, bits, x, idx):
        if corrupt and x == 0 and idx == 0:
            return phantom
        return FS.rho_down(a, b, bits)

    worst, wit = 0, None
    for x in vertices:
        b = tuple_of(FS, x)
        for idx, (u, v, r) in enumerate(pairs):
            if u == v and not (x == 0 and idx == 0):
                continue  # injected control pair
            if r == TRANSVERSE:
                val = min(g.d(u, b[u], rho(v, u, x, idx)), g.d(v, b[v], rho(u, v, x, idx)))
            else:  # u ⊏ v
                val = min(g.d(v, b[v], rho(u, v, x, idx)),
                          g.diam(u, set(b[u]) | rho_down(v, u, b[v], x, idx)))
            if val > worst:
                worst, wit = val, (x, u, v, r)
    rho_worst, rho_wit = 0, None
    nest = _strict_order(FS)
    for u, v in itertools.permutations(range(k), 2):
        if not ((u, v) in nest or FS.relations[(u, v)] == ORTHOGONAL):
            continue
        for w in range(k):
            if w in (u, v):
                continue
            ok_v = (v, w) in nest or FS.relations[(v, w)] == TRANSVERSE
            ok_u = (u, w) in nest or FS.relations[(u, w)] == TRANSVERSE
            if ok_u and ok_v:
                val = g.d(w, _rho_cached(FS, u, w), _rho_cached(FS, v, w))
                if val > rho_worst:
                    rho_worst, rho_wit = val, (u, v, w)
    kappa = max(worst, rho_worst)
    ok = worst <= FS.xi + 2 and rho_worst <= 3 * FS.xi + 6
    return AxiomResult("consistency", ok, {"kappa0": kappa, "point_kappa": worst,
                                           "rho_kappa": rho_worst},
                       None if ok else (wit if worst > FS.xi + 2 else rho_wit))


def _ax_complexity(FS, g, corrupt):
    k = len(FS.classes)
    rel = _strict_order(FS)
    if corrupt:
        rel = rel | {(0, k - 1), (k - 1, 0)} if k > 1 else rel | {(0, 0)}
    n = _longest_chain(k, rel)
    delta = FS.delta_mult
    return AxiomResult("complexity", n <= delta, {"n": n, "Delta": delta},
                       None if n <= delta else ("chain longer than multiplicity", n, delta))


def _ax_distance(FS, g, corrupt, s0):
    D = FS.C.dist.astype(float)
    R = threshold(term_tables(FS), s0).sum(axis=0).astype(float)
    n = FS.C.n
    iu = np.triu_indices(n, 1)
    d, rhs = D[iu], R[iu]
    if corrupt and len(rhs):
        rhs = rhs.copy()
        rhs[0] = INF
    if not len(d):
        return AxiomResult("distance_formula", True, {"K": 1.0, "C": 0, "s0": s0})
    best = None
    K = 1.0
    k_max = max(1.0, float(d.max()))
    with np.errstate(invalid="ignore"):
        while K <= k_max + 1e-9:
            lo = np.nanmax(rhs / K - d)
            up = np.nanmax(d - K * rhs)
            c = max(0.0, float(np.ceil(lo - 1e-9)), float(np.ceil(up - 1e-9)))
            if not np.isfinite(c):
                c = INF
            if best is None or K + c < best[0] + best[1]:
                best = (K, c)
            K += 0.125
    ok = best[1] != INF
    return AxiomResult("distance_formula", ok, {"K": best[0], "C": best[1], "s0": s0},
                       None if ok else ("no finite fit", int(iu[0][0]), int(iu[1][0])))


def _ax_large_links(FS, g, corrupt, s0):
    k = len(FS.classes)
    terms = term_tables(FS)
    nest = _strict_order(FS)
    lam = 1.0
    wit = None
    n = FS.C.n
    for w in range(k):
        below = [t for t in range(k) if (t, w) in nest]
        large_any = [t for t in below if (terms[t] >= s0).any()]
        if corrupt and w == 0:
            return AxiomResult("large_links", False, {"lambda": INF},
                               ("forced large coordinate without container", w))
        if not large_any:
            continue
        for x in range(n):
            for y in range(n):
                L = [t for t in below if terms[t][x, y] >= s0]
                if not L:
                    continue
                maximal = [t for t in L if not any((t, u) in nest for u in L)]
                dw = terms[w][x, y]
                need = len(maximal) / (dw + 1)
                bx = FS.projection_cliques[w][x]
                for t in maximal:
                    need = max(need, g.d(w, bx, _rho_cached(FS, t, w)) / (dw + 1))
                if need > lam:
                    lam, wit = need, (w, x, y)
    return AxiomResult("large_links", lam != INF, {"lambda": lam}, None)


def _rho_node(FS, w, v, node):
    """ρ^W_V applied to one node of 𝒞̂W."""
    if node[0] == "H":
        return FS.rho_down(w, v, {node[1]})
    W = FS.members[FS.rep(w)]
    out = set()
    for j in FS.classes[node[1]].members:
        if FS.members[j].vertices <= W.vertices:
            out |= FS.project_set(FS.rep(v), FS.members[j].key)
    return frozenset(out)


def _ax_bgi(FS, g, corrupt, cap):
    k = len(FS.classes)
    nest = _strict_order(FS)
    B = 0
    wit = None
    pairs = [(w, v) for w in range(k) for v in range(k) if (v, w) in nest]
    if corrupt:
        if pairs:
            w0, v0 = pairs[0]
        else:
            return AxiomResult("bgi", False, {"B": INF, "E": 1}, ("injected", 0))
    truncated = False
    for w, v in pairs:
        G = g.G(w).graph
        target = _rho_cached(FS, v, w)
        tnodes = [("H", h) for h in target]
        near = set()
        for node in G.nodes:
            if tnodes and G.set_distance([node], tnodes) <= 1:
                near.add(node)
        img = {node: _rho_node(FS, w, v, node) for node in G.nodes}
        if corrupt and (w, v) == (w0, v0):
            near = set()
            img = {node: img[node] | {PHANTOM} for node in img}
        for a, b in itertools.combinations(G.nodes, 2):
            try:
                paths, _ = graph_geodesics(G, a, b, cap)
            except CapExceeded as exc:
                paths, truncated = exc.best, True
            for p in paths:
                if set(p) & near:
                    continue
                union = set().union(*(img[node] for node in p))
                val = g.diam(v, union)
                if val > B:
                    B, wit = val, (w, v, p)
    return AxiomResult("bgi", B != INF, {"B": B, "E": 1, "truncated": truncated},
                       wit if B == INF else None)


def _ax_realization(FS, g, corrupt, seed):
    tuples = [tuple_of(FS, x) for x in range(FS.C.n)] + perturbed_tuples(FS, 100, seed)
    theta_e, theta_u, wit = 0, 0, None
    k = len(FS.classes)
    for i, b in enumerate(tuples):
        if corrupt and i == 0:
            cost = np.full(FS.C.n, INF)
            for y in range(FS.C.n):
                cost[y] = max(g.d(c, set(b[c]) | ({PHANTOM} if c == 0 else set()),
                                  FS.projection_cliques[c][y]) for c in range(k))
        else:
            cost = realization_costs(FS, b).astype(float)
        t = float(cost.min())
        if t > theta_e:
            theta_e, wit = t, i
    for b in tuples:
        cost = realization_costs(FS, b)
        near = np.nonzero(cost <= theta_e)[0]
        if len(near):
            theta_u = max(theta_u, int(FS.C.dist[np.ix_(near, near)].max()))
    ok = theta_e != INF
    return AxiomResult("realization", ok, {"theta_e": theta_e, "theta_u": theta_u,
                                           "tuples": len(tuples)},
                       None if ok else ("tuple", wit))


def _hausdorff(G, A, B):
    if not A or not B:
        return 0
    d = G.dist[np.ix_([G.index[a] for a in A], [G.index[b] for b in B])]
    return int(max(d.min(axis=1).max(), d.min(axis=0).max()))


def _ax_hierarchy(FS, g, corrupt, pairs, cap):
    k = len(FS.classes)
    D_const = 0
    bad = None
    cache = {}
    first = True
    for x, y in pairs:
        try:
            hp = hierarchy_path(FS, x, y, cap)
        except Exception as exc:  # a failure is a report entry
            bad = bad or (x, y, type(exc).__name__)
            continue
        if corrupt and first and len(hp.path) > 1:
            first = False
            hp.path = (hp.path[0], hp.path[1], hp.path[0]) + hp.path[1:]
        if not verify_hierarchy_path(FS, hp).passed:
            bad = bad or (x, y, "invalid path")
            continue
        for w in range(k):
            G = g.G(w).graph
            if not len(G):
                continue
            px = FS.projection_cliques[w][x]
            py = FS.projection_cliques[w][y]
            pg = frozenset().union(*(FS.projection_cliques[w][v] for v in hp.path))
            key = (w, px, py, pg)
            if key not in cache:
                A = [("H", h) for h in sorted(pg)]
                worst = 0
                try:
                    from .contact import set_geodesics
                    geos, _ = set_geodesics(G, [("H", h) for h in sorted(px)],
                                            [("H", h) for h in sorted(py)], 200)
                except CapExceeded as exc:
                    geos = exc.best
                for geo in geos:
                    worst = max(worst, _hausdorff(G, A, list(geo)))
                cache[key] = worst
            D_const = max(D_const, cache[key])
    ok = bad is None
    return AxiomResult("hierarchy_paths", ok, {"D": D_const if ok else INF,
                                               "pairs": len(pairs)}, bad)


# ------------------------------------------------------------------- driver

def audit(FS: FactorSystem, negative_control: str | None = None, seed: int = 0,
          cap: int = 10_000, max_pairs: int | None = None) -> AxiomReport:
    if negative_control is not None and negative_control not in CONTROLS:
        raise ValueError(f"unknown negative control {negative_control!r}; "
                         f"choose from {', '.join(CONTROLS)}")
    g = _Graphs(FS)
    s0 = 4 * FS.xi + 10
    n = FS.C.n
    pairs = [(x, y) for x in range(n) for y in range(n)]
    if max_pairs is not None and len(pairs) > max_pairs:
        rng = np.random.default_rng(seed)
        pick = np.sort(rng.choice(len(pairs), size=max_pairs, replace=False))
        pairs = [pairs[i] for i in pick]
    nc = negative_control
    entries = []
    members = FS.members
    if nc == "factor_system":
        drop = [m for m in members if len(m) != n] or list(members)
        members = [m for m in members if m is not drop[-1]]
    clauses = verify_factor_system(FS, members)
    failing = [name for name, r in clauses.items() if not r.passed]
    entries.append(AxiomResult(
        "factor_system", not failing, {"Delta": clauses["multiplicity"].value},
        (failing[0], clauses[failing[0]].witness) if failing else None))
    entries.append(_ax_projections(FS, g, nc == "projections"))
    entries.append(_ax_nesting(FS, g, nc == "nesting"))
    entries.append(_ax_orthogonality(FS, g, nc == "orthogonality"))
    entries.append(_ax_consistency(FS, g, nc == "consistency", range(n)))
    entries.append(_ax_complexity(FS, g, nc == "complexity"))
    entries.append(_ax_distance(FS, g, nc == "distance_formula", s0))
    entries.append(_ax_large_links(FS, g, nc == "large_links", s0))
    entries.append(_ax_bgi(FS, g, nc == "bgi", cap))
    entries.append(_ax_realization(FS, g, nc == "realization", seed))
    entries.append(_ax_hierarchy(FS, g, nc == "hierarchy_paths", pairs, cap))
    deltas = [bottleneck_delta(FS.fcg(FS.rep(k)).graph).delta for k in range(len(FS.classes))]
    delta_b = max(deltas) if deltas else 0.0
    consts = {"xi": FS.xi, "delta_b": delta_b, "delta": 3 * 26 * delta_b + 16 * delta_b,
              "E": 1}
    for e in entries:
        for key, val in e.constants.items():
            if key in ("kappa0", "n", "K", "C", "lambda", "B", "theta_e", "theta_u", "D",
                       "xi_prime"):
                consts[key] = val
    return AxiomReport(FS.C.name, FS.xi, entries, consts, nc)
