"""Parallelism, factor systems, factored contact graphs and projections."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .contact import SmallGraph
from .errors import EmptyFactor, NotConvex, NotRich, SameClass
from .median import (Convexity, CubeComplex, Subcomplex, convex_hull, crossing_set,
                     diameter, gate_map, is_convex)

NESTED, NESTS, ORTHOGONAL, TRANSVERSE = "nested", "nests", "orthogonal", "transverse"


def _need_convex(K):
    if not isinstance(K, Subcomplex) or K.convex is not Convexity.CONVEX:
        raise NotConvex("expected a verified-convex subcomplex")


def are_parallel(C: CubeComplex, F: Subcomplex, F2: Subcomplex) -> bool:
    _need_convex(F)
    _need_convex(F2)
    return crossing_set(C, F) == crossing_set(C, F2)


def parallel_copies(C: CubeComplex, crossing: frozenset) -> list:
    """Every convex subcomplex crossed by exactly ``crossing``.

    Copies are the fibres of "same side of every other hyperplane" whose own
    crossing set is all of ``crossing``; distinct copies are disjoint.
    """
    T = C.table
    others = np.array([h for h in range(T.count) if h not in crossing], dtype=np.int64)
    groups = {}
    sig = T.side[others].T if len(others) else np.zeros((C.n, 0), dtype=bool)
    for v in range(C.n):
        groups.setdefault(sig[v].tobytes(), []).append(v)
    out = []
    for verts in groups.values():
        fs = frozenset(verts)
        if crossing_set(C, fs) == crossing:
            out.append(Subcomplex(fs, Convexity.CONVEX, C.name))
    return sorted(out)


def combinatorial_crossing_sets(C: CubeComplex) -> set:
    T = C.table
    return {frozenset(np.nonzero(T.cross[h])[0].tolist()) for h in range(T.count)}


@dataclass
class ParallelDecomposition:
    copies: list
    E: Subcomplex
    region: Subcomplex
    table: dict  # (f, e) -> vertex of the region

    def copy_of(self, e):
        return frozenset(v for (f, e2), v in self.table.items() if e2 == e)


def parallel_decomposition(C: CubeComplex, F: Subcomplex) -> ParallelDecomposition:
    _need_convex(F)
    S = crossing_set(C, F)
    copies = parallel_copies(C, S)
    region = convex_hull(C, set().union(*(c.vertices for c in copies)))
    T = C.table
    f0 = min(F.vertices)
    inside = np.array(sorted(S), dtype=np.int64)
    Evert = frozenset(v for v in region.vertices
                      if not len(inside) or (T.side[inside, v] == T.side[inside, f0]).all())
    E = Subcomplex(Evert, Convexity.CONVEX if is_convex(C, Evert) else Convexity.NONCONVEX,
                   C.name)
    outside = np.array([h for h in range(T.count) if h not in S], dtype=np.int64)
    by_sig = {T.side[:, v].tobytes(): v for v in region.vertices}
    table = {}
    for f in F.key:
        for e in E.key:
            sig = T.side[:, f].copy()
            sig[outside] = T.side[outside, e]
            v = by_sig.get(sig.tobytes())
            if v is None:
                raise NotConvex(f"no vertex for ({f}, {e}); region is not a product")
            table[(f, e)] = v
    if len(set(table.values())) != len(region) or len(table) != len(region):
        raise NotConvex("product map is not a bijection onto the region")
    return ParallelDecomposition(copies, E, region, table)


# ------------------------------------------------------------ factor systems

@dataclass
class CheckResult:
    passed: bool
    value: object = None
    witness: object = None

    def to_dict(self):
        return {"pass": self.passed, "value": _jsonable(self.value),
                "witness": _jsonable(self.witness)}


def _jsonable(x):
    if isinstance(x, Subcomplex):
        return list(x.key)
    if isinstance(x, (frozenset, set)):
        return sorted(_jsonable(t) for t in x)
    if isinstance(x, (list, tuple)):
        return [_jsonable(t) for t in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, float) and x == int(x) and abs(x) < 2**53:
        return x
    return x


@dataclass
class FactorClass:
    index: int
    crossing: frozenset
    members: tuple  # member indices
    rep: int  # member index of the canonical representative


class FactoredContactGraph:
    """Contact graph of F plus one cone vertex per eligible class of proper
    members inside F.  Nodes are ("H", h) and ("C", class index)."""

    def __init__(self, base_nodes, base_edges, cones):
        nodes = [("H", h) for h in base_nodes]
        edges = [(("H", a), ("H", b)) for a, b in base_edges]
        for k, hs in cones.items():
            nodes.append(("C", k))
            edges.extend((("C", k), ("H", h)) for h in hs)
        self.hyperplanes = tuple(sorted(base_nodes))
        self.cones = {k: frozenset(v) for k, v in sorted(cones.items())}
        self.graph = SmallGraph(nodes, edges)
        self._pair_cache = {}

    def __len__(self):
        return len(self.graph)

    @staticmethod
    def H(hs):
        return [("H", h) for h in hs]

    def d(self, A, B) -> int:
        """Distance between hyperplane sets (or prepared node lists)."""
        key = (A, B) if isinstance(A, frozenset) and isinstance(B, frozenset) else None
        if key is not None and key in self._pair_cache:
            return self._pair_cache[key]
        val = self.graph.set_distance(self._nodes(A), self._nodes(B))
        if key is not None:
            self._pair_cache[key] = val
        return val

    def diam(self, A) -> int:
        return self.graph.set_diameter(self._nodes(A))

    @staticmethod
    def _nodes(A):
        return [a if isinstance(a, tuple) else ("H", a) for a in A]

    def to_dot(self, name="factored") -> str:
        def lab(v):
            return f"H{v[1]}" if v[0] == "H" else f"v[c{v[1]}]"
        return self.graph.to_dot(name, label=lab)


class FactorSystem:
    def __init__(self, C: CubeComplex, members, xi: int = 1, origin: str = "minimal"):
        if xi < 1:
            raise ValueError("xi must be at least 1")
        self.C = C
        self.xi = xi
        self.origin = origin
        uniq = {m.vertices: m for m in members}
        self.members = sorted(Subcomplex(v, m.convex, C.name) for v, m in uniq.items())
        self.index = {m.vertices: i for i, m in enumerate(self.members)}
        self.crossing = [crossing_set(C, m) for m in self.members]
        self.diam = [diameter(C, m) for m in self.members]
        self._gates = {}
        self._proj = {}
        self._fcg = {}
        self._orth = {}
        by_cross = {}
        for i, S in enumerate(self.crossing):
            by_cross.setdefault(S, []).append(i)
        classes = []
        for S, idx in by_cross.items():
            rep = min(idx, key=lambda i: self.members[i].key)
            classes.append((S, tuple(idx), rep))
        whole = frozenset(range(C.n))
        classes.sort(key=lambda t: (self.members[t[2]].vertices != whole,
                                    self.members[t[2]].key))
        self.classes = [FactorClass(k, S, idx, rep) for k, (S, idx, rep) in enumerate(classes)]
        self.class_of = {}
        for c in self.classes:
            for i in c.members:
                self.class_of[i] = c.index
        self.top = self.index.get(whole)

    # -- basic member data
    def __len__(self):
        return len(self.members)

    @cached_property
    def multiplicity(self) -> np.ndarray:
        counts = np.zeros(self.C.n, dtype=np.int64)
        for m in self.members:
            counts[m.array] += 1
        return counts

    @property
    def delta_mult(self) -> int:
        return int(self.multiplicity.max())

    def gate(self, i) -> np.ndarray:
        if i not in self._gates:
            self._gates[i] = gate_map(self.C, self.members[i])
        return self._gates[i]

    def rep(self, k) -> int:
        return self.classes[k].rep

    def member_index(self, F) -> int:
        if isinstance(F, (int, np.integer)):
            return int(F)
        return self.index[F.vertices if isinstance(F, Subcomplex) else frozenset(F)]

    @cached_property
    def comb_sets(self) -> set:
        return combinatorial_crossing_sets(self.C)

    def contained(self, i, j) -> bool:
        return self.members[i].vertices <= self.members[j].vertices

    # -- relations between classes
    def nested(self, a, b) -> bool:
        """[a] is parallel into a member of [b]."""
        return a != b and self.classes[a].crossing < self.classes[b].crossing

    def orthogonal_witness(self, a, b):
        key = (min(a, b), max(a, b))
        if key not in self._orth:
            self._orth[key] = _product_witness(self.C, self.classes[key[0]].crossing,
                                               self.classes[key[1]].crossing)
        return self._orth[key]

    def relation(self, a, b) -> str:
        if a == b:
            raise SameClass("relation of a class with itself")
        if self.nested(a, b):
            return NESTED
        if self.nested(b, a):
            return NESTS
        if self.orthogonal_witness(a, b) is not None:
            return ORTHOGONAL
        return TRANSVERSE

    @cached_property
    def relations(self) -> dict:
        k = len(self.classes)
        return {(a, b): self.relation(a, b) for a in range(k) for b in range(k) if a != b}

    # -- factored contact graphs and projections
    def fcg(self, i) -> FactoredContactGraph:
        i = self.member_index(i)
        if i not in self._fcg:
            T = self.C.table
            base = sorted(self.crossing[i])
            bedges = [(a, b) for a, b in itertools.combinations(base, 2) if T.contact[a, b]]
            cones = {}
            for j, m in enumerate(self.members):
                if j == i or not self.contained(j, i) or not self.crossing[j]:
                    continue
                if self.crossing[j] in self.comb_sets or self.diam[j] >= self.xi:
                    cones[self.class_of[j]] = self.crossing[j]
            self._fcg[i] = FactoredContactGraph(base, bedges, cones)
        return self._fcg[i]

    def proj_matrix(self, i) -> np.ndarray:
        """Row x is the indicator of π_F(x) over hyperplane ids."""
        if i not in self._proj:
            T = self.C.table
            mask = np.zeros(T.count, dtype=bool)
            mask[list(self.crossing[i])] = True
            self._proj[i] = T.carrier[self.gate(i)] & mask[None, :]
        return self._proj[i]

    def project(self, i, x) -> frozenset:
        return frozenset(np.nonzero(self.proj_matrix(i)[x])[0].tolist())

    def project_set(self, i, verts) -> frozenset:
        idx = np.fromiter(verts, dtype=np.int64)
        if not len(idx):
            return frozenset()
        return frozenset(np.nonzero(self.proj_matrix(i)[idx].any(axis=0))[0].tolist())

    @cached_property
    def projection_cliques(self):
        """Per class: list over vertices of the frozenset π_rep(x)."""
        out = []
        for c in self.classes:
            M = self.proj_matrix(c.rep)
            cache = {}
            row = []
            for x in range(self.C.n):
                key = M[x].tobytes()
                if key not in cache:
                    cache[key] = frozenset(np.nonzero(M[x])[0].tolist())
                row.append(cache[key])
            out.append(row)
        return out

    # -- class projections
    def rho(self, u, v) -> frozenset:
        """ρ^[u]_[v] as hyperplanes of the representative of [v]."""
        if u == v:
            raise SameClass("ρ needs two distinct classes")
        V = self.rep(v)
        if self.nested(u, v):
            return self.project_set(V, self.members[self.rep(u)].key)
        return frozenset().union(*(self.project_set(V, self.members[j].key)
                                   for j in self.classes[u].members))

    def rho_down(self, u, v, b) -> frozenset:
        """For [v] ⊏ [u]: the union of π_V(W) over the combinatorial hyperplanes
        W = H^± ∩ U of the representative U, H in the clique b."""
        U = self.members[self.rep(u)]
        V = self.rep(v)
        T = self.C.table
        out = set()
        for h in b:
            dual = T.carrier[:, h]
            for plus in (False, True):
                W = [x for x in U.key if dual[x] and T.side[h, x] == plus]
                out |= self.project_set(V, W)
        return frozenset(out)

    def copy_subcomplexes(self) -> list:
        return [self.members[c.rep] for c in self.classes]


def _product_witness(C, Sa, Sb):
    """Intersecting copies Fa, Fb whose hull is Fa x Fb, or None."""
    if not Sa or not Sb or Sa & Sb:
        return None
    T = C.table
    if not T.cross[np.ix_(sorted(Sa), sorted(Sb))].all():
        return None
    copies_b = parallel_copies(C, Sb)
    for Fa in parallel_copies(C, Sa):
        for Fb in copies_b:
            common = Fa.vertices & Fb.vertices
            if not common:
                continue
            p = min(common)
            hull = convex_hull(C, Fa.vertices | Fb.vertices)
            if len(hull) != len(Fa) * len(Fb):
                continue
            by_sig = {T.side[:, v].tobytes(): v for v in hull.vertices}
            ia, ib = sorted(Sa), sorted(Sb)
            ok = True
            for a in Fa.key:
                for b in Fb.key:
                    sig = T.side[:, p].copy()
                    sig[ia] = T.side[ia, a]
                    sig[ib] = T.side[ib, b]
                    if sig.tobytes() not in by_sig:
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                return (Fa, Fb, p)
    return None


def minimal_factor_system(C: CubeComplex, xi: int = 1) -> FactorSystem:
    """{C} plus every nontrivial subcomplex parallel to a combinatorial
    hyperplane, closed under gate images of diameter >= xi."""
    members = [C.whole]
    seen = {C.whole.vertices}
    for S in sorted(combinatorial_crossing_sets(C), key=sorted):
        if not S:
            continue
        for F in parallel_copies(C, S):
            if F.vertices not in seen:
                seen.add(F.vertices)
                members.append(F)
    members = _close(C, members, seen, xi)
    return FactorSystem(C, members, xi, "minimal")


def _close(C, members, seen, xi):
    D = C.dist
    gates = [gate_map(C, m) for m in members]
    k = 0
    while k < len(members):
        for j in range(k + 1):
            for a, b in ((k, j), (j, k)):
                verts = frozenset(gates[a][members[b].array].tolist())
                if verts in seen:
                    continue
                idx = np.fromiter(verts, dtype=np.int64)
                if D[np.ix_(idx, idx)].max() >= xi:
                    if not is_convex(C, verts):
                        raise NotConvex("gate image not convex")
                    F = Subcomplex(verts, Convexity.CONVEX, C.name)
                    seen.add(verts)
                    members.append(F)
                    gates.append(gate_map(C, F))
        k += 1
    return members


def verify_factor_system(FS: FactorSystem, members=None) -> dict:
    """The five factor-system clauses; ``members`` overrides FS.members
    (used by negative controls)."""
    C = FS.C
    members = list(FS.members if members is None else members)
    keys = {m.vertices for m in members}
    out = {}
    out["contains_complex"] = CheckResult(frozenset(range(C.n)) in keys)
    bad = next((m for m in members if not m.vertices or not is_convex(C, m)), None)
    out["nonempty_convex"] = CheckResult(bad is None, witness=bad)
    counts = np.zeros(C.n, dtype=np.int64)
    for m in members:
        counts[m.array] += 1
    out["multiplicity"] = CheckResult(True, value=int(counts.max()),
                                      witness=int(np.argmax(counts)))
    missing = None
    for S in sorted(combinatorial_crossing_sets(C), key=sorted):
        if not S:
            continue
        for F in parallel_copies(C, S):
            if F.vertices not in keys:
                missing = F
                break
        if missing is not None:
            break
    out["hyperplane_parallels"] = CheckResult(missing is None, witness=missing)
    gates = [gate_map(C, m) for m in members]
    D = C.dist
    witness = None
    for a, b in itertools.product(range(len(members)), repeat=2):
        verts = frozenset(gates[a][members[b].array].tolist())
        if verts in keys:
            continue
        idx = np.fromiter(verts, dtype=np.int64)
        if D[np.ix_(idx, idx)].max() >= FS.xi:
            witness = (members[a], members[b])
            break
    out["closure"] = CheckResult(witness is None, witness=witness)
    return out


def induced_factor_system(FS: FactorSystem, Y: Subcomplex) -> FactorSystem:
    """Members F ∩ Y, living on Y as a complex in its own right (vertex i of
    the new complex is the i-th smallest vertex of Y)."""
    _need_convex(Y)
    C = FS.C
    order = Y.key
    new = {v: i for i, v in enumerate(order)}
    edges = [(new[a], new[b]) for a, b in C.edges if a in new and b in new]
    labels = [str(C.label(v)) for v in order]
    elab = None
    if C.edge_labels is not None:
        elab = {(new[a], new[b]): g for (a, b), g in C.edge_labels.items()
                if a in new and b in new}
    CY = CubeComplex(len(order), edges, name=f"{C.name}|Y", labels=labels, edge_labels=elab)
    CY.parent_vertices = order
    members = []
    for m in FS.members:
        common = m.vertices & Y.vertices
        if common:
            verts = frozenset(new[v] for v in common)
            members.append(Subcomplex(verts, Convexity.CONVEX if is_convex(CY, verts)
                                      else Convexity.NONCONVEX, CY.name))
    return FactorSystem(CY, members, FS.xi, "induced")


# -------------------------------------------------------------- RAAG systems

def minimal_rich_family(gamma) -> list:
    fam = {frozenset(gamma.generators)}
    fam |= {gamma.link(g) for g in gamma.generators if gamma.link(g)}
    changed = True
    while changed:
        changed = False
        for a, b in itertools.combinations(list(fam), 2):
            c = a & b
            if c and c not in fam:
                fam.add(c)
                changed = True
    return sorted(fam, key=lambda s: (len(s), sorted(s)))


def all_rich_family(gamma) -> list:
    gens = gamma.generators
    return [frozenset(c) for k in range(1, len(gens) + 1) for c in itertools.combinations(gens, k)]


def check_rich(gamma, family) -> None:
    fam = {frozenset(s) for s in family}
    if frozenset(gamma.generators) not in fam:
        raise NotRich("family does not contain the whole graph", sorted(gamma.generators))
    for g in gamma.generators:
        lk = gamma.link(g)
        if lk and lk not in fam:
            raise NotRich(f"missing the link of {g}", sorted(lk))
    for a, b in itertools.combinations(sorted(fam, key=sorted), 2):
        if a & b and a & b not in fam:
            raise NotRich("not closed under intersection", [sorted(a), sorted(b)])


def raag_factor_system(C: CubeComplex, gamma, family="minimal", xi: int = 1) -> FactorSystem:
    """Members are the nontrivial traces in C of cosets g·A_Λ, Λ in the family.

    C must carry generator labels on its edges (as produced by salvetti_ball).
    """
    if family == "minimal":
        family = minimal_rich_family(gamma)
    elif family == "all":
        family = all_rich_family(gamma)
    check_rich(gamma, family)
    if C.edge_labels is None:
        raise NotRich("complex carries no generator labels")
    members = {}
    for lam in sorted({frozenset(s) for s in family}, key=lambda s: (len(s), sorted(s))):
        adj = [[] for _ in range(C.n)]
        for (a, b), g in C.edge_labels.items():
            if g in lam:
                adj[a].append(b)
                adj[b].append(a)
        seen = np.zeros(C.n, dtype=bool)
        for s in range(C.n):
            if seen[s] or not adj[s]:
                continue
            comp, stack = [s], [s]
            seen[s] = True
            while stack:
                u = stack.pop()
                for w in adj[u]:
                    if not seen[w]:
                        seen[w] = True
                        comp.append(w)
                        stack.append(w)
            hull = convex_hull(C, comp)
            members.setdefault(hull.vertices, hull)
    members.setdefault(C.whole.vertices, C.whole)
    return FactorSystem(C, list(members.values()), xi, "raag")


# ------------------------------------------------------- relations and checks

def classify_relation(FS: FactorSystem, a: int, b: int) -> str:
    r = FS.relation(a, b)
    return NESTED if r in (NESTED, NESTS) else r


def factored_contact_graph(FS: FactorSystem, F) -> FactoredContactGraph:
    return FS.fcg(FS.member_index(F))


def project_point(FS: FactorSystem, F, x) -> frozenset:
    i = FS.member_index(F)
    if not FS.crossing[i]:
        raise EmptyFactor("factor is a single vertex; its projection is empty")
    return FS.project(i, FS.C.check_vertex(x))


def rho(FS: FactorSystem, u: int, v: int) -> frozenset:
    return FS.rho(u, v)


@dataclass
class ProductRegion:
    F: Subcomplex
    E: Subcomplex
    region: Subcomplex
    gate: np.ndarray
    checks: dict = field(default_factory=dict)


def product_region(FS: FactorSystem, U) -> ProductRegion:
    i = FS.member_index(U)
    F = FS.members[i]
    pd = parallel_decomposition(FS.C, F)
    g = gate_map(FS.C, pd.region)
    k = FS.class_of[i]
    checks = {}
    for w in range(len(FS.classes)):
        if w != k and FS.relation(w, k) not in (NESTED, ORTHOGONAL):
            continue
        M = FS.proj_matrix(FS.rep(w))
        bad = np.nonzero((M[g] != M).any(axis=1))[0]
        checks[w] = CheckResult(len(bad) == 0, witness=int(bad[0]) if len(bad) else None)
    return ProductRegion(F, pd.E, pd.region, g, checks)


def color_factors(FS: FactorSystem) -> dict:
    k = len(FS.classes)
    conflict = {a: set() for a in range(k)}
    for (a, b), r in FS.relations.items():
        if r != TRANSVERSE:
            conflict[a].add(b)
    order = sorted(range(k), key=lambda a: (-len(conflict[a]), a))
    color = {}
    for a in order:
        used = {color[b] for b in conflict[a] if b in color}
        c = 1
        while c in used:
            c += 1
        color[a] = c
    return dict(sorted(color.items()))


def d_pi(FS: FactorSystem, y: int, a: int, b: int) -> int:
    """diam in 𝒞̂Y of the union of the projections of classes a and b."""
    G = FS.fcg(FS.rep(y))
    return G.diam(FS.rho(a, y) | FS.rho(b, y))


def check_bounded_projections(FS: FactorSystem) -> CheckResult:
    worst, witness = 0, None
    for i, j in itertools.product(range(len(FS)), repeat=2):
        a, b = FS.class_of[i], FS.class_of[j]
        if a == b or FS.nested(a, b) or not FS.crossing[i]:
            continue
        val = FS.fcg(i).diam(FS.project_set(i, FS.members[j].key))
        if val > worst:
            worst, witness = val, (FS.members[i], FS.members[j])
    return CheckResult(worst <= FS.xi + 1, worst, witness)


def check_behrstock(FS: FactorSystem) -> CheckResult:
    bound = 3 * FS.xi + 6
    k = len(FS.classes)
    worst, witness = 0, None
    for a, b, c in itertools.permutations(range(k), 3):
        if not all(FS.relations[p] == TRANSVERSE for p in ((a, b), (a, c), (b, c))):
            continue
        val = min(d_pi(FS, a, b, c), d_pi(FS, b, a, c))
        if val > worst:
            worst, witness = val, (a, b, c)
    return CheckResult(worst <= bound, worst, witness)


def check_cover_dichotomy(FS: FactorSystem) -> CheckResult:
    """Transverse pairs have class projections of diameter <= 3ξ+6;
    orthogonal pairs have class projections covering the target's hyperplanes."""
    bound = 3 * FS.xi + 6
    for (v, u), r in sorted(FS.relations.items()):
        if r in (NESTED, NESTS) or not FS.classes[v].crossing:
            continue
        proj = FS.rho(u, v)
        if r == TRANSVERSE and FS.fcg(FS.rep(v)).diam(proj) > bound:
            return CheckResult(False, witness=(u, v, "transverse projection too large"))
        if r == ORTHOGONAL and proj != FS.classes[v].crossing:
            return CheckResult(False, witness=(u, v, "orthogonal projection does not cover"))
    return CheckResult(True)
