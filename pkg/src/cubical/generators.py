"""Named fixtures, products, and convex hulls of balls in RAAG Salvetti covers."""

from __future__ import annotations

import itertools
import json
import os
import re
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .errors import BudgetExceeded, MalformedInput, ParseError, UnknownFixture
from .median import CubeComplex

DEFAULT_BUDGET = 50_000


def vertex_budget(budget=None):
    if budget is not None:
        return int(budget)
    return int(os.environ.get("CUBICAL_BUDGET", DEFAULT_BUDGET))


# ------------------------------------------------------------------ fixtures

def _from_coords(coords, adjacent, name):
    coords = sorted(coords)
    index = {c: i for i, c in enumerate(coords)}
    edges = [(index[a], index[b]) for a, b in itertools.combinations(coords, 2) if adjacent(a, b)]
    labels = [",".join(str(t) for t in c) for c in coords]
    return CubeComplex(len(coords), edges, name=name, labels=labels)


def _lattice_adjacent(a, b):
    return sum(abs(x - y) for x, y in zip(a, b)) == 1


def path_complex(length: int, name=None) -> CubeComplex:
    coords = [(i,) for i in range(length + 1)]
    return _from_coords(coords, _lattice_adjacent, name or f"C_path({length})")


def grid(m: int, n: int, name=None) -> CubeComplex:
    """m x n squares; vertex label "x,y" with 0 <= x <= m, 0 <= y <= n."""
    coords = [(x, y) for x in range(m + 1) for y in range(n + 1)]
    return _from_coords(coords, _lattice_adjacent, name or f"C_grid({m},{n})")


def tree(parents: Sequence[int], name=None) -> CubeComplex:
    """Vertex i+1 hangs off parents[i]; vertex 0 is the root."""
    n = len(parents) + 1
    edges = []
    for i, p in enumerate(parents):
        if not 0 <= p <= i:
            raise MalformedInput(f"parent {p} of vertex {i + 1} must be an earlier vertex")
        edges.append((p, i + 1))
    spec = ",".join(str(p) for p in parents)
    return CubeComplex(n, edges, name=name or f"C_tree({spec})",
                       labels=[str(i) for i in range(n)])


def dumbbell() -> CubeComplex:
    """Squares [0,1]x[0,1] and [2,3]x[0,1] joined by the bridge (1,0)-(2,0)."""
    coords = [(x, y) for x in range(4) for y in range(2)]

    def adjacent(a, b):
        if not _lattice_adjacent(a, b):
            return False
        if {a[0], b[0]} == {1, 2}:
            return a[1] == b[1] == 0
        return True

    return _from_coords(coords, adjacent, "C_dumbbell")


def bridge_join(C1: CubeComplex, v1: int, C2: CubeComplex, v2: int, length: int = 1,
                name=None) -> CubeComplex:
    """Disjoint union of C1 and C2 with a path of ``length`` edges from v1 to v2."""
    off = C1.n
    edges = list(C1.edges) + [(a + off, b + off) for a, b in C2.edges]
    inner = list(range(C1.n + C2.n, C1.n + C2.n + length - 1))
    chain = [v1] + inner + [v2 + off]
    edges += list(zip(chain, chain[1:]))
    n = C1.n + C2.n + len(inner)
    l1 = [f"L{C1.label(v)}" for v in range(C1.n)]
    l2 = [f"R{C2.label(v)}" for v in range(C2.n)]
    labels = l1 + l2 + [f"b{i}" for i in range(len(inner))]
    return CubeComplex(n, edges, name=name or f"join({C1.name},{C2.name},{length})",
                       labels=labels)


def product(C1: CubeComplex, C2: CubeComplex, name=None) -> CubeComplex:
    n2 = C2.n
    edges = [(a * n2 + j, b * n2 + j) for a, b in C1.edges for j in range(n2)]
    edges += [(i * n2 + a, i * n2 + b) for i in range(C1.n) for a, b in C2.edges]
    labels = [f"{C1.label(i)},{C2.label(j)}" for i in range(C1.n) for j in range(n2)]
    return CubeComplex(C1.n * n2, edges, name=name or f"{C1.name}x{C2.name}", labels=labels)


_FIXTURE_RE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*(?:\((.*)\))?\s*$")


def fixture(name: str) -> CubeComplex:
    m = _FIXTURE_RE.match(name)
    if not m:
        raise UnknownFixture(name)
    head, args = m.group(1), m.group(2)
    parts = [a.strip() for a in args.split(",")] if args else []
    try:
        if head == "C_edge" and not parts:
            return path_complex(1, "C_edge")
        if head == "C_path3" and not parts:
            return path_complex(3, "C_path3")
        if head == "C_square" and not parts:
            return grid(1, 1, "C_square")
        if head == "C_tripod" and not parts:
            return tree([0, 0, 0], "C_tripod")
        if head == "C_cube3" and not parts:
            e = path_complex(1, "C_edge")
            return product(product(e, e), e, "C_cube3")
        if head == "C_grid" and len(parts) == 2:
            return grid(int(parts[0]), int(parts[1]))
        if head == "C_dumbbell" and not parts:
            return dumbbell()
        if head == "C_tree":
            return tree([int(p) for p in parts])
        if head == "C_path" and len(parts) == 1:
            return path_complex(int(parts[0]))
        if head == "salvetti_ball" and len(parts) == 2:
            C, _ = salvetti_ball(named_graph(parts[0]), int(parts[1]),
                                 name=f"salvetti_ball({parts[0]},{parts[1]})")
            return C
    except ValueError as exc:
        raise UnknownFixture(f"{name}: {exc}") from None
    raise UnknownFixture(name)


ACCEPTANCE_FIXTURES = (
    "C_edge", "C_square", "C_path3", "C_tripod", "C_cube3", "C_grid(2,2)", "C_grid(3,3)",
    "C_dumbbell", "salvetti_ball(edge,2)", "salvetti_ball(path-abc,2)",
    "salvetti_ball(free-ab,3)",
)


# ----------------------------------------------------------------------- RAAGs

@dataclass(frozen=True)
class DefiningGraph:
    generators: tuple
    edges: frozenset  # frozensets {g, h} of commuting generators

    def __post_init__(self):
        if len(set(self.generators)) != len(self.generators):
            raise MalformedInput("repeated generator label")
        for e in self.edges:
            if len(e) != 2 or not e <= set(self.generators):
                raise MalformedInput(f"bad commutation edge {sorted(e)}")

    @classmethod
    def build(cls, generators, edges=()):
        gens = tuple(sorted(generators))
        return cls(gens, frozenset(frozenset(e) for e in edges))

    def commute(self, g, h) -> bool:
        return g == h or frozenset((g, h)) in self.edges

    def link(self, g) -> frozenset:
        return frozenset(h for h in self.generators if h != g and self.commute(g, h))

    def is_clique(self, gens) -> bool:
        return all(self.commute(a, b) for a, b in itertools.combinations(gens, 2))

    @property
    def dimension(self) -> int:
        best = 0
        for k in range(1, len(self.generators) + 1):
            if any(self.is_clique(c) for c in itertools.combinations(self.generators, k)):
                best = k
        return best

    def to_json(self):
        gens = list(self.generators)
        return {"generators": gens,
                "edges": sorted(sorted(gens.index(g) for g in e) for e in self.edges)}


NAMED_GRAPHS = {
    "edge": (("a", "b"), [("a", "b")]),
    "free-ab": (("a", "b"), []),
    "path-abc": (("a", "b", "c"), [("a", "b"), ("b", "c")]),
    "triangle": (("a", "b", "c"), [("a", "b"), ("b", "c"), ("a", "c")]),
    "square-abcd": (("a", "b", "c", "d"), [("a", "b"), ("b", "c"), ("c", "d"), ("a", "d")]),
}


def named_graph(name: str) -> DefiningGraph:
    if name not in NAMED_GRAPHS:
        raise UnknownFixture(f"no defining graph called {name!r}")
    gens, edges = NAMED_GRAPHS[name]
    return DefiningGraph.build(gens, edges)


def load_defining_graph(text: str) -> DefiningGraph:
    doc = _loads(text)
    try:
        gens = [str(g) for g in doc["generators"]]
        edges = [(gens[i], gens[j]) for i, j in doc["edges"]]
    except (KeyError, TypeError, IndexError, ValueError) as exc:
        raise ParseError(f"defining graph: {exc!r}") from None
    if any(a == b for a, b in edges):
        raise ParseError("defining graph has a loop")
    return DefiningGraph.build(gens, edges)


Letter = tuple  # (generator, +1 | -1)


def parse_word(text: str) -> tuple:
    """Parse "a b a^-1" (also "a⁻¹" or "A" for an inverse)."""
    out = []
    for tok in text.replace("⁻¹", "^-1").split():
        if tok.endswith("^-1"):
            out.append((tok[:-3], -1))
        elif tok.endswith("^1"):
            out.append((tok[:-2], 1))
        elif len(tok) == 1 and tok.isupper():
            out.append((tok.lower(), -1))
        else:
            out.append((tok, 1))
    return tuple(out)


def format_word(word) -> str:
    if not word:
        return "1"
    return " ".join(g if e == 1 else f"{g}^-1" for g, e in word)


def _letter_key(gamma, letter):
    g, e = letter
    return (gamma.generators.index(g), 0 if e == 1 else 1)


def normal_form(gamma: DefiningGraph, word) -> tuple:
    """Cancel inverse pairs across commuting letters, then take the
    lexicographically least commutation-equivalent word."""
    w = list(word)
    for g, e in w:
        if g not in gamma.generators or e not in (1, -1):
            raise MalformedInput(f"bad letter {(g, e)}")
    changed = True
    while changed:
        changed = False
        for j in range(len(w)):
            g, e = w[j]
            for i in range(j - 1, -1, -1):
                h, f = w[i]
                if h == g and f == -e:
                    del w[j]
                    del w[i]
                    changed = True
                    break
                if not gamma.commute(g, h):
                    break
            if changed:
                break
    out = []
    while w:
        best = None
        for i, letter in enumerate(w):
            if all(gamma.commute(letter[0], w[k][0]) for k in range(i)):
                if best is None or _letter_key(gamma, letter) < _letter_key(gamma, w[best]):
                    best = i
        out.append(w.pop(best))
    return tuple(out)


def salvetti_ball(gamma: DefiningGraph, r: int, budget=None, name=None):
    """Convex hull of the radius-r word ball in the universal cover of the
    Salvetti complex.  Returns (complex, basepoint); the basepoint is vertex 0.

    The hull is computed inside a larger ball of radius R (starting at r+|Γ|),
    which is isometrically embedded; if the hull reaches the sphere of radius R
    the enumeration grows until the hull lies strictly inside.
    """
    if r < 0:
        raise MalformedInput("radius must be non-negative")
    budget = vertex_budget(budget)
    letters = [(g, e) for g in gamma.generators for e in (1, -1)]
    R = r + len(gamma.generators)
    while True:
        words = [()]
        index = {(): 0}
        frontier = [()]
        for _ in range(R):
            nxt = []
            for w in frontier:
                for letter in letters:
                    u = normal_form(gamma, w + (letter,))
                    if u not in index:
                        index[u] = len(words)
                        words.append(u)
                        nxt.append(u)
                        if len(words) > budget:
                            raise BudgetExceeded(
                                f"radius-{R} ball exceeds the vertex budget {budget}")
            frontier = nxt
        adj = [[] for _ in words]
        for w, i in index.items():
            for letter in letters:
                j = index.get(normal_form(gamma, w + (letter,)))
                if j is not None:
                    adj[i].append(j)
        adj = [sorted(set(a)) for a in adj]
        D = kernels.all_pairs_distances(len(words), adj)
        seeds = [i for i, w in enumerate(words) if len(w) <= r]
        hull = np.nonzero(kernels.interval_closure(D, seeds))[0]
        reach = max(len(words[i]) for i in hull)
        if reach < R:
            break
        R = reach + 1
    keep = sorted(hull.tolist(), key=lambda i: (len(words[i]),
                                                 [_letter_key(gamma, t) for t in words[i]]))
    new = {old: k for k, old in enumerate(keep)}
    edges, elabels = [], {}
    for old in keep:
        w = words[old]
        for g in gamma.generators:
            j = index.get(normal_form(gamma, w + ((g, 1),)))
            if j is not None and j in new:
                e = (min(new[old], new[j]), max(new[old], new[j]))
                edges.append(e)
                elabels[e] = g
    label = name or f"salvetti_ball({'/'.join(gamma.generators)},{r})"
    C = CubeComplex(len(keep), edges, name=label,
                    labels=[format_word(words[i]) for i in keep], edge_labels=elabels)
    C.words = tuple(words[i] for i in keep)
    C.gamma = gamma
    C.radius = r
    C.enumeration_radius = R
    return C, 0


# ------------------------------------------------------------------------ I/O

def export_complex(C: CubeComplex) -> str:
    doc = {"vertices": C.n, "edges": [list(e) for e in C.edges], "name": C.name}
    if C.labels is not None:
        doc["labels"] = list(C.labels)
    if C.edge_labels is not None:
        doc["edge_labels"] = [[a, b, C.edge_labels[(a, b)]] for a, b in sorted(C.edge_labels)]
    return json.dumps(doc, separators=(",", ":"), ensure_ascii=False) + "\n"


def _loads(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None


def _locate_edge(text, k):
    # line/column of the k-th entry of the "edges" array
    start = text.find('"edges"')
    if start < 0:
        return None, None
    pos = text.find("[", start)
    depth, count = 0, -1
    for i in range(pos, len(text)):
        ch = text[i]
        if ch == "[":
            depth += 1
            if depth == 2:
                count += 1
                if count == k:
                    line = text.count("\n", 0, i) + 1
                    return line, i - (text.rfind("\n", 0, i) + 1) + 1
        elif ch == "]":
            depth -= 1
            if depth == 0:
                break
    return None, None


def import_complex(text: str) -> CubeComplex:
    doc = _loads(text)
    if not isinstance(doc, dict) or "vertices" not in doc or "edges" not in doc:
        raise ParseError('expected an object with "vertices" and "edges"', 1, 1)
    n = doc["vertices"]
    if not isinstance(n, int) or n < 1:
        raise ParseError('"vertices" must be a positive integer', 1, 1)
    edges = doc["edges"]
    if not isinstance(edges, list):
        raise ParseError('"edges" must be a list', *_locate_edge(text, 0))
    for k, e in enumerate(edges):
        ok = (isinstance(e, list) and len(e) == 2
              and all(isinstance(t, int) and 0 <= t < n for t in e) and e[0] != e[1])
        if not ok:
            raise ParseError(f"edges[{k}] = {e!r} is not a pair of distinct ids in 0..{n - 1}",
                             *_locate_edge(text, k))
    elabels = None
    if "edge_labels" in doc:
        elabels = {(int(a), int(b)): str(g) for a, b, g in doc["edge_labels"]}
    try:
        return CubeComplex(n, [tuple(e) for e in edges], name=str(doc.get("name", "")),
                           labels=doc.get("labels"), edge_labels=elabels)
    except MalformedInput as exc:
        raise ParseError(str(exc)) from None
