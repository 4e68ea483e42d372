"""Deliberately naive reference implementations used for cross-checking.

Nothing in here calls into the other treeminors modules except to read the
fields of a Tree; the point is that these routes stay independent.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterator, Sequence

from .errors import NotSquare, TooLarge
from .graph_model import Edge, Tree

MAX_LAPLACE = 8
MAX_POWERSET_EDGES = 20
MAX_EXHAUSTIVE_N = 8


def det_cofactor_expansion(m: Sequence[Sequence[Fraction]]) -> Fraction:
    """Laplace expansion along successive rows.

    Minors are tabulated by their column set, so an 8x8 matrix costs 8 * 2^8
    products rather than 8!. Integer matrices stay in int arithmetic.
    """
    k = len(m)
    if any(len(row) != k for row in m):
        raise NotSquare("Laplace expansion needs a square matrix")
    if k > MAX_LAPLACE:
        raise TooLarge(f"Laplace expansion is capped at {MAX_LAPLACE}x{MAX_LAPLACE}")
    rows = [list(r) for r in m]
    if all(x.denominator == 1 for r in rows for x in r):
        rows = [[int(x) for x in r] for r in rows]
    # minor[cols] = det of the first popcount(cols) rows restricted to cols
    minor = {0: 1}
    frontier = [0]
    for r in range(k):
        row = rows[r]
        nxt = {}
        for cols in frontier:
            below = minor[cols]
            if not below:
                continue
            sign = 1
            for j in range(k - 1, -1, -1):
                bit = 1 << j
                if cols & bit:
                    sign = -sign
                    continue
                x = row[j]
                if x:
                    key = cols | bit
                    # sign is (-1)^(number of chosen columns right of j)
                    nxt[key] = nxt.get(key, 0) + sign * x * below
        minor = nxt
        frontier = list(nxt)
    return Fraction(minor.get((1 << k) - 1, 0))


def bfs_distance_matrix(t: Tree) -> list[list[Fraction]]:
    """All-pairs path lengths by breadth-first search from every vertex."""
    nbrs: list[list[tuple[int, Fraction]]] = [[] for _ in range(len(t.labels))]
    for e in t.edges:
        nbrs[e.tail].append((e.head, e.length))
        nbrs[e.head].append((e.tail, e.length))
    out = []
    for src in range(len(t.labels)):
        dist: list[Fraction | None] = [None] * len(t.labels)
        dist[src] = Fraction(0)
        queue = deque([src])
        while queue:
            v = queue.popleft()
            for w, a in nbrs[v]:
                if dist[w] is None:
                    dist[w] = dist[v] + a
                    queue.append(w)
        out.append(dist)
    return out


def _components(n: int, edges: list[tuple[int, int]]) -> list[set[int]]:
    nbrs: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        nbrs[u].append(v)
        nbrs[v].append(u)
    seen: set[int] = set()
    comps = []
    for start in range(n):
        if start in seen:
            continue
        comp = {start}
        stack = [start]
        while stack:
            for w in nbrs[stack.pop()]:
                if w not in comp:
                    comp.add(w)
                    stack.append(w)
        seen |= comp
        comps.append(comp)
    return comps


@dataclass
class Classification:
    f1: list[tuple[int, ...]]
    f2: list[tuple[int, ...]]
    other: int


def classify_all_subsets(t: Tree, s: Sequence[int]) -> Classification:
    """Sort every edge subset into S-rooted, (S,*)-rooted or neither."""
    m = len(t.edges)
    if m > MAX_POWERSET_EDGES:
        raise TooLarge(f"power-set classification is capped at {MAX_POWERSET_EDGES} edges")
    targets = set(s)
    f1, f2 = [], []
    other = 0
    for picks in product((False, True), repeat=m):
        chosen = tuple(i for i in range(m) if picks[i])
        comps = _components(len(t.labels), [(t.edges[i].tail, t.edges[i].head) for i in chosen])
        hits = [len(c & targets) for c in comps]
        if all(h == 1 for h in hits):
            f1.append(chosen)
        elif len(comps) == len(targets) + 1 and hits.count(0) == 1 and hits.count(1) == len(targets):
            f2.append(chosen)
        else:
            other += 1
    return Classification(sorted(f1), sorted(f2), other)


def prufer_decode(seq: Sequence[int], n: int) -> list[tuple[int, int]]:
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    edges = []
    for x in seq:
        leaf = min(v for v in range(n) if degree[v] == 1)
        edges.append((leaf, x))
        degree[leaf] -= 1
        degree[x] -= 1
    u, v = (w for w in range(n) if degree[w] == 1)
    edges.append((u, v))
    return edges


def _tree(n: int, pairs, lengths) -> Tree:
    edges = tuple(Edge(min(u, v), max(u, v), Fraction(a)) for (u, v), a in zip(pairs, lengths))
    return Tree(tuple(range(n)), edges)


def iter_labeled_trees(n: int) -> Iterator[Tree]:
    if not 1 <= n <= MAX_EXHAUSTIVE_N:
        raise TooLarge(f"exhaustive generation needs 1 <= n <= {MAX_EXHAUSTIVE_N}")
    if n == 1:
        yield Tree((0,), ())
        return
    for seq in product(range(n), repeat=n - 2):
        yield _tree(n, prufer_decode(seq, n), [1] * (n - 1))


def all_labeled_trees(n: int) -> list[Tree]:
    """Every labeled tree on vertices 0..n-1 with unit lengths (n^(n-2) of them)."""
    return list(iter_labeled_trees(n))


def random_instance(seed: int, max_n: int = 10, max_len: int = 20) -> tuple[Tree, tuple[int, ...]]:
    """Deterministic random tree with rational lengths and a nonempty subset."""
    if max_n < 2:
        raise ValueError("max_n must be at least 2")
    rng = random.Random(seed)
    n = rng.randint(2, max_n)
    seq = [rng.randrange(n) for _ in range(n - 2)]
    lengths = [Fraction(rng.randint(1, max_len), rng.randint(1, max_len)) for _ in range(n - 1)]
    t = _tree(n, prufer_decode(seq, n), lengths)
    mask = rng.randint(1, (1 << n) - 1)
    return t, tuple(v for v in range(n) if mask >> v & 1)


@dataclass
class Corpus:
    trees: list[tuple[Tree, str]] = field(default_factory=list)
    subsets: list[list[tuple[int, ...]]] = field(default_factory=list)

    def __iter__(self):
        for (t, provenance), subs in zip(self.trees, self.subsets):
            for s in subs:
                yield t, s, provenance


def all_nonempty_subsets(n: int) -> list[tuple[int, ...]]:
    return [tuple(v for v in range(n) if mask >> v & 1) for mask in range(1, 1 << n)]


def exhaustive_corpus(max_n: int, min_n: int = 1) -> Corpus:
    corpus = Corpus()
    for n in range(min_n, max_n + 1):
        subs = all_nonempty_subsets(n)
        for t in iter_labeled_trees(n):
            corpus.trees.append((t, f"exhaustive_pruefer({n})"))
            corpus.subsets.append(subs)
    return corpus


def random_corpus(count: int, seed: int, max_n: int = 10, max_len: int = 20) -> Corpus:
    corpus = Corpus()
    for i in range(count):
        t, s = random_instance(seed * 1_000_003 + i, max_n, max_len)
        corpus.trees.append((t, f"random({seed}:{i})"))
        corpus.subsets.append([s])
    return corpus
