"""S-rooted and (S,*)-rooted spanning forests of a tree.

For a nonempty vertex set S, an S-rooted spanning forest has exactly one
vertex of S in each component. An (S,*)-rooted spanning forest has one more
component, the floating one, which contains no vertex of S. Every edge subset
of a tree is acyclic, so a forest is identified by its edge set.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import product
from typing import Iterator

from .errors import EmptySubset, InputError, InvalidEdge, NoSuchRoot, TooLarge
from .exact_linalg import determinant, laplacian_minor
from .graph_model import Tree, VertexSubset, subset_mask

STAR = "*"


class ForestKind(str, Enum):
    S_ROOTED = "S_rooted"
    S_STAR_ROOTED = "S_star_rooted"


def _bits(mask: int) -> tuple[int, ...]:
    out = []
    v = 0
    while mask:
        if mask & 1:
            out.append(v)
        mask >>= 1
        v += 1
    return tuple(out)


@dataclass(frozen=True, eq=False)
class SpanningForest:
    """A rooted spanning forest of ``owner``.

    ``component_masks`` are vertex bitmasks, ordered like ``roots``: the S
    vertices ascending, then ``STAR`` for the floating component if present.
    """

    owner: Tree
    subset: VertexSubset
    edge_set: tuple[int, ...]
    component_masks: tuple[int, ...]
    roots: tuple
    kind: ForestKind

    def __eq__(self, other):
        if not isinstance(other, SpanningForest):
            return NotImplemented
        return (
            self.owner is other.owner or self.owner == other.owner
        ) and self.subset == other.subset and self.edge_set == other.edge_set

    def __hash__(self):
        return hash((self.subset, self.edge_set))

    def __repr__(self):
        return f"SpanningForest({self.kind.value}, edges={self.edge_set}, roots={self.roots})"

    @property
    def components(self) -> tuple[tuple[int, ...], ...]:
        return tuple(_bits(c) for c in self.component_masks)

    @cached_property
    def edge_mask(self) -> int:
        return sum(1 << e for e in self.edge_set)

    @cached_property
    def weight(self) -> Fraction:
        w = Fraction(1)
        lengths = self.owner.lengths
        mask = self.edge_mask
        for i, a in enumerate(lengths):
            if not mask >> i & 1:
                w *= a
        return w

    @cached_property
    def outdegrees(self) -> tuple[int, ...]:
        """Boundary size in the owner tree of each component, aligned with roots."""
        ends = self.owner.endpoint_masks
        out = []
        for c in self.component_masks:
            out.append(sum(1 for em in ends if em & c and em & ~c))
        return tuple(out)

    def component_of(self, root) -> int:
        try:
            return self.roots.index(root)
        except ValueError:
            raise NoSuchRoot(f"forest has no component rooted at {root!r}") from None

    def floating_mask(self) -> int:
        return self.component_masks[self.component_of(STAR)]


@dataclass(frozen=True)
class ForestFamily:
    kind: ForestKind
    forests: tuple[SpanningForest, ...]

    def __len__(self) -> int:
        return len(self.forests)

    def __iter__(self) -> Iterator[SpanningForest]:
        return iter(self.forests)


def _make_forest(t: Tree, s: VertexSubset, smask: int, edge_set, comps) -> SpanningForest | None:
    rooted = []
    floating = []
    for c in comps:
        hit = c & smask
        if not hit:
            floating.append(c)
        elif hit & (hit - 1):
            return None
        else:
            rooted.append((hit.bit_length() - 1, c))
    if len(floating) > 1:
        return None
    rooted.sort()
    roots = tuple(r for r, _ in rooted)
    masks = tuple(c for _, c in rooted)
    if floating:
        return SpanningForest(
            t, s, tuple(edge_set), masks + (floating[0],), roots + (STAR,), ForestKind.S_STAR_ROOTED
        )
    return SpanningForest(t, s, tuple(edge_set), masks, roots, ForestKind.S_ROOTED)


def forest_from_edges(t: Tree, s: VertexSubset, edge_set) -> SpanningForest:
    """Classify an arbitrary edge set; raises if it is neither kind of rooted forest."""
    if not s:
        raise EmptySubset("rooted forests need a nonempty subset")
    edge_set = tuple(sorted(set(edge_set)))
    for e in edge_set:
        if not 0 <= e < len(t.edges):
            raise InvalidEdge(f"edge index {e} out of range")
    comps = [1 << v for v in range(t.n)]
    for e in edge_set:
        edge = t.edges[e]
        cu = next(c for c in comps if c >> edge.tail & 1)
        cv = next(c for c in comps if c >> edge.head & 1)
        comps.remove(cu)
        comps.remove(cv)
        comps.append(cu | cv)
    f = _make_forest(t, s, subset_mask(s), edge_set, comps)
    if f is None:
        raise InputError(f"edge set {edge_set} is not an S-rooted or (S,*)-rooted forest")
    return f


@lru_cache(maxsize=512)
def _search(t: Tree, s: VertexSubset) -> tuple[tuple[SpanningForest, ...], tuple[SpanningForest, ...]]:
    smask = subset_mask(s)
    ends = [(e.tail, e.head) for e in t.edges]
    m = len(ends)
    f1: list[SpanningForest] = []
    f2: list[SpanningForest] = []
    chosen: list[int] = []

    def rec(i: int, comps: list[int]) -> None:
        if i == m:
            f = _make_forest(t, s, smask, chosen, comps)
            if f is not None:
                (f1 if f.kind is ForestKind.S_ROOTED else f2).append(f)
            return
        u, v = ends[i]
        cu = cv = 0
        for c in comps:
            if c >> u & 1:
                cu = c
            elif c >> v & 1:
                cv = c
        # two S vertices in one component can never be separated again
        if not (cu & smask and cv & smask):
            merged = [c for c in comps if c != cu and c != cv]
            merged.append(cu | cv)
            chosen.append(i)
            rec(i + 1, merged)
            chosen.pop()
        rec(i + 1, comps)

    rec(0, [1 << v for v in range(t.n)])
    f1.sort(key=lambda f: f.edge_set)
    f2.sort(key=lambda f: f.edge_set)
    return tuple(f1), tuple(f2)


def enumerate_forests(t: Tree, s: VertexSubset, kind: ForestKind | str) -> ForestFamily:
    """All forests of the requested kind, ordered lexicographically by edge set."""
    if not s:
        raise EmptySubset("rooted forests need a nonempty subset")
    kind = ForestKind(kind)
    f1, f2 = _search(t, tuple(s))
    return ForestFamily(kind, f1 if kind is ForestKind.S_ROOTED else f2)


def forest_weight(f: SpanningForest) -> Fraction:
    """Product of the lengths of the edges the forest leaves out."""
    return f.weight


def outdegree(t: Tree, f: SpanningForest, root) -> int:
    if f.owner != t:
        raise InputError("forest belongs to a different tree")
    return f.outdegrees[f.component_of(root)]


def outdegree_histogram(t: Tree, s: VertexSubset) -> dict[int, Fraction]:
    """Total weight of (S,*)-rooted forests, bucketed by floating-component outdegree."""
    hist: dict[int, Fraction] = {}
    for f in enumerate_forests(t, s, ForestKind.S_STAR_ROOTED):
        k = f.outdegrees[-1]
        hist[k] = hist.get(k, Fraction(0)) + f.weight
    return dict(sorted(hist.items()))


def outdegree_counts(t: Tree, s: VertexSubset) -> dict[int, int]:
    c = Counter(f.outdegrees[-1] for f in enumerate_forests(t, s, ForestKind.S_STAR_ROOTED))
    return dict(sorted(c.items()))


def kappa(t: Tree, s: VertexSubset, method: str = "enumeration") -> Fraction:
    """Weighted count of S-rooted spanning forests.

    ``method="matrix_tree"`` uses (product of lengths) * det L[complement of S].
    """
    if not s:
        raise EmptySubset("kappa needs a nonempty subset")
    if method == "enumeration":
        return sum((f.weight for f in enumerate_forests(t, s, ForestKind.S_ROOTED)), Fraction(0))
    if method == "matrix_tree":
        return t.length_product * determinant(laplacian_minor(t, s))
    raise ValueError(f"unknown kappa method {method!r}")


def delete_edge_map(e: int, f: SpanningForest) -> SpanningForest:
    """T -> T minus e when e is in T, otherwise T unchanged."""
    t = f.owner
    if not 0 <= e < len(t.edges):
        raise InvalidEdge(f"edge index {e} out of range")
    if f.kind is not ForestKind.S_ROOTED:
        raise InputError("deletion map is defined on S-rooted forests")
    if e not in f.edge_set:
        return f
    return forest_from_edges(t, f.subset, (x for x in f.edge_set if x != e))


def floating_boundary(f: SpanningForest) -> tuple[int, ...]:
    """Edges of the owner tree with exactly one end in the floating component."""
    c = f.floating_mask()
    return tuple(i for i, em in enumerate(f.owner.endpoint_masks) if em & c and em & ~c)


def union_edge_map(e: int, f: SpanningForest) -> SpanningForest:
    """F -> F plus e when e leaves the floating component, otherwise F unchanged."""
    t = f.owner
    if not 0 <= e < len(t.edges):
        raise InvalidEdge(f"edge index {e} out of range")
    if f.kind is not ForestKind.S_STAR_ROOTED:
        raise InputError("union map is defined on (S,*)-rooted forests")
    if e not in floating_boundary(f):
        return f
    return forest_from_edges(t, f.subset, f.edge_set + (e,))


# Batched statistics ---------------------------------------------------------
#
# Every edge subset A of a tree is a forest. A is S-rooted exactly when S picks
# one vertex from each component of A, and (S,*)-rooted when S picks one vertex
# from every component but one. Walking the 2^(n-1) edge subsets once and
# expanding those choices therefore yields the forest data of every S at once.

TABLE_MAX_N = 10


@dataclass(frozen=True)
class ForestStats:
    """Aggregate forest data for one subset; ``m`` follows subset order.

    Integer-valued quantities from the batched table are plain ints.
    """

    kappa: Fraction
    f1_count: int
    f2_count: int
    histogram: dict[int, Fraction]
    counts: dict[int, int]
    m: tuple[Fraction, ...]

    @property
    def penalty(self) -> Fraction:
        return sum((w * (d - 2) ** 2 for d, w in self.histogram.items()), Fraction(0))

    @property
    def outdegree_total(self) -> int:
        return sum(d * c for d, c in self.counts.items())


def _compact(x: Fraction):
    return x.numerator if x.denominator == 1 else x


def _edge_subsets(n: int, edges: tuple) -> list[tuple[int, tuple[int, ...]]]:
    """(edge mask, component masks) for every edge subset."""
    ends = [(e.tail, e.head) for e in edges]
    m = len(ends)
    out = []

    def rec(i: int, used: int, comps: list[int]) -> None:
        if i == m:
            out.append((used, tuple(comps)))
            return
        u, v = ends[i]
        cu = cv = 0
        for c in comps:
            if c >> u & 1:
                cu = c
            elif c >> v & 1:
                cv = c
        merged = [c for c in comps if c != cu and c != cv]
        merged.append(cu | cv)
        rec(i + 1, used | 1 << i, merged)
        rec(i + 1, used, comps)

    rec(0, 0, [1 << v for v in range(n)])
    return out


def _choices(comps) -> list[list[int]]:
    """For each component, the vertices it could contribute to S (as bits)."""
    return [[1 << v for v in _bits(c)] for c in comps]


def forest_entries(t: Tree):
    """Yield ``(edge_mask, subset_mask, weight, outdegrees, chosen_bits, floating)``.

    One item per (forest, S) pair with the forest S-rooted or (S,*)-rooted.
    ``outdegrees`` and ``chosen_bits`` are aligned with the components of the
    forest; ``floating`` is the index of the floating component or -1.
    """
    lengths = [_compact(a) for a in t.lengths]
    ends = t.endpoint_masks
    for used, comps in _edge_subsets(t.n, t.edges):
        w = 1
        for i, a in enumerate(lengths):
            if not used >> i & 1:
                w *= a
        cut = [em for i, em in enumerate(ends) if not used >> i & 1]
        outdeg = tuple(sum(1 for em in cut if em & c and em & ~c) for c in comps)
        picks = _choices(comps)
        for combo in product(*picks):
            yield used, sum(combo), w, outdeg, combo, -1
        for f in range(len(comps)):
            rest = picks[:f] + [[0]] + picks[f + 1:]
            for combo in product(*rest):
                yield used, sum(combo), w, outdeg, combo, f


@lru_cache(maxsize=4096)
def _table(n: int, edges: tuple) -> dict[int, ForestStats]:
    # keyed on structure only: labels never enter the forest data
    kappa = [0] * (1 << n)
    f1 = [0] * (1 << n)
    f2 = [0] * (1 << n)
    hist: list[dict] = [dict() for _ in range(1 << n)]
    counts: list[dict] = [dict() for _ in range(1 << n)]
    mvec = [[0] * n for _ in range(1 << n)]
    probe = Tree(tuple(range(n)), edges)
    for _used, smask, w, outdeg, combo, floating in forest_entries(probe):
        if floating < 0:
            kappa[smask] += w
            f1[smask] += 1
            row = mvec[smask]
            for bit, d in zip(combo, outdeg):
                row[bit.bit_length() - 1] += w * (2 - d)
        else:
            d = outdeg[floating]
            f2[smask] += 1
            h = hist[smask]
            h[d] = h.get(d, 0) + w
            c = counts[smask]
            c[d] = c.get(d, 0) + 1
    table = {}
    for smask in range(1, 1 << n):
        verts = _bits(smask)
        row = mvec[smask]
        table[smask] = ForestStats(
            kappa[smask],
            f1[smask],
            f2[smask],
            dict(sorted(hist[smask].items())),
            dict(sorted(counts[smask].items())),
            tuple(row[v] for v in verts),
        )
    return table


def forest_table(t: Tree) -> dict[int, ForestStats]:
    """Forest statistics for every nonempty subset, keyed by subset bitmask."""
    if t.n > TABLE_MAX_N:
        raise TooLarge(f"batched forest tables are capped at {TABLE_MAX_N} vertices")
    return _table(t.n, t.edges)


def stats_by_enumeration(t: Tree, s: VertexSubset) -> ForestStats:
    """The same statistics built from the explicit forest lists."""
    f1 = enumerate_forests(t, s, ForestKind.S_ROOTED)
    f2 = enumerate_forests(t, s, ForestKind.S_STAR_ROOTED)
    m = [Fraction(0)] * len(s)
    for f in f1:
        for i, d in enumerate(f.outdegrees):
            m[i] += f.weight * (2 - d)
    return ForestStats(
        kappa(t, s),
        len(f1),
        len(f2),
        outdegree_histogram(t, s),
        outdegree_counts(t, s),
        tuple(m),
    )


def forest_stats(t: Tree, s: VertexSubset) -> ForestStats:
    if not s:
        raise EmptySubset("forest statistics need a nonempty subset")
    if t.n <= TABLE_MAX_N:
        return forest_table(t)[subset_mask(s)]
    return stats_by_enumeration(t, tuple(s))
