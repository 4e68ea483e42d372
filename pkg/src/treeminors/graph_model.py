"""Trees with exact edge lengths, vertex subsets and vertex-set quotients.

Vertices are addressed by index (their position in ``Tree.labels``); labels
are opaque hashable values used only for input and output. A vertex subset is
a sorted tuple of distinct indices, and every matrix or vector indexed by a
subset follows that order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Hashable, Iterable, Sequence

from .errors import (
    BadMomentum,
    DuplicateLabel,
    EmptySubset,
    InvalidEdge,
    InvalidVertex,
    NonPositiveLength,
    NotATree,
    UnknownVertex,
)

VertexSubset = tuple[int, ...]


@dataclass(frozen=True)
class Edge:
    tail: int
    head: int
    length: Fraction


@dataclass(frozen=True, eq=False)
class Tree:
    """A vertex-labeled tree with positive rational edge lengths.

    Use :func:`build_tree` to construct one from labels; the constructor
    itself expects already-validated index data.
    """

    labels: tuple
    edges: tuple[Edge, ...]

    def __eq__(self, other):
        if not isinstance(other, Tree):
            return NotImplemented
        return self.labels == other.labels and self.edges == other.edges

    def __hash__(self):
        return hash((self.labels, self.edges))

    @property
    def n(self) -> int:
        return len(self.labels)

    @cached_property
    def index(self) -> dict:
        return {label: i for i, label in enumerate(self.labels)}

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        """Incident edge indices for every vertex."""
        adj: list[list[int]] = [[] for _ in self.labels]
        for i, e in enumerate(self.edges):
            adj[e.tail].append(i)
            adj[e.head].append(i)
        return tuple(tuple(a) for a in adj)

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self.adjacency)

    @cached_property
    def lengths(self) -> tuple[Fraction, ...]:
        return tuple(e.length for e in self.edges)

    @cached_property
    def total_length(self) -> Fraction:
        return sum(self.lengths, Fraction(0))

    @cached_property
    def length_product(self) -> Fraction:
        p = Fraction(1)
        for a in self.lengths:
            p *= a
        return p

    @cached_property
    def unit_lengths(self) -> bool:
        return all(a == 1 for a in self.lengths)

    @cached_property
    def endpoint_masks(self) -> tuple[int, ...]:
        return tuple((1 << e.tail) | (1 << e.head) for e in self.edges)

    @cached_property
    def head_side_masks(self) -> tuple[int, ...]:
        """Bitmask of the component of G minus e that contains e's head."""
        masks = []
        for i, e in enumerate(self.edges):
            seen = 1 << e.head
            stack = [e.head]
            while stack:
                v = stack.pop()
                for j in self.adjacency[v]:
                    if j == i:
                        continue
                    f = self.edges[j]
                    w = f.head if f.tail == v else f.tail
                    if not seen >> w & 1:
                        seen |= 1 << w
                        stack.append(w)
            masks.append(seen)
        return tuple(masks)

    @cached_property
    def distances(self) -> tuple[tuple[Fraction, ...], ...]:
        """Full distance matrix, each entry a sum of lengths over separating edges."""
        n = self.n
        rows = [[Fraction(0)] * n for _ in range(n)]
        for mask, a in zip(self.head_side_masks, self.lengths):
            inside = [v for v in range(n) if mask >> v & 1]
            outside = [v for v in range(n) if not mask >> v & 1]
            for v in inside:
                row = rows[v]
                for w in outside:
                    row[w] += a
                    rows[w][v] += a
        return tuple(tuple(r) for r in rows)

    def vertex(self, label: Hashable) -> int:
        try:
            return self.index[label]
        except KeyError:
            raise UnknownVertex(f"unknown vertex label {label!r}") from None


def build_tree(labels: Sequence[Hashable], edge_specs: Iterable[tuple]) -> Tree:
    """Validate labels and ``(label, label, length)`` triples into a Tree.

    Edge order is preserved. Each edge is oriented from the endpoint that
    comes first in ``labels`` to the later one.
    """
    labels = tuple(labels)
    index: dict = {}
    for i, label in enumerate(labels):
        if label in index:
            raise DuplicateLabel(f"duplicate vertex label {label!r}")
        index[label] = i
    edges = []
    for a, b, length in edge_specs:
        if a not in index:
            raise UnknownVertex(f"unknown vertex label {a!r}")
        if b not in index:
            raise UnknownVertex(f"unknown vertex label {b!r}")
        length = Fraction(length)
        if length <= 0:
            raise NonPositiveLength(f"edge {a!r}-{b!r} has non-positive length {length}")
        u, v = index[a], index[b]
        if u == v:
            raise NotATree(f"self-loop at {a!r}")
        edges.append(Edge(min(u, v), max(u, v), length))
    n = len(labels)
    if n == 0:
        raise NotATree("a tree needs at least one vertex")
    if len(edges) != n - 1:
        raise NotATree(f"{n} vertices need {n - 1} edges, got {len(edges)}")
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in edges:
        ru, rv = find(e.tail), find(e.head)
        if ru == rv:
            raise NotATree(f"cycle through {labels[e.tail]!r}-{labels[e.head]!r}")
        parent[ru] = rv
    return Tree(labels, tuple(edges))


def make_subset(t: Tree, members: Iterable[int], allow_empty: bool = False) -> VertexSubset:
    """Normalize vertex indices into a sorted duplicate-free subset."""
    s = tuple(sorted(set(members)))
    for v in s:
        if not 0 <= v < t.n:
            raise InvalidVertex(f"vertex index {v} out of range for {t.n} vertices")
    if not s and not allow_empty:
        raise EmptySubset("vertex subset must be nonempty")
    return s


def subset_from_labels(t: Tree, labels: Iterable[Hashable]) -> VertexSubset:
    return make_subset(t, (t.vertex(label) for label in labels))


def subset_mask(s: Iterable[int]) -> int:
    m = 0
    for v in s:
        m |= 1 << v
    return m


def leaves(t: Tree) -> VertexSubset:
    """Vertices of degree at most one (so a single vertex is a leaf)."""
    return tuple(v for v, d in enumerate(t.degrees) if d <= 1)


def _check_edge(t: Tree, e: int) -> None:
    if not 0 <= e < len(t.edges):
        raise InvalidEdge(f"edge index {e} out of range for {len(t.edges)} edges")


def _check_vertex(t: Tree, v: int) -> None:
    if not 0 <= v < t.n:
        raise InvalidVertex(f"vertex index {v} out of range for {t.n} vertices")


def tree_split(t: Tree, e: int) -> tuple[VertexSubset, VertexSubset]:
    """Vertex sets of the two components of ``t`` minus edge ``e``.

    The first component contains the head of ``e``, the second its tail.
    """
    _check_edge(t, e)
    mask = t.head_side_masks[e]
    plus = tuple(v for v in range(t.n) if mask >> v & 1)
    minus = tuple(v for v in range(t.n) if not mask >> v & 1)
    return plus, minus


def separates(t: Tree, e: int, v: int, w: int) -> int:
    _check_edge(t, e)
    _check_vertex(t, v)
    _check_vertex(t, w)
    mask = t.head_side_masks[e]
    return (mask >> v & 1) ^ (mask >> w & 1)


def path_distance(t: Tree, v: int, w: int) -> Fraction:
    _check_vertex(t, v)
    _check_vertex(t, w)
    return sum(
        (a for a, mask in zip(t.lengths, t.head_side_masks) if (mask >> v & 1) != (mask >> w & 1)),
        Fraction(0),
    )


def distance_submatrix(t: Tree, s: VertexSubset) -> list[list[Fraction]]:
    if not s:
        raise EmptySubset("D[S] needs a nonempty subset")
    d = t.distances
    return [[d[v][w] for w in s] for v in s]


def convex_hull(t: Tree, s: VertexSubset) -> Tree:
    """Smallest subtree containing ``s``, with inherited labels and lengths.

    Vertex and edge order are inherited from ``t``.
    """
    if not s:
        raise EmptySubset("convex hull of an empty set")
    keep = [True] * t.n
    deg = list(t.degrees)
    target = set(s)
    stack = [v for v in range(t.n) if deg[v] <= 1 and v not in target]
    while stack:
        v = stack.pop()
        if not keep[v]:
            continue
        keep[v] = False
        for j in t.adjacency[v]:
            e = t.edges[j]
            w = e.head if e.tail == v else e.tail
            if keep[w]:
                deg[w] -= 1
                if deg[w] <= 1 and w not in target:
                    stack.append(w)
    new_index = {}
    for v in range(t.n):
        if keep[v]:
            new_index[v] = len(new_index)
    labels = tuple(t.labels[v] for v in new_index)
    edges = tuple(
        Edge(new_index[e.tail], new_index[e.head], e.length)
        for e in t.edges
        if keep[e.tail] and keep[e.head]
    )
    return Tree(labels, edges)


def restrict_subset(t: Tree, sub: Tree, s: VertexSubset) -> VertexSubset:
    """Re-index a subset of ``t`` into a subtree ``sub`` sharing its labels."""
    return make_subset(sub, (sub.vertex(t.labels[v]) for v in s))


@dataclass(frozen=True)
class Multigraph:
    """Graph with parallel edges and self-loops; edge identity is list position."""

    labels: tuple
    edges: tuple[Edge, ...]

    @property
    def n(self) -> int:
        return len(self.labels)

    @cached_property
    def lengths(self) -> tuple[Fraction, ...]:
        return tuple(e.length for e in self.edges)

    @cached_property
    def loops(self) -> tuple[int, ...]:
        return tuple(i for i, e in enumerate(self.edges) if e.tail == e.head)


@dataclass(frozen=True)
class MomentumFunction:
    """Vertex values (ints or Fractions) on a multigraph summing to exactly zero."""

    values: tuple[Fraction, ...]

    def __post_init__(self):
        total = sum(self.values)
        if total != 0:
            raise BadMomentum(f"momentum values sum to {total}, not 0")


def quotient(t: Tree, s: VertexSubset) -> tuple[Multigraph, int]:
    """Glue the vertices of ``s`` into one vertex, which gets index 0.

    Remaining vertices keep their relative order. Edge ``i`` of the quotient is
    edge ``i`` of ``t``; an edge with both ends in ``s`` becomes a self-loop.
    """
    if not s:
        raise EmptySubset("quotient by an empty set")
    in_s = set(s)
    new_index = {v: 0 for v in s}
    labels = [tuple(t.labels[v] for v in s)]
    for v in range(t.n):
        if v not in in_s:
            new_index[v] = len(labels)
            labels.append(t.labels[v])
    edges = tuple(Edge(new_index[e.tail], new_index[e.head], e.length) for e in t.edges)
    return Multigraph(tuple(labels), edges), 0


def canonical_momentum(t: Tree, s: VertexSubset) -> MomentumFunction:
    """deg(v) - 2 off the glued set, balanced at the glued vertex (index 0)."""
    if not s:
        raise EmptySubset("canonical momentum needs a nonempty subset")
    in_s = set(s)
    rest = [t.degrees[v] - 2 for v in range(t.n) if v not in in_s]
    return MomentumFunction((-sum(rest), *rest))
