from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings

from conftest import two_hub_tree, star3, tree_and_subset
from treeminors.errors import EmptySubset, InputError, InvalidEdge, NoSuchRoot, TooLarge
from treeminors.forest_enum import (
    STAR,
    ForestKind,
    delete_edge_map,
    enumerate_forests,
    floating_boundary,
    forest_from_edges,
    forest_stats,
    forest_table,
    kappa,
    outdegree,
    outdegree_counts,
    outdegree_histogram,
    stats_by_enumeration,
    union_edge_map,
)
from treeminors.graph_model import leaves
from treeminors.oracle import all_labeled_trees, all_nonempty_subsets, classify_all_subsets, random_instance


def _edge_sets(t, s, kind):
    return [f.edge_set for f in enumerate_forests(t, s, kind)]


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_enumeration_matches_powerset_oracle(n):
    for t in all_labeled_trees(n):
        for s in all_nonempty_subsets(n):
            ref = classify_all_subsets(t, s)
            assert _edge_sets(t, s, ForestKind.S_ROOTED) == ref.f1
            assert _edge_sets(t, s, ForestKind.S_STAR_ROOTED) == ref.f2


@pytest.mark.parametrize("seed", range(25))
def test_enumeration_matches_oracle_on_random_trees(seed):
    t, s = random_instance(seed, max_n=9)
    ref = classify_all_subsets(t, s)
    assert _edge_sets(t, s, ForestKind.S_ROOTED) == ref.f1
    assert _edge_sets(t, s, ForestKind.S_STAR_ROOTED) == ref.f2
    assert len(ref.f1) + len(ref.f2) + ref.other == 2 ** len(t.edges)


def test_two_hub_counts():
    t = two_hub_tree()
    s = leaves(t)
    assert len(enumerate_forests(t, s, "S_rooted")) == 11
    assert len(enumerate_forests(t, s, "S_star_rooted")) == 6
    assert outdegree_histogram(t, s) == {3: 3, 4: 2, 5: 1}
    assert outdegree_counts(t, s) == {3: 3, 4: 2, 5: 1}


def test_star_weights():
    a, b, c = Fraction(2), Fraction(3, 5), Fraction(7)
    t = star3(a, b, c)
    s = leaves(t)
    f2 = enumerate_forests(t, s, ForestKind.S_STAR_ROOTED)
    edgeless = next(f for f in f2 if f.edge_set == ())
    assert edgeless.weight == a * b * c
    only_a = next(f for f in enumerate_forests(t, s, ForestKind.S_ROOTED) if f.edge_set == (0,))
    assert only_a.weight == b * c
    assert kappa(t, s) == a * b + a * c + b * c == kappa(t, s, method="matrix_tree")


@given(tree_and_subset(max_n=8))
@settings(max_examples=80, deadline=None)
def test_kappa_routes_agree(ts):
    t, s = ts
    assert kappa(t, s) == kappa(t, s, method="matrix_tree")


@given(tree_and_subset(max_n=8))
@settings(max_examples=80, deadline=None)
def test_table_matches_enumeration(ts):
    t, s = ts
    assert forest_stats(t, s) == stats_by_enumeration(t, s)


@given(tree_and_subset(max_n=8, min_k=1))
@settings(max_examples=60, deadline=None)
def test_transition_maps(ts):
    t, s = ts
    f1 = enumerate_forests(t, s, ForestKind.S_ROOTED)
    f2 = enumerate_forests(t, s, ForestKind.S_STAR_ROOTED)
    deleted = Counter(delete_edge_map(e, T).edge_set for T in f1 for e in T.edge_set)
    for F in f2:
        assert deleted[F.edge_set] == outdegree(t, F, STAR) == len(floating_boundary(F))
        for e in floating_boundary(F):
            T = union_edge_map(e, F)
            assert T.kind is ForestKind.S_ROOTED
            assert F.weight == t.edges[e].length * T.weight
    grown = Counter(union_edge_map(e, F).edge_set for F in f2 for e in floating_boundary(F))
    for T in f1:
        assert grown[T.edge_set] == t.n - len(s)
    assert sum(F.outdegrees[-1] for F in f2) == (t.n - len(s)) * len(f1)


def test_maps_leave_other_edges_alone():
    t = two_hub_tree()
    s = leaves(t)
    T = enumerate_forests(t, s, ForestKind.S_ROOTED).forests[0]
    missing = next(e for e in range(6) if e not in T.edge_set)
    assert delete_edge_map(missing, T) is T
    F = next(f for f in enumerate_forests(t, s, ForestKind.S_STAR_ROOTED))
    inside = next((e for e in range(6) if e not in floating_boundary(F)), None)
    if inside is not None:
        assert union_edge_map(inside, F) is F


def test_forest_errors():
    t = two_hub_tree()
    s = leaves(t)
    with pytest.raises(EmptySubset):
        enumerate_forests(t, (), ForestKind.S_ROOTED)
    with pytest.raises(InputError):
        forest_from_edges(t, s, range(6))
    with pytest.raises(InvalidEdge):
        forest_from_edges(t, s, [9])
    T = enumerate_forests(t, s, ForestKind.S_ROOTED).forests[0]
    with pytest.raises(NoSuchRoot):
        outdegree(t, T, STAR)
    with pytest.raises(InputError):
        union_edge_map(0, T)
    with pytest.raises(ValueError):
        kappa(t, s, method="guess")


def test_table_cap():
    from treeminors.oracle import _tree
    big = _tree(11, [(i, i + 1) for i in range(10)], [1] * 10)
    with pytest.raises(TooLarge):
        forest_table(big)
    assert forest_stats(big, (0, 10)).f1_count == 10
