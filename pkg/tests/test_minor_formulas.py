from fractions import Fraction

import pytest
from hypothesis import given, settings

from conftest import two_hub_tree, star3, tree_and_subset
from treeminors.errors import (
    Disconnected,
    EmptySubset,
    NotNested,
    NotUnitLengths,
    SubsetTooSmall,
    TooSmall,
)
from treeminors.exact_linalg import Inertia, determinant
from treeminors.graph_model import (
    Edge,
    MomentumFunction,
    Multigraph,
    build_tree,
    canonical_momentum,
    distance_submatrix,
    leaves,
    quotient,
)
from treeminors.minor_formulas import (
    analyze,
    cofactor_identity,
    dld_identity_check,
    equilibrium_vector,
    graham_pollak_det,
    gutierrez_lillo_form,
    hull_formula,
    monotonicity_check,
    normalized_minor,
    optimize_quadratic,
    principal_minor_formula,
    quadratic_form,
    quotient_symanzik,
    ratio_bounds,
    symanzik_by_laplacian,
    symanzik_det_identity,
    symanzik_first,
    symanzik_second,
    weighted_full_det,
)


@given(tree_and_subset(max_n=8))
@settings(max_examples=60, deadline=None)
def test_analyze_runs_every_check(ts):
    t, s = ts
    report = analyze(t, s)
    assert report.det_formula == report.det_direct == determinant(distance_submatrix(t, s))
    assert "cofactor_identity" in report.checks and "symanzik" in " ".join(report.checks)


@given(tree_and_subset(max_n=7))
@settings(max_examples=60, deadline=None)
def test_three_symanzik_routes(ts):
    t, s = ts
    g, _ = quotient(t, s)
    p = canonical_momentum(t, s)
    by_forests = (symanzik_first(g), symanzik_second(g, p))
    assert symanzik_by_laplacian(g, p) == by_forests == quotient_symanzik(t, s)


def test_two_hub_symanzik():
    t = two_hub_tree()
    rec = symanzik_det_identity(t, leaves(t))
    assert (rec.psi, rec.phi, rec.det, rec.ratio) == (11, 20, 368, Fraction(23, 11))


def test_symanzik_rejects_disconnected_graph():
    g = Multigraph(("a", "b", "c"), (Edge(0, 1, Fraction(1)),))
    with pytest.raises(Disconnected):
        symanzik_by_laplacian(g, MomentumFunction((1, -1, 0)))


def test_single_vertex_subset():
    t = star3(1, 2, 3)
    assert principal_minor_formula(t, (0,)) == 0
    assert cofactor_identity(t, (0,)) == 1
    assert normalized_minor(t, (0,)) == 0
    with pytest.raises(SubsetTooSmall):
        ratio_bounds(t, (0,))


def test_whole_vertex_set_is_allowed():
    t = two_hub_tree()
    s = tuple(range(t.n))
    assert principal_minor_formula(t, s) == weighted_full_det(t) == graham_pollak_det(7)
    assert analyze(t, s).f2_count == 0


@given(tree_and_subset(max_n=7, min_k=2))
@settings(max_examples=50, deadline=None)
def test_optimum_and_bounds(ts):
    t, s = ts
    u, value = optimize_quadratic(t, s)
    d = distance_submatrix(t, s)
    assert quadratic_form(d, u) == value == normalized_minor(t, s)
    lower, upper = ratio_bounds(t, s)
    assert lower <= value <= upper <= t.total_length / 2
    assert hull_formula(t, s) == principal_minor_formula(t, s)
    assert analyze(t, s).inertia == Inertia(1, len(s) - 1, 0)


@given(tree_and_subset(max_n=7, unit=True))
@settings(max_examples=50, deadline=None)
def test_gutierrez_lillo(ts):
    t, s = ts
    assert gutierrez_lillo_form(t, s) == principal_minor_formula(t, s)


def test_gutierrez_lillo_needs_unit_lengths():
    with pytest.raises(NotUnitLengths):
        gutierrez_lillo_form(star3(1, 2, 1), (0, 1))


def test_monotonicity_arguments():
    t = two_hub_tree()
    ra, rb = monotonicity_check(t, (0, 1), (0, 1, 2))
    assert ra <= rb
    with pytest.raises(NotNested):
        monotonicity_check(t, (0, 3), (0, 1))
    with pytest.raises(EmptySubset):
        monotonicity_check(t, (), (0, 1))


def test_equilibrium_three_leaf_star():
    a, b, c = Fraction(3, 2), Fraction(5), Fraction(1, 3)
    ev = equilibrium_vector(star3(a, b, c), (0, 1, 2))
    assert ev.values == (a * b + a * c, a * b + b * c, a * c + b * c)


def test_dld_identities():
    assert dld_identity_check(star3(Fraction(1, 2), 3, 7)) == {"dld": True, "dm": True, "inverse": True}
    with pytest.raises(TooSmall):
        dld_identity_check(build_tree(["x"], []))
