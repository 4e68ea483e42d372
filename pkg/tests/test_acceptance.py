"""The fifteen acceptance criteria, all at exact rational equality.

Criteria 6-12, 14 and 15 share one sweep: every labeled tree with up to seven
vertices against every nonempty subset at unit lengths, plus 200 seeded
random instances with rational lengths. The sweep fans out over
``os.cpu_count()`` processes; the merge is order-stable.
"""

from __future__ import annotations

import os
import random
from fractions import Fraction

import pytest

from conftest import FIVE_LEAF_NEWICK, two_hub_tree, four_leaf, record, star3
from treeminors.exact_linalg import determinant
from treeminors.forest_enum import ForestKind, enumerate_forests
from treeminors.formats import parse_newick
from treeminors.graph_model import distance_submatrix, leaves
from treeminors.minor_formulas import (
    analyze,
    equilibrium_vector,
    graham_pollak_det,
    normalized_minor,
    symanzik_det_identity,
    weighted_full_det,
)
from treeminors.oracle import iter_labeled_trees, random_corpus, random_instance
from treeminors.verify import optimization_sweep, verify_exhaustive, verify_random

EXHAUSTIVE_N = 7
RANDOM_COUNT = 200
RANDOM_SEED = 2026
WORKERS = os.cpu_count() or 1


def _rational(rng):
    return Fraction(rng.randint(1, 30), rng.randint(1, 30))


@pytest.fixture(scope="session")
def sweeps():
    return (
        verify_exhaustive(EXHAUSTIVE_N, workers=WORKERS),
        verify_random(RANDOM_COUNT, RANDOM_SEED, workers=WORKERS),
    )


def _families(sweeps, *names, exhaustive_only=False):
    """(all passed, detail) for the named families over both corpora."""
    parts = sweeps[:1] if exhaustive_only else sweeps
    ok = True
    bits = []
    for name in names:
        checked = sum(p.families[name].checked for p in parts)
        failed = sum(p.families[name].failed for p in parts)
        ok &= checked > 0 and failed == 0
        bits.append(f"{name} {checked - failed}/{checked}")
    return ok, ", ".join(bits)


def _dumps(sweeps, *names):
    return [c.to_json() for p in sweeps for n in names for c in p.families[n].dumps]


def test_c01_five_leaf_newick():
    t, s = parse_newick(FIVE_LEAF_NEWICK)
    assert s == leaves(t)
    r = analyze(t, s)
    f2 = enumerate_forests(t, s, ForestKind.S_STAR_ROOTED)
    penalty = sum(w * (d - 2) ** 2 for d, w in r.histogram.items())
    arithmetic = 2**3 * (t.total_length * r.kappa - penalty)
    ok = (
        r.det_formula == r.det_direct == 864
        and r.kappa == 21
        and len(f2) == r.f2_count == 19
        and r.histogram == {3: 14, 4: 4, 5: 1}
        and (t.total_length, penalty) == (7, 39)
        and arithmetic == 864
    )
    record(1, "five-leaf Newick tree", ok, f"det={r.det_formula} kappa={r.kappa} |F2|={len(f2)}")
    assert ok


def test_c02_two_hub_tree():
    t = two_hub_tree()
    s = leaves(t)
    r = analyze(t, s)
    ok = (
        r.det_direct == r.det_formula == 368
        and r.f1_count == 11
        and r.f2_count == 6
        and r.histogram == {3: 3, 4: 2, 5: 1}
        and r.m == (5, 5, 4, 4, 4)
        and r.cof == 176
        and r.lam == 46
        and r.ratio == Fraction(23, 11)
        and r.lam / sum(r.m) == Fraction(46, 22) == r.ratio
    )
    record(2, "two-hub five-leaf tree", ok, f"det={r.det_direct} ratio={r.ratio}")
    assert ok


def test_c03_three_leaf_star():
    rng = random.Random(RANDOM_SEED + 3)
    bad = []
    for _ in range(10):
        a, b, c = (_rational(rng) for _ in range(3))
        t = star3(a, b, c)
        s = leaves(t)
        det = determinant(distance_submatrix(t, s))
        formula = analyze(t, s).det_formula
        m = equilibrium_vector(t, s).values
        if not (det == formula == 2 * (a + b) * (a + c) * (b + c)
                and m == (a * b + a * c, a * b + b * c, a * c + b * c)):
            bad.append((a, b, c))
    record(3, "three-leaf star at 10 rational points", not bad, f"{10 - len(bad)}/10 points")
    assert not bad


def test_c04_four_leaf_closed_form():
    rng = random.Random(RANDOM_SEED + 4)
    bad = []
    for _ in range(10):
        a, b, c, d, e = (_rational(rng) for _ in range(5))
        t = four_leaf(a, b, c, d, e)
        num = a * b * c * d + a * b * c * e + a * c * d * e + b * c * d * e + 4 * a * b * d * e
        den = a*b*d + a*b*e + a*c*d + a*c*e + a*d*e + b*c*d + b*c*e + b*d*e
        closed = Fraction(1, 2) * ((a + b + c + d + e) - num / den)
        if normalized_minor(t, leaves(t)) != closed:
            bad.append((a, b, c, d, e))
    record(4, "four-leaf closed form at 10 rational points", not bad, f"{10 - len(bad)}/10 points")
    assert not bad


def test_c05_full_determinant_closed_forms():
    checked = failed = 0
    for n in range(1, EXHAUSTIVE_N + 1):
        gp = graham_pollak_det(n)
        for t in iter_labeled_trees(n):
            d = [list(r) for r in t.distances]
            det = determinant(d)
            checked += 1
            failed += not (det == gp == weighted_full_det(t))
    for t, _, _ in random_corpus(100, RANDOM_SEED + 5, max_n=10):
        det = determinant([list(r) for r in t.distances])
        sign = (-1) ** (t.n - 1)
        bkn = sign * Fraction(2) ** (t.n - 2) * t.total_length * t.length_product
        checked += 1
        failed += not (det == bkn == weighted_full_det(t))
    record(5, "full-matrix determinant closed forms", failed == 0, f"{checked - failed}/{checked} trees")
    assert failed == 0 and checked == 1 + 1 + 3 + 16 + 125 + 1296 + 16807 + 100


def test_c06_oracle_equivalence(sweeps):
    ok, detail = _families(sweeps, "oracle_equivalence")
    record(6, "forest formula = elimination = Laplace expansion", ok, detail)
    assert ok, _dumps(sweeps, "oracle_equivalence")


def test_c07_cofactor_and_equilibrium(sweeps):
    ok, detail = _families(sweeps, "cofactor_identity", "equilibrium", "ratio_consistency")
    record(7, "cofactor identity and equilibrium vector", ok, detail)
    assert ok, _dumps(sweeps, "cofactor_identity", "equilibrium", "ratio_consistency")


def test_c08_inertia(sweeps):
    ok, detail = _families(sweeps, "inertia", exhaustive_only=True)
    expected = sum(n ** max(n - 2, 0) * (2**n - 1 - n) for n in range(2, EXHAUSTIVE_N + 1))
    ok &= sweeps[0].families["inertia"].checked == expected
    record(8, "inertia (1, |S|-1, 0)", ok, detail)
    assert ok, _dumps(sweeps, "inertia")


def test_c09_monotonicity_and_bounds(sweeps):
    ok_m, detail_m = _families(sweeps, "monotonicity", exhaustive_only=True)
    ok_b, detail_b = _families(sweeps, "bounds")
    record(9, "monotonicity and ratio bounds", ok_m and ok_b, f"{detail_m}, {detail_b}")
    assert ok_m and ok_b, _dumps(sweeps, "monotonicity", "bounds")


def test_c10_symanzik(sweeps):
    ok, detail = _families(sweeps, "symanzik")
    t = two_hub_tree()
    rec = symanzik_det_identity(t, leaves(t))
    ok &= (rec.psi, rec.phi) == (11, 20)
    record(10, "Symanzik polynomials of the quotient", ok, f"{detail}, example psi={rec.psi} phi={rec.phi}")
    assert ok, _dumps(sweeps, "symanzik")


def test_c11_distance_laplacian(sweeps):
    ok, detail = _families(sweeps, "distance_laplacian")
    record(11, "distance/Laplacian matrix identities", ok, detail)
    assert ok, _dumps(sweeps, "distance_laplacian")


def test_c12_transition_counts(sweeps):
    ok, detail = _families(sweeps, "transition_counts", exhaustive_only=True)
    record(12, "deletion and union preimage counts", ok, detail)
    assert ok, _dumps(sweeps, "transition_counts")


def test_c13_quadratic_optimum():
    picks = [random_instance(RANDOM_SEED * 1_000_003 + i) for i in range(50)]
    result = optimization_sweep(picks, perturbations=50, seed=RANDOM_SEED)
    ok = result.ok and result.checked == 50
    record(13, "quadratic optimum and perturbations", ok, f"{result.checked - result.failed}/{result.checked}")
    assert ok, result.to_json()


def test_c14_gutierrez_lillo(sweeps):
    ok, detail = _families(sweeps, "gutierrez_lillo")
    record(14, "unit-length restated formula", ok, detail)
    assert ok, _dumps(sweeps, "gutierrez_lillo")


def test_c15_convex_hull(sweeps):
    ok, detail = _families(sweeps, "convex_hull")
    record(15, "convex hull insensitivity", ok, detail)
    assert ok, _dumps(sweeps, "convex_hull")
