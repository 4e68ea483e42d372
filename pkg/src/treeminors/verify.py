"""Invariant sweeps over exhaustive and seeded random corpora.

A sweep walks a tree once, pulls the forest statistics of every requested
subset from the batched table, and compares them exactly against elimination,
Laplace expansion, Laplacian minors of the quotient and the convex hull. Each
invariant family keeps a pass count and the first few counterexamples.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .errors import IdentityViolation
from .exact_linalg import Inertia, cofactor_sum, determinant, inertia, laplacian, matvec
from .forest_enum import TABLE_MAX_N, forest_entries, forest_stats, forest_table
from .graph_model import (
    Tree,
    VertexSubset,
    convex_hull,
    distance_submatrix,
    restrict_subset,
    subset_mask,
)
from .minor_formulas import (
    HALF,
    dld_identity_check,
    graham_pollak_det,
    normalized_minor,
    optimize_quadratic,
    quadratic_form,
    quotient_symanzik,
    weighted_full_det,
)
from .oracle import MAX_LAPLACE, Corpus, det_cofactor_expansion, exhaustive_corpus, random_corpus

FAMILIES = (
    "full_determinant",
    "oracle_equivalence",
    "cofactor_identity",
    "equilibrium",
    "ratio_consistency",
    "inertia",
    "monotonicity",
    "bounds",
    "symanzik",
    "distance_laplacian",
    "transition_counts",
    "gutierrez_lillo",
    "convex_hull",
)
MAX_DUMPS = 10


@dataclass
class Counterexample:
    family: str
    provenance: str
    edges: list[tuple]
    subset: tuple
    detail: str

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "provenance": self.provenance,
            "edges": [[str(a), str(b), str(x)] for a, b, x in self.edges],
            "subset": [str(v) for v in self.subset],
            "detail": self.detail,
        }


@dataclass
class FamilyResult:
    name: str
    checked: int = 0
    failed: int = 0
    dumps: list[Counterexample] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def merge(self, other: "FamilyResult") -> None:
        self.checked += other.checked
        self.failed += other.failed
        self.dumps.extend(other.dumps[: max(0, MAX_DUMPS - len(self.dumps))])

    def to_json(self) -> dict:
        return {
            "pass": self.ok,
            "checked": self.checked,
            "failed": self.failed,
            "counterexamples": [c.to_json() for c in self.dumps],
        }


def _fresh_families() -> dict[str, FamilyResult]:
    return {name: FamilyResult(name) for name in FAMILIES}


@dataclass
class SweepSummary:
    families: dict[str, FamilyResult] = field(default_factory=_fresh_families)
    trees: int = 0
    instances: int = 0

    @property
    def ok(self) -> bool:
        return all(f.ok for f in self.families.values())

    def merge(self, other: "SweepSummary") -> None:
        self.trees += other.trees
        self.instances += other.instances
        for name, fam in other.families.items():
            self.families.setdefault(name, FamilyResult(name)).merge(fam)

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "trees": self.trees,
            "instances": self.instances,
            "families": {name: fam.to_json() for name, fam in self.families.items()},
        }


def _compact(x: Fraction):
    return x.numerator if x.denominator == 1 else x


def _bits(mask: int) -> VertexSubset:
    return tuple(v for v in range(mask.bit_length()) if mask >> v & 1)


class _Recorder:
    def __init__(self, summary: SweepSummary, t: Tree, provenance: str):
        self.summary = summary
        self.tree = t
        self.provenance = provenance

    def check(self, family: str, ok: bool, s: VertexSubset = (), detail=lambda: "") -> bool:
        fam = self.summary.families[family]
        fam.checked += 1
        if not ok:
            fam.failed += 1
            if len(fam.dumps) < MAX_DUMPS:
                t = self.tree
                edges = [(t.labels[e.tail], t.labels[e.head], e.length) for e in t.edges]
                labels = tuple(t.labels[v] for v in s)
                fam.dumps.append(Counterexample(family, self.provenance, edges, labels, detail()))
        return ok


def _transition_counts(rec: _Recorder, t: Tree, wanted: set[int]) -> None:
    """Count deletion and union preimages straight from the (forest, S) pairs."""
    f1: dict[tuple[int, int], object] = {}
    f2: dict[tuple[int, int], tuple] = {}
    for used, smask, w, outdeg, _combo, floating in forest_entries(t):
        if smask in wanted:
            if floating < 0:
                f1[used, smask] = w
            else:
                f2[used, smask] = (w, outdeg[floating])
    lengths = [_compact(a) for a in t.lengths]
    edges = range(len(lengths))
    # per subset: |F1|, |F2|, deletion matches, union matches, sum of outdegrees, weights ok
    tally = {s: [0, 0, 0, 0, 0, True] for s in wanted}
    for (used, smask), (w, d) in f2.items():
        row = tally[smask]
        above = [e for e in edges if not used >> e & 1 and (used | 1 << e, smask) in f1]
        row[1] += 1
        row[2] += len(above) == d
        row[4] += d
        if any(w != lengths[e] * f1[used | 1 << e, smask] for e in above):
            row[5] = False
    for used, smask in f1:
        row = tally[smask]
        k = bin(smask).count("1")
        below = sum(1 for e in edges if used >> e & 1 and (used & ~(1 << e), smask) in f2)
        row[0] += 1
        row[3] += below == t.n - k
    for smask in sorted(wanted):
        n1, n2, good_del, good_union, out_total, weights_ok = tally[smask]
        expect = (t.n - bin(smask).count("1")) * n1
        rec.check(
            "transition_counts",
            good_del == n2 and good_union == n1 and out_total == expect and weights_ok,
            _bits(smask),
            lambda: f"deletion {good_del}/{n2}, union {good_union}/{n1}, "
                    f"sum outdeg {out_total} vs {expect}, weights {weights_ok}",
        )


def _sweep_subset(rec: _Recorder, t: Tree, s: VertexSubset, ctx: dict) -> Fraction:
    dist, total = ctx["dist"], ctx["total"]
    k = len(s)
    sign = (-1) ** (k - 1) * 2 ** (k - 2) if k >= 2 else HALF
    st = ctx["table"][subset_mask(s)] if ctx["table"] else forest_stats(t, s)
    kap, pen = st.kappa, st.penalty
    lam = total * kap - pen
    det_f = sign * lam
    mat = [[dist[i][j] for j in s] for i in s]

    det_b = _compact(determinant(mat))
    det_l = det_cofactor_expansion(mat) if k <= MAX_LAPLACE else det_b
    rec.check("oracle_equivalence", det_f == det_b == det_l, s,
              lambda: f"forest {det_f}, elimination {det_b}, laplace {det_l}")

    cof = _compact(cofactor_sum(mat))
    rec.check("cofactor_identity", cof == (-2) ** (k - 1) * kap, s,
              lambda: f"cof {cof} vs (-2)^(k-1) kappa {(-2) ** (k - 1) * kap}")

    m = st.m
    one_m = sum(m)
    dm = matvec(mat, m)
    rec.check("equilibrium", one_m == 2 * kap and any(m) and all(x == lam for x in dm), s,
              lambda: f"m {m}, kappa {kap}, D m {dm}, lambda {lam}")

    # det/cof = (total - pen/kappa)/2 = lambda/(1^T m), compared without dividing
    rec.check("ratio_consistency", det_b * 2 * kap == cof * lam and det_b * one_m == cof * lam, s,
              lambda: f"det {det_b}, cof {cof}, lambda {lam}, kappa {kap}, 1^T m {one_m}")
    ratio = Fraction(det_b, cof) if type(det_b) is int and type(cof) is int else det_b / cof
    twice = 2 * ratio

    hull = convex_hull(t, s)
    hull_length = _compact(hull.total_length)
    ok = 0 <= twice <= total
    if k >= 2:
        widest = max(dist[x][y] for x, y in combinations(s, 2))
        ok = ok and widest <= twice <= hull_length
        rec.check("inertia", inertia(mat) == Inertia(1, k - 1, 0), s,
                  lambda: f"inertia {tuple(inertia(mat))}")
    rec.check("bounds", ok, s, lambda: f"ratio {ratio}, total {total}, hull {hull_length}")

    psi, phi = (_compact(x) for x in quotient_symanzik(t, s, ctx["lap"]))
    lam_sym = total * psi - phi
    rec.check(
        "symanzik",
        psi == kap and phi == pen and sign * lam_sym == det_b and lam_sym * cof == 2 * psi * det_b,
        s,
        lambda: f"psi {psi} vs kappa {kap}, phi {phi} vs penalty {pen}",
    )

    if ctx["unit"]:
        correction = sum((d - 1) * (d - 4) * w for d, w in st.histogram.items())
        gl = sign * ((k - 1) * kap - correction)
        rec.check("gutierrez_lillo", gl == det_f, s, lambda: f"restated {gl} vs {det_f}")

    hst = forest_stats(hull, restrict_subset(t, hull, s))
    on_hull = sign * (hull_length * hst.kappa - hst.penalty)
    rec.check("convex_hull", on_hull == det_f, s, lambda: f"hull {on_hull} vs tree {det_f}")
    return ratio


def _monotonicity(rec: _Recorder, t: Tree, ratios: dict[int, Fraction]) -> None:
    """ratio(A) <= ratio(B) for all nonempty A inside B.

    best[X] is the largest ratio over nonempty subsets of X, so comparing
    ratio(B) with best over B minus one vertex covers every nested pair.
    """
    best: dict[int, Fraction] = {}
    for mask in range(1, 1 << t.n):
        r = ratios[mask]
        below = [best[mask & ~(1 << v)] for v in _bits(mask) if mask & ~(1 << v)]
        top = max(below) if below else None

        def detail(mask=mask, r=r):
            a = next(x for x in range(1, mask) if x & mask == x and ratios[x] > r)
            return f"ratio(A={list(_bits(a))}) = {ratios[a]} > ratio(B) = {r}"

        rec.check("monotonicity", top is None or top <= r, _bits(mask), detail)
        best[mask] = r if top is None or r > top else top


def sweep_tree(
    summary: SweepSummary,
    t: Tree,
    subsets: Sequence[VertexSubset],
    provenance: str = "",
    monotone: bool = False,
) -> None:
    """Run every family on one tree; ``monotone`` needs all nonempty subsets."""
    rec = _Recorder(summary, t, provenance)
    summary.trees += 1
    n = t.n
    total = _compact(t.total_length)
    dist = [[_compact(x) for x in row] for row in t.distances]
    unit = t.unit_lengths
    ctx = {
        "dist": dist,
        "total": total,
        "unit": unit,
        "lap": laplacian(t),
        "table": forest_table(t) if n <= TABLE_MAX_N else None,
    }

    full = determinant(dist)
    closed = weighted_full_det(t)
    rec.check("full_determinant", full == closed and (not unit or full == graham_pollak_det(n)),
              (), lambda: f"det D {full} vs closed form {closed}")
    if n >= 2:
        try:
            dld_identity_check(t)
            msg = ""
        except IdentityViolation as exc:
            msg = str(exc)
        rec.check("distance_laplacian", not msg, (), lambda: msg)
    if n <= TABLE_MAX_N:
        _transition_counts(rec, t, {subset_mask(s) for s in subsets})

    ratios = {}
    for s in subsets:
        ratios[subset_mask(s)] = _sweep_subset(rec, t, tuple(s), ctx)
        summary.instances += 1
    if monotone:
        _monotonicity(rec, t, ratios)


def _run_chunk(args) -> SweepSummary:
    items, monotone = args
    summary = SweepSummary()
    for t, provenance, subsets in items:
        sweep_tree(summary, t, subsets, provenance, monotone)
    return summary


def run_corpus(corpus: Corpus, monotone: bool = False, workers: int = 1) -> SweepSummary:
    """Sweep a corpus; results are merged in corpus order whatever ``workers`` is."""
    items = [(t, prov, subs) for (t, prov), subs in zip(corpus.trees, corpus.subsets)]
    if workers <= 1 or len(items) < 2:
        return _run_chunk((items, monotone))
    size = -(-len(items) // (4 * workers))
    chunks = [(items[i:i + size], monotone) for i in range(0, len(items), size)]
    summary = SweepSummary()
    with ProcessPoolExecutor(workers) as pool:
        for part in pool.map(_run_chunk, chunks):
            summary.merge(part)
    return summary


def verify_exhaustive(max_n: int, min_n: int = 1, workers: int = 1) -> SweepSummary:
    """Every labeled unit-length tree with min_n..max_n vertices, every nonempty S."""
    return run_corpus(exhaustive_corpus(max_n, min_n), monotone=True, workers=workers)


def verify_random(count: int, seed: int, max_n: int = 10, max_len: int = 20,
                  workers: int = 1) -> SweepSummary:
    return run_corpus(random_corpus(count, seed, max_n, max_len), workers=workers)


def _zero_sum_vector(rng: random.Random, k: int, scale: int = 20) -> list[Fraction]:
    z = [Fraction(rng.randint(-scale, scale), rng.randint(1, scale)) for _ in range(k)]
    shift = sum(z, Fraction(0)) / k
    return [x - shift for x in z]


def optimization_sweep(
    instances: Sequence[tuple[Tree, VertexSubset]], perturbations: int = 50, seed: int = 0
) -> FamilyResult:
    """u* = m / 1^T m attains the ratio and no feasible perturbation beats it.

    Each perturbation u* + z with 1^T z = 0 is feasible; the same z also
    exercises concavity on the hyperplane, z^T D[S] z <= 0.
    """
    result = FamilyResult("quadratic_optimum")
    rng = random.Random(seed)
    for t, s in instances:
        u, value = optimize_quadratic(t, s)
        mat = distance_submatrix(t, s)
        ok = value == normalized_minor(t, s) == quadratic_form(mat, u)
        worst = None
        for _ in range(perturbations):
            z = _zero_sum_vector(rng, len(s))
            moved = quadratic_form(mat, [a + b for a, b in zip(u, z)])
            if moved > value or quadratic_form(mat, z) > 0:
                ok = False
                worst = moved
        result.checked += 1
        if not ok:
            result.failed += 1
            if len(result.dumps) < MAX_DUMPS:
                edges = [(t.labels[e.tail], t.labels[e.head], e.length) for e in t.edges]
                result.dumps.append(Counterexample(
                    "quadratic_optimum", "optimization_sweep", edges,
                    tuple(t.labels[v] for v in s), f"value {value}, perturbed {worst}"))
    return result
