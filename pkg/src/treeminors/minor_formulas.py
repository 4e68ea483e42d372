"""Principal minors of tree distance matrices from rooted spanning forests.

For a tree with edge lengths and a nonempty vertex set S of size k,

    det D[S] = (-1)^(k-1) 2^(k-2) * lambda
    lambda   = (sum of lengths) * kappa - sum_F w(F) (outdeg(F,*) - 2)^2
    cof D[S] = (-2)^(k-1) * kappa

where kappa sums the weights of S-rooted forests and F ranges over the
(S,*)-rooted forests. Every quantity here is computed along at least two
independent routes and the routes are compared exactly; disagreement raises
:class:`IdentityViolation`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Sequence

from .errors import (
    Disconnected,
    DimensionMismatch,
    EmptySubset,
    IdentityViolation,
    NotNested,
    NotUnitLengths,
    SubsetTooSmall,
    TooSmall,
)
from .exact_linalg import (
    Inertia,
    cofactor_sum,
    determinant,
    inertia,
    laplacian,
    laplacian_minor,
    matmul,
    matvec,
    solve,
)
from .forest_enum import (
    TABLE_MAX_N,
    ForestKind,
    ForestStats,
    enumerate_forests,
    forest_stats,
    stats_by_enumeration,
)
from .graph_model import (
    MomentumFunction,
    Multigraph,
    Tree,
    VertexSubset,
    canonical_momentum,
    convex_hull,
    distance_submatrix,
    quotient,
    restrict_subset,
)

HALF = Fraction(1, 2)


def _require(name: str, left, right, context: str = "") -> None:
    if left != right:
        raise IdentityViolation(name, left, right, context)


def _sign_power(k: int) -> Fraction:
    """(-1)^(k-1) 2^(k-2)."""
    return Fraction((-1) ** (k - 1) * 2 ** (k - 1), 2)


def graham_pollak_det(n: int) -> Fraction:
    """Determinant of the distance matrix of any unit-length tree on n vertices."""
    if n < 1:
        raise TooSmall("a tree has at least one vertex")
    return _sign_power(n) * (n - 1)


def weighted_full_det(t: Tree) -> Fraction:
    """Closed form for det D with edge lengths; 0 for the single-vertex tree."""
    if t.n == 1:
        return Fraction(0)
    return _sign_power(t.n) * t.total_length * t.length_product


class SubsetAnalysis:
    """Lazily computed forest data and matrices for one (tree, S) pair."""

    def __init__(self, t: Tree, s: VertexSubset):
        if not s:
            raise EmptySubset("principal minors need a nonempty subset")
        self.tree = t
        self.subset = tuple(s)
        self.k = len(s)

    @cached_property
    def f1(self):
        return enumerate_forests(self.tree, self.subset, ForestKind.S_ROOTED).forests

    @cached_property
    def f2(self):
        return enumerate_forests(self.tree, self.subset, ForestKind.S_STAR_ROOTED).forests

    @cached_property
    def stats(self) -> ForestStats:
        return forest_stats(self.tree, self.subset)

    @cached_property
    def kappa(self) -> Fraction:
        return Fraction(self.stats.kappa)

    @cached_property
    def histogram(self) -> dict[int, Fraction]:
        return {d: Fraction(w) for d, w in self.stats.histogram.items()}

    @cached_property
    def floating_penalty(self) -> Fraction:
        """sum over (S,*)-rooted F of w(F) (outdeg(F,*) - 2)^2."""
        return Fraction(self.stats.penalty)

    @cached_property
    def lam(self) -> Fraction:
        return self.tree.total_length * self.kappa - self.floating_penalty

    @cached_property
    def det_formula(self) -> Fraction:
        return _sign_power(self.k) * self.lam

    @cached_property
    def cof_formula(self) -> Fraction:
        return Fraction((-2) ** (self.k - 1)) * self.kappa

    @cached_property
    def m(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(x) for x in self.stats.m)

    @cached_property
    def ratio_formula(self) -> Fraction:
        return HALF * (self.tree.total_length - self.floating_penalty / self.kappa)

    @cached_property
    def matrix(self) -> list[list[Fraction]]:
        return distance_submatrix(self.tree, self.subset)

    @cached_property
    def det_direct(self) -> Fraction:
        return determinant(self.matrix)

    @cached_property
    def cof_direct(self) -> Fraction:
        return cofactor_sum(self.matrix)

    @cached_property
    def inertia(self) -> Inertia:
        return inertia(self.matrix)

    @cached_property
    def ratio(self) -> Fraction:
        """det D[S] / cof D[S], checked three ways."""
        by_matrix = self.det_direct / self.cof_direct
        by_lambda = self.lam / sum(self.m, Fraction(0))
        ctx = self.context()
        _require("ratio: forest formula vs det/cof", self.ratio_formula, by_matrix, ctx)
        _require("ratio: lambda/(1^T m) vs det/cof", by_lambda, by_matrix, ctx)
        return by_matrix

    def context(self) -> str:
        return f"S={[self.tree.labels[v] for v in self.subset]}"


@lru_cache(maxsize=1024)
def _analysis(t: Tree, s: VertexSubset) -> SubsetAnalysis:
    return SubsetAnalysis(t, s)


def principal_minor_formula(t: Tree, s: VertexSubset) -> Fraction:
    """det D[S] from rooted spanning forests, checked against elimination."""
    a = _analysis(t, tuple(s))
    _require("det D[S]: forest formula vs determinant", a.det_formula, a.det_direct, a.context())
    return a.det_formula


def cofactor_identity(t: Tree, s: VertexSubset) -> Fraction:
    """(-2)^(|S|-1) kappa, checked against the cofactor sum of D[S]."""
    a = _analysis(t, tuple(s))
    _require("cof D[S]: forest formula vs cofactor sum", a.cof_formula, a.cof_direct, a.context())
    return a.cof_formula


@dataclass(frozen=True)
class EquilibriumVector:
    tree: Tree
    subset: VertexSubset
    values: tuple[Fraction, ...]
    lam: Fraction

    def __post_init__(self):
        kappa_value = _analysis(self.tree, self.subset).kappa
        _require("1^T m = 2 kappa", sum(self.values, Fraction(0)), 2 * kappa_value)
        if not any(self.values):
            raise IdentityViolation("m is nonzero", self.values, "nonzero")
        d = distance_submatrix(self.tree, self.subset)
        _require("D[S] m = lambda 1", matvec(d, self.values), [self.lam] * len(self.values))


def equilibrium_vector(t: Tree, s: VertexSubset) -> EquilibriumVector:
    a = _analysis(t, tuple(s))
    return EquilibriumVector(t, a.subset, a.m, a.lam)


def lambda_constant(t: Tree, s: VertexSubset) -> Fraction:
    return equilibrium_vector(t, s).lam


def normalized_minor(t: Tree, s: VertexSubset) -> Fraction:
    """det D[S] / cof D[S]; lies in [0, total length / 2]."""
    a = _analysis(t, tuple(s))
    r = a.ratio
    if not 0 <= r <= HALF * t.total_length:
        raise IdentityViolation("0 <= ratio <= total/2", r, (0, HALF * t.total_length))
    return r


def optimize_quadratic(t: Tree, s: VertexSubset) -> tuple[list[Fraction], Fraction]:
    """Maximizer of u^T D[S] u subject to sum(u) = 1, and the maximum.

    The maximizer is the equilibrium vector scaled to unit sum; the Lagrange
    condition D[S] u = value * 1 is checked exactly.
    """
    a = _analysis(t, tuple(s))
    total = sum(a.m, Fraction(0))
    u = [x / total for x in a.m]
    value = a.ratio
    _require("sum(u*) = 1", sum(u, Fraction(0)), 1)
    _require("D[S] u* = value 1", matvec(a.matrix, u), [value] * a.k)
    return u, value


def quadratic_form(m: Sequence[Sequence[Fraction]], u: Sequence[Fraction]) -> Fraction:
    return sum((x * y for x, y in zip(u, matvec(m, u))), Fraction(0))


def monotonicity_check(t: Tree, a: VertexSubset, b: VertexSubset) -> tuple[Fraction, Fraction]:
    if not a or not b:
        raise EmptySubset("monotonicity needs nonempty subsets")
    if not set(a) <= set(b):
        raise NotNested(f"{a} is not contained in {b}")
    ra, rb = normalized_minor(t, a), normalized_minor(t, b)
    if ra > rb:
        raise IdentityViolation("ratio(A) <= ratio(B)", ra, rb, f"A={a}, B={b}")
    return ra, rb


def ratio_bounds(t: Tree, s: VertexSubset) -> tuple[Fraction, Fraction]:
    """Half the largest pairwise distance in S, and half the hull length."""
    if len(s) < 2:
        raise SubsetTooSmall("ratio bounds need at least two vertices")
    d = t.distances
    lower = HALF * max(d[x][y] for x, y in combinations(s, 2))
    upper = HALF * convex_hull(t, s).total_length
    r = normalized_minor(t, s)
    if not lower <= r <= upper:
        raise IdentityViolation("lower <= ratio <= upper", r, (lower, upper))
    return lower, upper


def _compact(x) -> Fraction | int:
    # integer-valued Fractions become ints so unit-length sums stay cheap
    if type(x) is int:
        return x
    if not isinstance(x, Fraction):
        x = Fraction(x)
    return x.numerator if x.denominator == 1 else x


def _edge_lengths(g: Multigraph, lengths) -> tuple[Fraction | int, ...]:
    if lengths is None:
        lengths = g.lengths
    elif len(lengths) != len(g.edges):
        raise DimensionMismatch(f"{len(lengths)} lengths for {len(g.edges)} edges")
    return tuple(_compact(x) for x in lengths)


def _forests_with_components(g: Multigraph, ncomp: int):
    """Yield (edge mask, component masks) of spanning forests with ncomp components."""
    edges = [(e.tail, e.head) for e in g.edges]
    m = len(edges)
    target = g.n - ncomp
    if target < 0:
        return []
    loops = 0
    for i, (u, v) in enumerate(edges):
        if u == v:
            loops |= 1 << i
    results = []

    def rec(i: int, used: int, count: int, comps: list[int]) -> None:
        if count == target:
            results.append((used, tuple(comps)))
            return
        if m - i < target - count:
            return
        if not loops >> i & 1:
            u, v = edges[i]
            cu = next(c for c in comps if c >> u & 1)
            if not cu >> v & 1:
                cv = next(c for c in comps if c >> v & 1)
                rest = [c for c in comps if c != cu and c != cv]
                rest.append(cu | cv)
                rec(i + 1, used | 1 << i, count + 1, rest)
        rec(i + 1, used, count, comps)

    rec(0, 0, 0, [1 << v for v in range(g.n)])
    return results


def _is_connected(g: Multigraph) -> bool:
    seen = 1
    changed = True
    while changed:
        changed = False
        for e in g.edges:
            if (seen >> e.tail & 1) != (seen >> e.head & 1):
                seen |= 1 << e.tail | 1 << e.head
                changed = True
    return seen == (1 << g.n) - 1


def _excluded_product(lengths, used: int) -> Fraction | int:
    p = 1
    for i, a in enumerate(lengths):
        if not used >> i & 1:
            p *= a
    return p


def symanzik_first(g: Multigraph, lengths=None) -> Fraction:
    """First Symanzik polynomial evaluated at ``lengths``: sum over spanning trees
    of the product of excluded-edge lengths."""
    lengths = _edge_lengths(g, lengths)
    if not _is_connected(g):
        raise Disconnected("first Symanzik polynomial needs a connected graph")
    return Fraction(sum(_excluded_product(lengths, used) for used, _ in _forests_with_components(g, 1)))


def symanzik_second(g: Multigraph, p: MomentumFunction, lengths=None) -> Fraction:
    lengths = _edge_lengths(g, lengths)
    if len(p.values) != g.n:
        raise DimensionMismatch(f"momentum has {len(p.values)} values for {g.n} vertices")
    if not _is_connected(g):
        raise Disconnected("second Symanzik polynomial needs a connected graph")
    values = [_compact(x) for x in p.values]
    total = 0
    for used, comps in _forests_with_components(g, 2):
        part = comps[0]
        flow = sum(x for v, x in enumerate(values) if part >> v & 1)
        total += flow * flow * _excluded_product(lengths, used)
    return Fraction(total)


def symanzik_by_laplacian(
    g: Multigraph, p: MomentumFunction, root: int = 0, lengths=None
) -> tuple[Fraction, Fraction]:
    """(psi, phi) from minors of the weighted Laplacian instead of enumeration.

    With conductances 1/length and the root row and column deleted,
    psi = prod(lengths) det(L0) and phi = -prod(lengths) det([[L0, p], [p^T, 0]]),
    the all-minors matrix-tree theorem applied to spanning trees and to
    two-component forests separating the root.
    """
    lengths = _edge_lengths(g, lengths)
    if len(p.values) != g.n:
        raise DimensionMismatch(f"momentum has {len(p.values)} values for {g.n} vertices")
    if not _is_connected(g):
        raise Disconnected("Symanzik polynomials need a connected graph")
    lap = [[0] * g.n for _ in range(g.n)]
    prod = 1
    for e, a in zip(g.edges, lengths):
        prod *= a
        if e.tail == e.head:
            continue
        c = 1 if a == 1 else _compact(1 / Fraction(a))
        lap[e.tail][e.tail] += c
        lap[e.head][e.head] += c
        lap[e.tail][e.head] -= c
        lap[e.head][e.tail] -= c
    keep = [v for v in range(g.n) if v != root]
    values = [_compact(x) for x in p.values]
    reduced = [[lap[i][j] for j in keep] for i in keep]
    bordered = [row + [values[i]] for row, i in zip(reduced, keep)]
    bordered.append([values[i] for i in keep] + [0])
    return prod * determinant(reduced), -prod * determinant(bordered)


def quotient_symanzik(t: Tree, s: VertexSubset, lap=None) -> tuple[Fraction, Fraction]:
    """(psi, phi) of G/S at the canonical momentum, read off the tree Laplacian.

    Deleting the glued vertex from the quotient's Laplacian leaves exactly
    L[complement of S]: edges into S only feed the diagonal and edges inside S
    become loops, which a Laplacian ignores. ``lap`` may be passed in to
    reuse one Laplacian across many subsets.
    """
    if not s:
        raise EmptySubset("quotient by an empty set")
    if lap is None:
        lap = laplacian(t)
    in_s = set(s)
    rest = [v for v in range(t.n) if v not in in_s]
    p = [t.degrees[v] - 2 for v in rest]
    reduced = [[lap[i][j] for j in rest] for i in rest]
    bordered = [row + [x] for row, x in zip(reduced, p)]
    bordered.append(p + [0])
    prod = t.length_product
    return prod * determinant(reduced), -prod * determinant(bordered)


@dataclass(frozen=True)
class SymanzikRecord:
    psi: Fraction
    phi: Fraction
    det: Fraction
    ratio: Fraction


def symanzik_det_identity(t: Tree, s: VertexSubset) -> SymanzikRecord:
    """det D[S] and the normalized minor rewritten through the quotient G/S."""
    a = _analysis(t, tuple(s))
    g, _ = quotient(t, a.subset)
    psi = symanzik_first(g)
    phi = symanzik_second(g, canonical_momentum(t, a.subset))
    ctx = a.context()
    _require("psi(G/S) = kappa", psi, a.kappa, ctx)
    _require("phi(G/S) = sum w(F)(outdeg-2)^2", phi, a.floating_penalty, ctx)
    _require("Symanzik: enumeration vs Laplacian minors",
             symanzik_by_laplacian(g, canonical_momentum(t, a.subset)), (psi, phi), ctx)
    _require("Symanzik: quotient vs tree Laplacian", quotient_symanzik(t, a.subset), (psi, phi), ctx)
    det = _sign_power(a.k) * (t.total_length * psi - phi)
    _require("det via Symanzik", det, a.det_direct, ctx)
    ratio = HALF * (t.total_length - phi / psi)
    _require("ratio via Symanzik", ratio, a.ratio, ctx)
    return SymanzikRecord(psi, phi, det, ratio)


def gutierrez_lillo_form(t: Tree, s: VertexSubset) -> Fraction:
    """Unit-length restatement with (|S|-1) kappa and (outdeg-1)(outdeg-4) terms."""
    if not t.unit_lengths:
        raise NotUnitLengths("this form holds for unit edge lengths only")
    a = _analysis(t, tuple(s))
    correction = sum(((d - 1) * (d - 4) * c for d, c in a.histogram.items()), Fraction(0))
    value = _sign_power(a.k) * ((a.k - 1) * a.kappa - correction)
    _require("Gutierrez-Lillo form vs forest formula", value, a.det_formula, a.context())
    return value


def hull_formula(t: Tree, s: VertexSubset) -> Fraction:
    """Forest formula evaluated on the convex hull of S instead of the whole tree."""
    hull = convex_hull(t, s)
    return SubsetAnalysis(hull, restrict_subset(t, hull, s)).det_formula


def dld_identity_check(t: Tree) -> dict[str, bool]:
    """Check D = -1/2 D L D + 1/2 (sum a) J, D m = (sum a) 1 and the inverse formula."""
    if t.n < 2:
        raise TooSmall("the distance-Laplacian identities need two vertices")
    n = t.n
    d = [[_compact(x) for x in r] for r in t.distances]
    lap = laplacian(t)
    total = _compact(t.total_length)
    dld = matmul(matmul(d, lap), d)
    rhs = [[-HALF * dld[i][j] + HALF * total for j in range(n)] for i in range(n)]
    _require("D = -1/2 DLD + 1/2 (sum a) J", rhs, d)
    m_full = [2 - deg for deg in t.degrees]
    _require("D m = (sum a) 1", matvec(d, m_full), [total] * n)
    inverse = [
        [-HALF * lap[i][j] + HALF * m_full[i] * m_full[j] / total for j in range(n)]
        for i in range(n)
    ]
    identity = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    _require("D^-1 = -1/2 L + 1/2 (sum a)^-1 m m^T", matmul(d, inverse), identity)
    return {"dld": True, "dm": True, "inverse": True}


@dataclass
class MinorReport:
    """Every quantity computed for one (tree, S) pair."""

    subset: tuple
    det_formula: Fraction
    det_direct: Fraction
    cof: Fraction
    kappa: Fraction
    lam: Fraction
    ratio: Fraction
    m: tuple[Fraction, ...]
    histogram: dict[int, Fraction]
    f1_count: int
    f2_count: int
    inertia: Inertia
    symanzik_psi: Fraction
    symanzik_phi: Fraction
    bounds: tuple[Fraction, Fraction] | None = None
    checks: list[str] = field(default_factory=list)


def analyze(t: Tree, s: VertexSubset) -> MinorReport:
    """Compute a full report, asserting every identity along the way."""
    a = _analysis(t, tuple(s))
    checks = []
    if t.n <= TABLE_MAX_N:
        _require("forest statistics: table vs enumeration",
                 a.stats, stats_by_enumeration(t, a.subset), a.context())
        checks.append("forest_table")
    principal_minor_formula(t, a.subset)
    checks.append("det_formula_vs_determinant")
    cofactor_identity(t, a.subset)
    checks.append("cofactor_identity")
    _require("kappa: enumeration vs matrix-tree", a.kappa,
             t.length_product * determinant(laplacian_minor(t, a.subset)), a.context())
    checks.append("kappa_matrix_tree")
    ev = equilibrium_vector(t, a.subset)
    checks.append("equilibrium_vector")
    ratio = normalized_minor(t, a.subset)
    checks.append("ratio_three_routes")
    optimize_quadratic(t, a.subset)
    checks.append("quadratic_optimum")
    if a.k >= 2:
        _require("D[S] m = lambda 1 via solve", solve(a.matrix, [ev.lam] * a.k), list(ev.values))
        checks.append("solve_equilibrium")
        expected = Inertia(1, a.k - 1, 0)
        _require("inertia of D[S]", a.inertia, expected, a.context())
        checks.append("inertia")
    bounds = ratio_bounds(t, a.subset) if a.k >= 2 else None
    if bounds:
        checks.append("ratio_bounds")
    sym = symanzik_det_identity(t, a.subset)
    checks.append("symanzik")
    _require("convex hull insensitivity", hull_formula(t, a.subset), a.det_formula, a.context())
    checks.append("convex_hull")
    if t.unit_lengths:
        gutierrez_lillo_form(t, a.subset)
        checks.append("gutierrez_lillo")
    return MinorReport(
        subset=tuple(t.labels[v] for v in a.subset),
        det_formula=a.det_formula,
        det_direct=a.det_direct,
        cof=a.cof_direct,
        kappa=a.kappa,
        lam=a.lam,
        ratio=ratio,
        m=a.m,
        histogram=a.histogram,
        f1_count=a.stats.f1_count,
        f2_count=a.stats.f2_count,
        inertia=a.inertia,
        symanzik_psi=sym.psi,
        symanzik_phi=sym.phi,
        bounds=bounds,
        checks=checks,
    )
