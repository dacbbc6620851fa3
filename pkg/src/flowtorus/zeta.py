"""Transfer matrices, reciprocal characteristic polynomials and zeta functions.

kappa(W) = det(1 - Phi(W)) where Phi(W)[i][j] sums sign(e) * x^hvec(e) t^weight(e)
over the edges i -> j of W.  The zeta function differs from kappa(g) by one
correction factor per exceptional trajectory.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import caps
from ._exact import int_rank
from .digraph import (
    ExceptionalCycleRecord,
    GraphLike,
    Subgraph,
    as_subgraph,
    cycle_class,
    recurrent_core,
    resolve_records,
    simple_cycles,
    strong_components,
    trajectory_monomial,
)
from .errors import (
    AmbiguousT,
    InconsistentExceptionalData,
    InexactDivision,
    TruncatedResultWarning,
    WalkCapExceeded,
    ZeroPolynomial,
)
from .hull import DirectionHull, support_subgraph
from .laurent import (
    GroupRingElement,
    RingMatrix,
    TruncatedSeries,
    det_division_free,
    exact_quotient,
    mul_truncated,
    series_exp,
    series_inverse,
)


def edge_monomial(g: GraphLike, i: int) -> GroupRingElement:
    e = as_subgraph(g).graph.edges[i]
    return GroupRingElement.monomial(e.hvec, e.weight, e.sign)


def transfer_matrix(w: GraphLike) -> RingMatrix:
    """Signed transfer matrix on the vertices of ``w`` (sorted); parallel edges are summed."""
    view = as_subgraph(w)
    order = sorted(view.vertices)
    pos = {v: k for k, v in enumerate(order)}
    b = view.graph.b
    n = len(order)
    rows = [[GroupRingElement.zero(b) for _ in range(n)] for _ in range(n)]
    for i in sorted(view.edges):
        e = view.graph.edges[i]
        r, c = pos[e.source], pos[e.target]
        rows[r][c] = rows[r][c] + edge_monomial(view, i)
    return RingMatrix.from_rows(rows, b)


def kappa(w: GraphLike) -> GroupRingElement:
    """Reciprocal characteristic polynomial det(1 - Phi(W))."""
    m = transfer_matrix(w)
    return det_division_free(m.identity_minus())


def kappa_trace_oracle(w: GraphLike, bound: int) -> TruncatedSeries:
    """exp(-sum_{m<=M} tr(Phi^m)/m), truncated at degree M."""
    phi = transfer_matrix(w)
    b = phi.b
    s = GroupRingElement.zero(b)
    power = phi
    for m in range(1, bound + 1):
        s = s - power.trace().truncate(bound).scale(Fraction(1, m))
        if m < bound:
            power = power.matmul(phi, bound)
    return series_exp(s, bound)


@dataclass(frozen=True)
class ProductFormula:
    factors: list[tuple[Subgraph, GroupRingElement]]
    product: GroupRingElement
    verified: bool


def kappa_product_formula(w: GraphLike) -> ProductFormula:
    """kappa(W) as the product of kappa over the strong components of W."""
    view = as_subgraph(w)
    factors = [(c, kappa(c)) for c in strong_components(view)]
    prod = GroupRingElement.one(view.graph.b)
    for _, k in factors:
        prod = prod * k
    return ProductFormula(factors, prod, prod == kappa(view))


def face_part_by_cone(p: GroupRingElement, h: DirectionHull, face_id: int) -> GroupRingElement:
    """Terms of p whose monomial lies in the cone over the closed face."""
    h.face(face_id)
    return p.filter(lambda mono: h.in_face_cone(mono.vector, mono.degree, face_id))


def kappa_face_part(w: GraphLike, h: DirectionHull, face_id: int) -> GroupRingElement:
    """kappa(W intersected with the support subgraph of the face)."""
    view = as_subgraph(w)
    support = support_subgraph(h, face_id)
    inter = Subgraph(view.graph, view.vertices & support.vertices, view.edges & support.edges)
    return kappa(inter)


def correction_factor(record: ExceptionalCycleRecord, a: GroupRingElement) -> GroupRingElement:
    one = GroupRingElement.one(a.b)
    if record.type_content == "SH_or_SV":
        return one - a
    if record.type_content == "mixed":
        return (one - a) ** 2
    return (one - a) * (one - a ** record.po) ** (record.pn // record.po)


def corrections(g: GraphLike, exceptional: Sequence[ExceptionalCycleRecord]) -> GroupRingElement:
    view = as_subgraph(g)
    resolve_records(view, exceptional)
    prod = GroupRingElement.one(view.graph.b)
    for rec in exceptional:
        prod = prod * correction_factor(rec, trajectory_monomial(view, rec))
    return prod


@dataclass(frozen=True)
class ZetaResult:
    series: TruncatedSeries
    exact: GroupRingElement | None


def zeta_from_kappa(g: GraphLike, exceptional: Sequence[ExceptionalCycleRecord] = (),
                    bound: int | None = None, require_exact: bool = False) -> ZetaResult:
    """zeta = kappa(g) / prod of correction factors.

    The exact quotient is returned when the division is exact.  ``bound``
    defaults to the degree of kappa.
    """
    k = kappa(g)
    corr = corrections(g, exceptional)
    quot = exact_quotient(k, corr)
    if bound is None:
        bound = k.max_degree()
    if quot is None:
        if require_exact:
            raise InexactDivision("kappa is not divisible by the exceptional correction factors")
        warnings.warn("zeta is only known as a truncated series", TruncatedResultWarning)
        series = mul_truncated(k, series_inverse(corr, bound), bound)
        return ZetaResult(TruncatedSeries(series, bound), None)
    return ZetaResult(TruncatedSeries.of(quot, bound), quot)


def normalize_unit(p: GroupRingElement) -> GroupRingElement:
    """Divide by the lowest term so that it becomes +1 at the zero monomial."""
    if p.is_zero():
        raise ZeroPolynomial("cannot normalise zero")
    mono, c = p.terms()[0]
    shifted = p.shift([-x for x in mono.vector], -mono.degree)
    return shifted.scale(Fraction(1) / c)


def graph_b1(g: GraphLike) -> int:
    """Rank of the lattice spanned by the (vector, degree) classes of the simple cycles."""
    core = recurrent_core(g)
    rows = []
    for c in simple_cycles(core):
        m = cycle_class(core, c)
        rows.append(list(m.vector) + [m.degree])
    return int_rank(rows)


def alexander_polynomial(g: GraphLike, exceptional: Sequence[ExceptionalCycleRecord] = (),
                         b1: int | None = None) -> GroupRingElement:
    z = zeta_from_kappa(g, exceptional, require_exact=True).exact
    if b1 is None:
        b1 = graph_b1(g)
    if b1 < 1:
        raise ValueError("b1 must be positive")
    if b1 == 1:
        if any(any(m.vector) for m, _ in z.terms()):
            raise AmbiguousT("b1 = 1 but zeta involves nonzero homology vectors")
        t = GroupRingElement.monomial((0,) * z.b, 1)
        z = z * (1 - t) ** 2
    return normalize_unit(z)


def degree_spread(p: GroupRingElement) -> int:
    if p.is_zero():
        raise ZeroPolynomial("zero has no degree spread")
    return p.max_degree() - p.min_degree()


def check_degree_formula(delta: GroupRingElement, chi: int, b1: int) -> bool:
    expected = -chi if b1 > 1 else -chi + 2
    return degree_spread(delta) == expected


def smith_normal_form(a: Sequence[Sequence[int]]) -> list[int]:
    """Invariant factors d1 | d2 | ... (zeros included, up to min(rows, cols))."""
    m = [list(map(int, r)) for r in a]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    diag = []
    for t in range(min(rows, cols)):
        # bring the smallest nonzero entry of the trailing block to (t, t)
        while True:
            nz = [(abs(m[i][j]), i, j) for i in range(t, rows) for j in range(t, cols) if m[i][j]]
            if not nz:
                break
            _, i, j = min(nz)
            m[t], m[i] = m[i], m[t]
            for r in m:
                r[t], r[j] = r[j], r[t]
            p = m[t][t]
            done = True
            for i in range(t + 1, rows):
                q = m[i][t] // p
                if q:
                    m[i] = [x - q * y for x, y in zip(m[i], m[t])]
                if m[i][t]:
                    done = False
            for j in range(t + 1, cols):
                q = m[t][j] // p
                if q:
                    for r in m:
                        r[j] -= q * r[t]
                if m[t][j]:
                    done = False
            if not done:
                continue
            bad = next(
                ((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols) if m[i][j] % p),
                None,
            )
            if bad is None:
                break
            # fold a row with a non-multiple into row t and repeat
            m[t] = [x + y for x, y in zip(m[t], m[bad[0]])]
        diag.append(abs(m[t][t]) if t < rows and t < cols else 0)
    return diag


@dataclass(frozen=True)
class MappingTorusHomology:
    b1: int
    torsion: tuple[int, ...]
    invariant_factors: tuple[int, ...]


def homology_of_mapping_torus(a: Sequence[Sequence[int]]) -> MappingTorusHomology:
    """First Betti number and torsion of the mapping torus from the homological action."""
    n = len(a)
    if any(len(r) != n for r in a):
        raise ValueError("homological action must be square")
    if n:
        from ._exact import rank
        if rank(a) < n:
            warnings.warn("homological action is singular over Q")
    i_minus = [[int(i == j) - int(a[i][j]) for j in range(n)] for i in range(n)]
    factors = smith_normal_form(i_minus) if n else []
    nullity = sum(1 for d in factors if d == 0)
    torsion = tuple(d for d in factors if d > 1)
    return MappingTorusHomology(1 + nullity, torsion, tuple(factors))


@dataclass(frozen=True)
class SingleVariableAlexander:
    polynomial: GroupRingElement
    palindromic: bool
    monic: bool
    degree: int


def alexander_single_variable(a: Sequence[Sequence[int]]) -> SingleVariableAlexander:
    """det(1 - t A) with palindrome and monicity checks."""
    n = len(a)
    t = GroupRingElement.monomial((), 1)
    m = RingMatrix.from_rows([[t.scale(int(a[i][j])) for j in range(n)] for i in range(n)], 0)
    p = det_division_free(m.identity_minus(), cap=max(n, caps.cap("det")))
    deg = p.max_degree() if not p.is_zero() else 0
    coeffs = [p.coefficient(k) for k in range(deg + 1)]
    palindromic = coeffs == coeffs[::-1]
    monic = abs(coeffs[0]) == 1 and abs(coeffs[-1]) == 1
    return SingleVariableAlexander(p, palindromic, monic, deg)


def primitive_cycles(g: GraphLike, bound: int, cap: int | None = None) -> list[tuple[int, ...]]:
    """Primitive closed walks of total weight <= bound, each as its Lyndon edge word.

    Words are grown letter by letter and pruned as soon as they stop being
    prenecklaces (the FKM test), so only Lyndon candidates are explored.
    """
    limit = caps.cap("walks") if cap is None else cap
    view = as_subgraph(g)
    graph = view.graph
    out_edges: dict[int, list[int]] = {v: [] for v in view.vertices}
    for i in sorted(view.edges):
        out_edges[graph.edges[i].source].append(i)
    found = []
    steps = 0
    for s in sorted(view.edges):
        start = graph.edges[s].source
        # (word, weight, period of the longest Lyndon prefix structure)
        stack = [((s,), graph.edges[s].weight, 1)]
        while stack:
            word, wt, per = stack.pop()
            steps += 1
            if steps > limit:
                raise WalkCapExceeded(f"more than {limit} walk extensions up to degree {bound}")
            last = graph.edges[word[-1]]
            if last.target == start and per == len(word):
                found.append(word)
            n = len(word)
            for e in out_edges[last.target]:
                w2 = wt + graph.edges[e].weight
                if w2 > bound:
                    continue
                ref = word[n - per]
                if e < ref:
                    continue
                stack.append((word + (e,), w2, per if e == ref else n + 1))
    found.sort(key=lambda w: (len(w), w))
    return found


def _geometric(a: GroupRingElement, bound: int) -> GroupRingElement:
    # (1 - a)^-1 truncated
    one = GroupRingElement.one(a.b)
    acc, power = one, one
    while True:
        power = mul_truncated(power, a, bound)
        if power.is_zero():
            return acc
        acc = acc + power


def trajectory_factor(a: GroupRingElement, pn: int, po: int, bound: int) -> GroupRingElement:
    """(1 - a)^-1 (1 - a^po)^(pn/po) truncated at ``bound``."""
    one = GroupRingElement.one(a.b)
    tail = one
    base = (one - a ** po).truncate(bound)
    for _ in range(pn // po):
        tail = mul_truncated(tail, base, bound)
    return mul_truncated(_geometric(a, bound), tail, bound)


def zeta_product_oracle(g: GraphLike, exceptional: Sequence[ExceptionalCycleRecord] = (),
                        bound: int = 10) -> TruncatedSeries:
    """Product over primitive periodic trajectories, truncated at ``bound``.

    Ordinary cycles count as regular trajectories (pn = 2, po = 1 for sign +1
    and po = 2 for sign -1).  Each exceptional record contributes one factor
    and its graph cycles are left out of the ordinary product.
    """
    view = as_subgraph(g)
    resolved = resolve_records(view, exceptional)
    listed = set()
    for rec, cycles in zip(exceptional, resolved):
        if len(cycles) != rec.expected_cycle_count():
            raise InconsistentExceptionalData(
                f"{rec.type_content} record with pn={rec.pn}, po={rec.po} should list "
                f"{rec.expected_cycle_count()} cycles, found {len(cycles)}"
            )
        for c in cycles:
            k = min(range(len(c.edges)), key=lambda i: c.edges[i])
            listed.add(c.edges[k:] + c.edges[:k])
    b = view.graph.b
    prod = GroupRingElement.one(b)
    for word in primitive_cycles(view, bound):
        if word in listed:
            continue
        m = cycle_class(view, word)
        a = GroupRingElement.monomial(m.vector, m.degree)
        sign = 1
        for i in word:
            sign *= view.graph.edges[i].sign
        po = 1 if sign == 1 else 2
        prod = mul_truncated(prod, trajectory_factor(a, 2, po, bound), bound)
    for rec in exceptional:
        a = trajectory_monomial(view, rec)
        prod = mul_truncated(prod, trajectory_factor(a, rec.pn, rec.po, bound), bound)
    return TruncatedSeries(prod, bound)
