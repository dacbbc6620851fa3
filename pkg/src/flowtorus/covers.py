"""Regular finite covers of transition graphs and group actions on hulls.

A cover is given by a voltage assignment: every edge of the base carries an
element of a finite permutation group G.  The derived graph has vertices
(v, g) and an edge (v, g) -> (w, g * voltage(e)) for each base edge e: v -> w.
G acts on it by left multiplication, which commutes with forgetting the G
coordinate.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .digraph import (
    Edge,
    ExceptionalCycleRecord,
    GraphLike,
    Subgraph,
    TransitionGraph,
    as_subgraph,
    canonical_abstract_labels,
    cycle_class,
    fundamental_cycle_chain,
    is_irreducible,
    resolve_records,
    simple_cycles,
    spanning_forest,
    strong_components,
    subgraph,
)
from .errors import (
    ActionDoesNotPreserveHull,
    ChainNotNested,
    DisconnectedCoverWarning,
    InexactDivision,
    NotIrreducible,
    ParseError,
    ValidationError,
)
from .hull import DirectionHull, apply_linear, classify_face, direction_hull, polytope_projection, support_subgraph
from .laurent import GroupRingElement, exact_quotient, ell1_norm
from .mahler import MahlerEstimate, lm_sequence, mahler_multivariate
from .zeta import alexander_polynomial, correction_factor, kappa, kappa_face_part, trajectory_monomial

Perm = tuple[int, ...]
Matrix = tuple[tuple[int, ...], ...]


def compose(a: Perm, b: Perm) -> Perm:
    """(a b)(i) = a(b(i))."""
    return tuple(a[i] for i in b)


def group_closure(generators: Sequence[Perm]) -> list[Perm]:
    """All elements generated by ``generators``, sorted (identity first)."""
    gens = [tuple(g) for g in generators]
    if not gens:
        raise ParseError("a cover needs at least one generator")
    d = len(gens[0])
    for g in gens:
        if len(g) != d or sorted(g) != list(range(d)):
            raise ParseError(f"{list(g)} is not a permutation of 0..{d - 1}")
    ident = tuple(range(d))
    seen = {ident}
    todo = [ident]
    while todo:
        x = todo.pop()
        for g in gens:
            y = compose(x, g)
            if y not in seen:
                seen.add(y)
                todo.append(y)
    return sorted(seen)


@dataclass(frozen=True)
class CoverSpec:
    generators: tuple[Perm, ...]
    voltage: tuple[Perm, ...]  # one group element per base edge

    @classmethod
    def cyclic(cls, k: int, voltages: Sequence[int]) -> "CoverSpec":
        """Z/k as rotations of 0..k-1, voltage s meaning rotation by s."""
        rot = lambda s: tuple((i + s) % k for i in range(k))  # noqa: E731
        return cls((rot(1),), tuple(rot(s) for s in voltages))

    def elements(self) -> list[Perm]:
        return group_closure(self.generators)

    def errors(self, g: TransitionGraph) -> list[str]:
        out = []
        try:
            group = set(self.elements())
        except ParseError as exc:
            return [str(exc)]
        if len(self.voltage) != len(g.edges):
            out.append(f"voltage has {len(self.voltage)} entries for {len(g.edges)} edges")
        for i, v in enumerate(self.voltage):
            if tuple(v) not in group:
                out.append(f"edge {i}: voltage {list(v)} is not in the group")
        return out


@dataclass(frozen=True)
class DeckAction:
    """A finite group acting on a labeled graph.

    ``matrices[k]`` acts on homology classes of cycles; for graphs with
    abstract labels it is only defined on the cycle lattice, not edge by edge.
    """

    vertex_perms: tuple[Perm, ...]
    edge_perms: tuple[Perm, ...]
    matrices: tuple[Matrix, ...]

    def __len__(self) -> int:
        return len(self.vertex_perms)

    @classmethod
    def trivial(cls, g: GraphLike) -> "DeckAction":
        graph = as_subgraph(g).graph
        ident = tuple(tuple(int(i == j) for j in range(graph.b)) for i in range(graph.b))
        return cls((tuple(range(graph.n_vertices)),), (tuple(range(len(graph.edges))),), (ident,))

    def map_class(self, k: int, vector: Sequence[int]) -> tuple[int, ...]:
        return tuple(sum(a * x for a, x in zip(row, vector)) for row in self.matrices[k])


def deck_action_errors(g: GraphLike, action: DeckAction) -> list[str]:
    """Automorphism, class compatibility on simple cycles and closure under composition."""
    graph = as_subgraph(g).graph
    out = []
    n, m, b = graph.n_vertices, len(graph.edges), graph.b
    if not (len(action.vertex_perms) == len(action.edge_perms) == len(action.matrices)):
        return ["deck action lists have different lengths"]
    for k, (vp, ep, mat) in enumerate(zip(action.vertex_perms, action.edge_perms, action.matrices)):
        if sorted(vp) != list(range(n)) or sorted(ep) != list(range(m)):
            out.append(f"element {k}: not a permutation of vertices and edges")
            continue
        if len(mat) != b or any(len(r) != b for r in mat):
            out.append(f"element {k}: matrix is not {b}x{b}")
            continue
        for i, e in enumerate(graph.edges):
            f = graph.edges[ep[i]]
            if (f.source, f.target) != (vp[e.source], vp[e.target]):
                out.append(f"element {k}: edge {i} is not mapped along its endpoints")
            elif f.sign != e.sign or f.weight != e.weight:
                out.append(f"element {k}: edge {i} changes sign or weight")
    if out:
        return out
    cycles = simple_cycles(graph)
    for k in range(len(action)):
        ep = action.edge_perms[k]
        for c in cycles:
            src = cycle_class(graph, c)
            dst = cycle_class(graph, [ep[i] for i in c.edges])
            if action.map_class(k, src.vector) != dst.vector:
                out.append(f"element {k}: matrix disagrees with the image of cycle {list(c.edges)}")
                break
    index = {(vp, ep): k for k, (vp, ep) in enumerate(zip(action.vertex_perms, action.edge_perms))}
    for a in range(len(action)):
        for c in range(len(action)):
            key = (compose(action.vertex_perms[a], action.vertex_perms[c]),
                   compose(action.edge_perms[a], action.edge_perms[c]))
            if key not in index:
                out.append(f"elements {a} and {c}: product is not listed")
    return out


def check_deck_action(g: GraphLike, action: DeckAction) -> None:
    errs = deck_action_errors(g, action)
    if errs:
        raise ValidationError("; ".join(errs))


@dataclass(frozen=True)
class DerivedCover:
    graph: TransitionGraph
    action: DeckAction
    group: tuple[Perm, ...]
    vertex_projection: tuple[int, ...]
    edge_projection: tuple[int, ...]
    fold: Matrix  # cover cycle coordinates -> base homology
    components: tuple[tuple[int, ...], ...]

    def project_vertex(self, v: int) -> int:
        return self.vertex_projection[v]

    def project_edge(self, e: int) -> int:
        return self.edge_projection[e]


def _weak_components(n: int, edges: Iterable[Edge]) -> list[tuple[int, ...]]:
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in edges:
        parent[find(e.source)] = find(e.target)
    groups: dict[int, list[int]] = {}
    for v in range(n):
        groups.setdefault(find(v), []).append(v)
    return sorted(tuple(vs) for vs in groups.values())


def derived_cover(g: TransitionGraph, spec: CoverSpec, labels: str = "abstract") -> DerivedCover:
    """The derived graph of a voltage assignment.

    Vertex (v, g) has index v*|G| + index(g) and the lift of edge e starting
    at (source, g) has index e*|G| + index(g).  With ``labels="abstract"``
    the cover gets cycle-space coordinates (weights are inherited) and
    ``fold`` maps them to base classes.  With ``labels="inherit"`` every lift
    keeps the base label and ``fold`` is the identity.
    """
    errs = spec.errors(g)
    if errs:
        raise ValidationError("; ".join(errs))
    group = spec.elements()
    order = len(group)
    pos = {x: k for k, x in enumerate(group)}
    edges = []
    eproj = []
    for i, e in enumerate(g.edges):
        volt = tuple(spec.voltage[i])
        for k, x in enumerate(group):
            s = e.source * order + k
            t = e.target * order + pos[compose(x, volt)]
            edges.append(Edge(s, t, e.sign, e.hvec, e.weight))
            eproj.append(i)
    n = g.n_vertices * order
    vproj = tuple(v // order for v in range(n))
    names = None
    if g.vertex_names:
        names = tuple(f"{g.vertex_names[v]}.{k}" for v in range(g.n_vertices) for k in range(order))
    raw = TransitionGraph(n, tuple(edges), g.b, names)

    # left multiplication
    vperms, eperms = [], []
    for x in group:
        left = [pos[compose(x, y)] for y in group]
        vperms.append(tuple((v // order) * order + left[v % order] for v in range(n)))
        eperms.append(tuple((j // order) * order + left[j % order] for j in range(len(edges))))

    if labels == "inherit":
        cover = raw
        ident = tuple(tuple(int(i == j) for j in range(g.b)) for i in range(g.b))
        matrices = [ident] * order
        fold = ident
    elif labels == "abstract":
        abstract = canonical_abstract_labels(raw)
        cover = TransitionGraph(
            n, tuple(Edge(a.source, a.target, a.sign, a.hvec, e.weight)
                     for a, e in zip(abstract.edges, raw.edges)),
            abstract.b, names,
        )
        tree, rest = spanning_forest(cover)
        chains = [fundamental_cycle_chain(cover, e, tree) for e in rest]
        fold_cols = []
        for ch in chains:
            fold_cols.append([sum(c * g.edges[eproj[j]].hvec[r] for j, c in ch.items()) for r in range(g.b)])
        fold = tuple(tuple(fold_cols[c][r] for c in range(len(rest))) for r in range(g.b))
        matrices = []
        for ep in eperms:
            cols = []
            for ch in chains:
                img = {ep[j]: c for j, c in ch.items()}
                cols.append([img.get(e, 0) for e in rest])
            matrices.append(tuple(tuple(cols[c][r] for c in range(len(rest))) for r in range(len(rest))))
    else:
        raise ValueError(f"unknown labelling {labels!r}")

    components = _weak_components(n, cover.edges)
    if len(components) > 1:
        warnings.warn(f"derived cover has {len(components)} components", DisconnectedCoverWarning)
    action = DeckAction(tuple(vperms), tuple(eperms), tuple(matrices))
    return DerivedCover(cover, action, tuple(group), vproj, tuple(eproj), fold, tuple(components))


def pushforward(p: GroupRingElement, fold: Sequence[Sequence[int]]) -> GroupRingElement:
    """Image of p under the monomial map x^v t^d -> x^(fold v) t^d."""
    b = len(fold)
    out = GroupRingElement.zero(b)
    for mono, c in p.terms():
        out = out + GroupRingElement.monomial(
            [sum(a * x for a, x in zip(row, mono.vector)) for row in fold], mono.degree, c
        )
    return out


@dataclass(frozen=True)
class FacePreimage:
    base_face: int
    cover_face: int | None
    base_codim: int
    cover_codim: int | None

    @property
    def codim_preserved(self) -> bool:
        return self.cover_face is not None and self.base_codim == self.cover_codim


@dataclass(frozen=True)
class LiftedProjection:
    rows: tuple[FacePreimage, ...]
    surjective: bool

    @property
    def all_faces(self) -> bool:
        return all(r.cover_face is not None for r in self.rows)

    @property
    def consistent(self) -> bool:
        return all(r.codim_preserved for r in self.rows)

    def codim_changes(self) -> list[FacePreimage]:
        return [r for r in self.rows if not r.codim_preserved]


def lifted_hull_projection(base: DirectionHull, cover: DirectionHull,
                           linear_map: Sequence[Sequence[int]]) -> LiftedProjection:
    """Preimage in the cover hull of each closed face of the base hull.

    Raises InconsistentProjection when a cover point maps outside the base
    hull.  Codimension changes are reported, not raised.
    """
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        proj = polytope_projection(cover, linear_map, base)
    for w in caught:
        warnings.warn_explicit(w.message, w.category, w.filename, w.lineno)
    rows = []
    for f in base.faces:
        cf = proj.preimage[f.index]
        rows.append(FacePreimage(f.index, cf, base.codim(f.index), cover.codim(cf) if cf is not None else None))
    return LiftedProjection(tuple(rows), proj.surjective)


@dataclass(frozen=True)
class FaceOrbit:
    faces: tuple[int, ...]
    disjoint: bool
    dim: int


def _image_face(h: DirectionHull, pts: Iterable[int], mat: Matrix) -> int:
    images = [apply_linear(mat, h.points[k]) for k in pts]
    for x in images:
        if not h.contains(x):
            raise ActionDoesNotPreserveHull(f"point {[str(v) for v in x]} leaves the hull")
    keep = frozenset(range(len(h.points)))
    for f in h.facets:
        if all(f.value(x) == 0 for x in images):
            keep &= f.points
    return h.face_with_points(keep)


def face_images(h: DirectionHull, action: DeckAction) -> list[list[int]]:
    """images[k][face] for every group element k."""
    out = []
    for mat in action.matrices:
        row = []
        for f in h.faces:
            img = _image_face(h, f.points, mat)
            if h.faces[img].dim != f.dim:
                raise ActionDoesNotPreserveHull(f"face {f.index} changes dimension")
            row.append(img)
        out.append(row)
    return out


def gamma_orbits_of_faces(h: DirectionHull, action: DeckAction) -> list[FaceOrbit]:
    """Orbits of the face lattice under the induced linear action, sorted by smallest face id."""
    images = face_images(h, action)
    seen: set[int] = set()
    orbits = []
    for f in h.faces:
        if f.index in seen:
            continue
        orbit = sorted({row[f.index] for row in images} | {f.index})
        seen.update(orbit)
        pts = [h.faces[i].points for i in orbit]
        disjoint = all(not (pts[i] & pts[j]) for i in range(len(pts)) for j in range(i))
        orbits.append(FaceOrbit(tuple(orbit), disjoint, f.dim))
    return orbits


@dataclass(frozen=True)
class DominanceReport:
    face: int
    support: Subgraph
    classification: str
    zeta_face_part: GroupRingElement
    dominant: bool


def dominance_report(g: GraphLike, h: DirectionHull, face: int,
                     exceptional: Sequence[ExceptionalCycleRecord] = ()) -> DominanceReport:
    """zeta[E]: kappa of the support, divided by the corrections of carried exceptional records."""
    f = h.face(face)
    view = as_subgraph(g)
    b = view.graph.b
    if not f.cycles:
        empty = subgraph(view, ())
        one = GroupRingElement.one(b)
        return DominanceReport(face, empty, "purely_ordinary", one, False)
    support = support_subgraph(h, face)
    resolve_records(view, exceptional)
    part = kappa(support)
    corr = GroupRingElement.one(b)
    for rec in exceptional:
        if all(set(c) <= support.edges for c in rec.cycles):
            corr = corr * correction_factor(rec, trajectory_monomial(view, rec))
    if not corr.is_one():
        quot = exact_quotient(part, corr)
        if quot is None:
            raise InexactDivision(f"face {face}: kappa of the support is not divisible by its corrections")
        part = quot
    cls = classify_face(h, face, exceptional)
    return DominanceReport(face, support, cls, part, not part.is_one())


@dataclass(frozen=True)
class CriterionReport:
    chosen: tuple[FaceOrbit, ...]
    count: int
    threshold: int
    passed: bool
    delta: GroupRingElement | None = None
    mahler: MahlerEstimate | None = None
    mahler_exceeds_one: bool | None = None
    l1_checks: tuple = field(default=())


def criterion_check(g: GraphLike, h: DirectionHull, action: DeckAction,
                    exceptional: Sequence[ExceptionalCycleRecord], chi_S: int,
                    samples: int = 10000, seed: int = 0, b0: int | None = None,
                    b1: int | None = None) -> CriterionReport:
    """Count disjoint invariant dominant face orbits and compare with 1 - chi_S.

    Orbits are taken greedily, lowest dimension first.  On a pass the Mahler
    measure of the Alexander polynomial is estimated; with a fiber component
    count ``b0`` the bound ||L_m(zeta[E])||_1 >= |G|/b0 is also checked.
    """
    if chi_S >= 0:
        raise ValidationError(f"chi_S must be negative, got {chi_S}")
    check_deck_action(g, action)
    orbits = gamma_orbits_of_faces(h, action)
    cache: dict[int, DominanceReport] = {}

    def report(fid: int) -> DominanceReport:
        if fid not in cache:
            cache[fid] = dominance_report(g, h, fid, exceptional)
        return cache[fid]

    used: frozenset[int] = frozenset()
    chosen = []
    for orb in sorted(orbits, key=lambda o: (o.dim, o.faces)):
        if not orb.disjoint:
            continue
        pts = frozenset().union(*(h.faces[i].points for i in orb.faces))
        if pts & used:
            continue
        if any(report(i).dominant for i in orb.faces):
            chosen.append(orb)
            used |= pts
    threshold = 1 - chi_S
    passed = len(chosen) >= threshold
    if not passed:
        return CriterionReport(tuple(chosen), len(chosen), threshold, False)
    delta = alexander_polynomial(g, exceptional, b1)
    est = mahler_multivariate(delta, samples=samples, seed=seed)
    checks = []
    if b0 is not None:
        bound = Fraction(len(action), b0)
        for orb in chosen:
            prod = GroupRingElement.one(delta.b)
            for i in orb.faces:
                prod = prod * report(i).zeta_face_part
            upto = max(1, prod.max_degree())
            norm = max(ell1_norm(x) for x in lm_sequence(prod, upto).entries)
            checks.append((orb.faces, norm, bound, norm >= bound))
    return CriterionReport(tuple(chosen), len(chosen), threshold, True, delta, est,
                           est.exceeds_one_by(3.0), tuple(checks))


@dataclass(frozen=True)
class ClusterReport:
    ok: bool
    diagnostics: tuple[str, ...]
    face_parts: tuple[GroupRingElement, ...]


def cluster_sequence_check(g: GraphLike, chain: Sequence[Iterable[int]], faces: Sequence[int]) -> ClusterReport:
    """Check a nested chain V_0 > V_1 > ... > V_d of irreducible subgraphs.

    ``chain`` gives the edge sets of V_0..V_d and ``faces[n-1]`` is a face id
    E_n of the hull of V_(n-1).  Requires V_n to be a maximal irreducible
    subgraph of the support of E_n, simple cycles of V_n to have distinct
    direction points, and V_d to be a single simple cycle; then kappa(V_0)[E_1]
    is computed.
    """
    view = as_subgraph(g)
    subs = [subgraph(view, edges) for edges in chain]
    if not subs or len(faces) != len(subs) - 1:
        raise ChainNotNested("need d+1 subgraphs and d faces")
    for n in range(1, len(subs)):
        if not subs[n] <= subs[n - 1]:
            raise ChainNotNested(f"V_{n} is not contained in V_{n - 1}")
    for n, s in enumerate(subs):
        if not is_irreducible(s):
            raise NotIrreducible(f"V_{n} is not irreducible")
    diag = []
    parts = []
    for n in range(1, len(subs)):
        h = direction_hull(subs[n - 1])
        fid = faces[n - 1]
        support = support_subgraph(h, fid)
        parts.append(kappa_face_part(subs[n - 1], h, fid))
        comps = [c.edges for c in strong_components(support) if c.edges]
        if subs[n].edges not in comps:
            diag.append(f"V_{n} is not a maximal irreducible subgraph of the support of E_{n}")
        cyc = simple_cycles(subs[n])
        pts = [tuple(Fraction(x, m.degree) for x in m.vector)
               for m in (cycle_class(view, c) for c in cyc)]
        if len(set(pts)) != len(pts):
            diag.append(f"two simple cycles of V_{n} share a direction point")
    last = subs[-1]
    cyc = simple_cycles(last)
    if len(cyc) != 1 or set(cyc[0].edges) != set(last.edges):
        diag.append(f"V_{len(subs) - 1} is not a simple cycle")
    if parts and parts[0].is_one():
        diag.append("kappa(V_0)[E_1] = 1")
    ok = not diag and bool(parts)
    return ClusterReport(ok, tuple(diag), tuple(parts))

