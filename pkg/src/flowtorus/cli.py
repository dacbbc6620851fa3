"""Command line front end.

Every command reads one JSON document (``--input``) and prints a text or
JSON report.  Exit status: 0 ok, 1 invalid input, 2 computation error,
3 size cap exceeded.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from fractions import Fraction
from typing import Any

from . import caps
from .covers import (
    DeckAction,
    check_deck_action,
    criterion_check,
    derived_cover,
    dominance_report,
    gamma_orbits_of_faces,
    lifted_hull_projection,
)
from .digraph import TransitionGraph, subgraph
from .document import (
    InputDocument,
    dumps,
    element_to_json,
    encode_number,
    graph_to_json,
    parse_input,
    point_to_json,
)
from .errors import FlowTorusError, ValidationError
from .hull import DirectionHull, classify_face, direction_hull
from .laurent import GroupRingElement, ell1_norm
from .mahler import check_lemma_l1_bound, find_mq, lm_sequence, mahler_multivariate
from .zeta import (
    alexander_polynomial,
    alexander_single_variable,
    check_degree_formula,
    graph_b1,
    homology_of_mapping_torus,
    kappa,
    zeta_from_kappa,
)

COMMANDS = (
    "validate", "hull", "faces", "kappa", "zeta", "alexander", "homology-action", "mahler",
    "cover", "orbits", "dominance", "criterion", "lm", "find-mq",
)


def _pt(p) -> str:
    return "(" + ", ".join(str(Fraction(x)) for x in p) + ")"


def _hull_json(h: DirectionHull) -> dict:
    return {
        "dim": h.dim,
        "points": [point_to_json(p) for p in h.points],
        "vertices": [point_to_json(h.vertex_point(v)) for v in h.vertices],
        "faces": [{"id": f.index, "dim": f.dim, "cycles": list(f.cycles),
                   "points": sorted(f.points)} for f in h.faces],
        "facets": [{"normal": list(f.normal), "offset": f.offset, "points": sorted(f.points)}
                   for f in h.facets],
    }


def _acting_graph(doc: InputDocument) -> tuple[TransitionGraph, DeckAction]:
    """The derived cover with its deck group when a cover is given, else the input graph."""
    if doc.cover is not None:
        dc = derived_cover(doc.graph, doc.cover)
        return dc.graph, dc.action
    action = doc.deck_action or DeckAction.trivial(doc.graph)
    return doc.graph, action


def _target_polynomial(doc: InputDocument) -> GroupRingElement:
    if doc.polynomial is not None:
        return doc.polynomial
    return alexander_polynomial(doc.graph, doc.exceptional, doc.b1)


def cmd_validate(doc: InputDocument, args) -> tuple[str, Any]:
    g = doc.graph
    obj = {"valid": True, "vertices": g.n_vertices, "edges": len(g.edges), "b": g.b,
           "exceptional_records": len(doc.exceptional)}
    text = f"valid: {g.n_vertices} vertices, {len(g.edges)} edges, b={g.b}, {len(doc.exceptional)} exceptional records"
    return text, obj


def cmd_hull(doc, args):
    h = direction_hull(doc.graph)
    obj = _hull_json(h)
    lines = [f"dimension {h.dim}", "vertices:"]
    lines += [f"  {_pt(h.vertex_point(v))}" for v in h.vertices]
    counts: dict[int, int] = {}
    for f in h.faces:
        counts[f.dim] = counts.get(f.dim, 0) + 1
    lines.append("faces by dimension: " + ", ".join(f"{d}: {counts[d]}" for d in sorted(counts)))
    lines.append(f"facets: {len(h.facets)}")
    return "\n".join(lines), obj


def cmd_faces(doc, args):
    h = direction_hull(doc.graph)
    rows = []
    lines = []
    for f in h.faces:
        cls = classify_face(h, f.index, doc.exceptional)
        rows.append({"id": f.index, "dim": f.dim, "codim": h.codim(f.index),
                     "cycles": list(f.cycles), "classification": cls})
        lines.append(f"face {f.index}: dim {f.dim}, cycles {list(f.cycles)}, {cls}")
    return "\n".join(lines), {"faces": rows}


def cmd_kappa(doc, args):
    target = doc.graph if args.subgraph is None else subgraph(doc.graph, args.subgraph)
    k = kappa(target)
    return f"kappa = {k}", {"kappa": element_to_json(k)}


def cmd_zeta(doc, args):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        z = zeta_from_kappa(doc.graph, doc.exceptional, bound=args.truncate)
    if z.exact is not None and args.truncate is None:
        return f"zeta = {z.exact}", {"zeta": element_to_json(z.exact), "exact": True}
    s = z.series
    return (f"zeta = {s.element} + O(t^{s.bound + 1})",
            {"zeta": element_to_json(s.element), "exact": z.exact is not None, "bound": s.bound})


def cmd_alexander(doc, args):
    b1 = doc.b1 if doc.b1 is not None else graph_b1(doc.graph)
    d = alexander_polynomial(doc.graph, doc.exceptional, b1)
    obj = {"alexander": element_to_json(d), "b1": b1}
    text = f"b1 = {b1}\nalexander = {d}"
    if doc.chi_S is not None:
        ok = check_degree_formula(d, doc.chi_S, b1)
        obj["degree_formula"] = ok
        text += f"\ndegree formula: {'holds' if ok else 'fails'}"
    return text, obj


def cmd_homology_action(doc, args):
    if doc.homological_action is None:
        raise ValidationError("document has no homological_action")
    a = doc.homological_action
    hom = homology_of_mapping_torus(a)
    sv = alexander_single_variable(a)
    obj = {"b1": hom.b1, "torsion": list(hom.torsion), "invariant_factors": list(hom.invariant_factors),
           "alexander": element_to_json(sv.polynomial), "palindromic": sv.palindromic, "monic": sv.monic}
    lines = [f"b1 = {hom.b1}", f"torsion = {list(hom.torsion)}",
             f"invariant factors = {list(hom.invariant_factors)}",
             f"det(1 - tA) = {sv.polynomial}", f"palindromic: {sv.palindromic}, monic: {sv.monic}"]
    if doc.chi_S is not None:
        ok = check_degree_formula(sv.polynomial, doc.chi_S, hom.b1)
        obj["degree_formula"] = ok
        lines.append(f"degree formula: {'holds' if ok else 'fails'}")
    return "\n".join(lines), obj


def cmd_mahler(doc, args):
    q = _target_polynomial(doc)
    est = mahler_multivariate(q, samples=args.samples, seed=args.seed)
    obj = {"polynomial": element_to_json(q), "value": repr(est.value),
           "standard_error": repr(est.standard_error), "method": est.method,
           "samples": est.samples, "discarded": est.discarded}
    text = (f"polynomial = {q}\nmahler measure = {est.value:.12g} +- {est.standard_error:.3g} "
            f"({est.method}, {est.samples} samples)")
    return text, obj


def cmd_cover(doc, args):
    if doc.cover is None:
        raise ValidationError("document has no cover")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        dc = derived_cover(doc.graph, doc.cover)
        base = direction_hull(doc.graph)
        cover = direction_hull(dc.graph)
        table = lifted_hull_projection(base, cover, dc.fold)
    rows = [{"base_face": r.base_face, "cover_face": r.cover_face, "base_codim": r.base_codim,
             "cover_codim": r.cover_codim} for r in table.rows]
    obj = {"graph": graph_to_json(dc.graph), "group_order": len(dc.group),
           "components": [list(c) for c in dc.components], "fold": [list(r) for r in dc.fold],
           "preimages": rows, "codim_preserved": table.consistent, "surjective": table.surjective}
    lines = [f"derived cover: {dc.graph.n_vertices} vertices, {len(dc.graph.edges)} edges, b={dc.graph.b}",
             f"group order {len(dc.group)}, {len(dc.components)} component(s)",
             "fold matrix: " + str([list(r) for r in dc.fold]), "face preimages:"]
    for r in table.rows:
        flag = "" if r.codim_preserved else "  codimension changed"
        lines.append(f"  base face {r.base_face} (codim {r.base_codim}) -> cover face "
                     f"{r.cover_face} (codim {r.cover_codim}){flag}")
    return "\n".join(lines), obj


def cmd_orbits(doc, args):
    g, action = _acting_graph(doc)
    check_deck_action(g, action)
    h = direction_hull(g)
    orbits = gamma_orbits_of_faces(h, action)
    obj = {"orbits": [{"faces": list(o.faces), "dim": o.dim, "disjoint": o.disjoint} for o in orbits]}
    lines = [f"orbit {list(o.faces)}: dim {o.dim}{', disjoint' if o.disjoint else ''}" for o in orbits]
    return "\n".join(lines), obj


def cmd_dominance(doc, args):
    h = direction_hull(doc.graph)
    ids = [args.face] if args.face is not None else [f.index for f in h.faces]
    rows, lines = [], []
    for fid in ids:
        r = dominance_report(doc.graph, h, fid, doc.exceptional)
        rows.append({"face": fid, "support_edges": sorted(r.support.edges), "classification": r.classification,
                     "zeta_face_part": element_to_json(r.zeta_face_part), "dominant": r.dominant})
        lines.append(f"face {fid}: {r.classification}, zeta[E] = {r.zeta_face_part}, "
                     f"{'dominant' if r.dominant else 'not dominant'}")
    return "\n".join(lines), {"reports": rows}


def cmd_criterion(doc, args):
    chi = args.chi if args.chi is not None else doc.chi_S
    if chi is None:
        raise ValidationError("criterion needs chi_S (document field or --chi)")
    g, action = _acting_graph(doc)
    exceptional = doc.exceptional if doc.cover is None else ()
    h = direction_hull(g)
    r = criterion_check(g, h, action, exceptional, chi, samples=args.samples, seed=args.seed,
                        b0=doc.b0, b1=doc.b1 if doc.cover is None else None)
    obj = {"count": r.count, "threshold": r.threshold, "passed": r.passed,
           "orbits": [list(o.faces) for o in r.chosen]}
    lines = [f"{'PASS' if r.passed else 'FAIL'}: s = {r.count}, threshold = {r.threshold}",
             "orbits: " + ", ".join(str(list(o.faces)) for o in r.chosen)]
    if r.passed:
        est = r.mahler
        obj.update({"alexander": element_to_json(r.delta), "mahler": repr(est.value),
                    "standard_error": repr(est.standard_error), "mahler_exceeds_one": r.mahler_exceeds_one})
        lines.append(f"mahler measure of alexander = {est.value:.12g} +- {est.standard_error:.3g}"
                     f" ({'exceeds 1 by 3 standard errors' if r.mahler_exceeds_one else 'not separated from 1'})")
        if r.l1_checks:
            obj["l1_checks"] = [{"faces": list(f), "norm": encode_number(n), "bound": encode_number(b), "ok": ok}
                                for f, n, b, ok in r.l1_checks]
            for f, n, b, ok in r.l1_checks:
                lines.append(f"  orbit {list(f)}: max ||L_m||_1 = {n}, bound {b}: {'ok' if ok else 'fails'}")
    return "\n".join(lines), obj


def _lm_polynomial(doc: InputDocument) -> GroupRingElement:
    return doc.polynomial if doc.polynomial is not None else kappa(doc.graph)


def cmd_lm(doc, args):
    q = _lm_polynomial(doc)
    seq = lm_sequence(q, args.upto)
    obj = {"polynomial": element_to_json(q),
           "L": [element_to_json(x) for x in seq.entries],
           "l1_norms": [encode_number(ell1_norm(x)) for x in seq.entries]}
    lines = [f"q = {q}"] + [f"L_{m} = {seq[m]}" for m in range(1, len(seq) + 1)]
    if q.is_integral():
        rep = check_lemma_l1_bound(q, args.upto)
        obj["bound_holds"] = rep.holds_up_to_M
        obj["first_violation"] = rep.first_violation
        lines.append(f"||L_m||_1 <= {rep.degree} for m <= {args.upto}: "
                     + ("yes" if rep.holds_up_to_M else f"no, first violation at m = {rep.first_violation}"))
    return "\n".join(lines), obj


def cmd_find_mq(doc, args):
    q = _lm_polynomial(doc)
    if args.prime is None:
        raise ValidationError("find-mq needs --prime")
    evals = args.eval or []
    m = find_mq(q, args.prime, evals)
    return f"m_q = {m} (p = {args.prime})", {"m_q": m, "prime": args.prime, "eval": list(evals)}


HANDLERS = {
    "validate": cmd_validate, "hull": cmd_hull, "faces": cmd_faces, "kappa": cmd_kappa,
    "zeta": cmd_zeta, "alexander": cmd_alexander, "homology-action": cmd_homology_action,
    "mahler": cmd_mahler, "cover": cmd_cover, "orbits": cmd_orbits, "dominance": cmd_dominance,
    "criterion": cmd_criterion, "lm": cmd_lm, "find-mq": cmd_find_mq,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", required=True, help="JSON input document")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--cap", help="size caps: an integer (cycles) or name=value,...")
    parser = argparse.ArgumentParser(prog="flowtorus", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "kappa":
            p.add_argument("--subgraph", type=int, nargs="+", help="edge ids")
        elif name == "zeta":
            p.add_argument("--truncate", type=int)
        elif name in ("mahler", "criterion"):
            p.add_argument("--samples", type=int, default=10000)
            p.add_argument("--seed", type=int, default=0)
            if name == "criterion":
                p.add_argument("--chi", type=int)
        elif name == "dominance":
            p.add_argument("--face", type=int)
        elif name == "lm":
            p.add_argument("--upto", type=int, default=10)
        elif name == "find-mq":
            p.add_argument("--prime", type=int)
            p.add_argument("--eval", type=int, nargs="*")
    return parser


def run_command(cmd: str, doc: InputDocument, args) -> tuple[str, Any]:
    return HANDLERS[cmd](doc, args)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    caps.reset_caps()
    try:
        if args.cap:
            caps.set_caps(**caps.parse_cap_spec(args.cap))
        doc = parse_input(args.input)
        text, obj = run_command(args.command, doc, args)
    except FlowTorusError as exc:
        kind = type(exc).__name__
        if args.format == "json":
            print(dumps({"error": kind, "message": str(exc), "exit_code": exc.exit_code}))
        else:
            print(f"error ({kind}):", file=sys.stderr)
            for line in str(exc).splitlines():
                print(f"  {line}", file=sys.stderr)
        return exc.exit_code
    finally:
        caps.reset_caps()
    print(dumps({"command": args.command, **obj}) if args.format == "json" else text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
