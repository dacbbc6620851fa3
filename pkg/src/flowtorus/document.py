"""JSON input documents and exact JSON encodings of results.

Rationals are written as "p/q" strings and integers beyond 2^53 as decimal
strings, so values survive a round trip unchanged.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from .covers import CoverSpec, DeckAction, deck_action_errors
from .digraph import ExceptionalCycleRecord, TransitionGraph, resolve_records
from .errors import ParseError, ValidationError
from .laurent import GroupRingElement

_SAFE = 2**53


def encode_number(x) -> int | str:
    x = Fraction(x)
    if x.denominator != 1:
        return f"{x.numerator}/{x.denominator}"
    n = x.numerator
    return n if abs(n) < _SAFE else str(n)


def decode_number(x) -> int | Fraction:
    if isinstance(x, bool):
        raise ParseError(f"expected a number, got {x!r}")
    if isinstance(x, int):
        return x
    if isinstance(x, str):
        try:
            v = Fraction(x.strip())
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"not an exact number: {x!r}") from None
        return v.numerator if v.denominator == 1 else v
    if isinstance(x, float) and x.is_integer():
        return int(x)
    raise ParseError(f"expected an exact number, got {x!r}")


def element_to_json(p: GroupRingElement) -> dict:
    return {
        "b": p.b,
        "terms": [{"degree": m.degree, "vector": list(m.vector), "coeff": encode_number(c)}
                  for m, c in p.terms()],
        "text": str(p),
    }


def element_from_json(obj: dict) -> GroupRingElement:
    try:
        b = int(obj["b"])
        out = GroupRingElement.zero(b)
        for t in obj["terms"]:
            vec = [int(v) for v in t["vector"]]
            if len(vec) != b:
                raise ParseError(f"term vector {vec} does not have length b={b}")
            out = out + GroupRingElement.monomial(vec, int(t["degree"]), decode_number(t["coeff"]))
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed polynomial: {exc}") from None
    return out


def point_to_json(p) -> list:
    return [encode_number(x) for x in p]


def point_from_json(p) -> tuple[Fraction, ...]:
    return tuple(Fraction(decode_number(x)) for x in p)


@dataclass(frozen=True)
class InputDocument:
    graph: TransitionGraph
    exceptional: tuple[ExceptionalCycleRecord, ...] = ()
    cover: CoverSpec | None = None
    deck_action: DeckAction | None = None
    chi_S: int | None = None
    b1: int | None = None
    fiber_components: tuple[int, ...] | None = None
    homological_action: tuple[tuple[int, ...], ...] | None = None
    polynomial: GroupRingElement | None = None

    @property
    def b0(self) -> int | None:
        return None if self.fiber_components is None else len(set(self.fiber_components))


def _edge(raw, k: int, errors: list[str]) -> tuple | None:
    if isinstance(raw, dict):
        missing = [f for f in ("source", "target") if f not in raw]
        if missing:
            errors.append(f"edge {k}: missing {', '.join(missing)}")
            return None
        vals = (raw["source"], raw["target"], raw.get("sign", 1), raw.get("hvec", []), raw.get("weight", 1))
    elif isinstance(raw, list) and 4 <= len(raw) <= 5:
        vals = tuple(raw) + ((1,) if len(raw) == 4 else ())
    else:
        errors.append(f"edge {k}: expected an object or [source, target, sign, hvec, weight]")
        return None
    s, t, sign, hvec, w = vals
    ok = True
    for name, v in (("source", s), ("target", t), ("sign", sign), ("weight", w)):
        if not isinstance(v, int) or isinstance(v, bool):
            errors.append(f"edge {k}: {name} must be an integer")
            ok = False
    if not isinstance(hvec, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in hvec):
        errors.append(f"edge {k}: hvec must be a list of integers")
        ok = False
    return (s, t, sign, tuple(hvec), w) if ok else None


def _int_matrix(raw, name: str, errors: list[str]) -> tuple[tuple[int, ...], ...] | None:
    if not isinstance(raw, list) or not all(isinstance(r, list) for r in raw):
        errors.append(f"{name}: expected a list of rows")
        return None
    try:
        return tuple(tuple(int(decode_number(x)) for x in r) for r in raw)
    except (ParseError, TypeError) as exc:
        errors.append(f"{name}: {exc}")
        return None


def document_from_json(data: Any) -> InputDocument:
    """Validate a decoded JSON document, reporting every problem found."""
    errors: list[str] = []
    if not isinstance(data, dict):
        raise ParseError("top level must be a JSON object")
    graph_raw = data.get("graph")
    if not isinstance(graph_raw, dict):
        raise ValidationError("missing 'graph' object")
    verts = graph_raw.get("vertices", 0)
    names = None
    if isinstance(verts, list):
        names = [str(v) for v in verts]
        n = len(names)
    elif isinstance(verts, int) and not isinstance(verts, bool):
        n = verts
    else:
        errors.append("graph.vertices must be a count or a list of names")
        n = 0
    edges = []
    for k, raw in enumerate(graph_raw.get("edges", [])):
        e = _edge(raw, k, errors)
        if e is not None:
            edges.append(e)
    b = graph_raw.get("b")
    if b is None:
        b = len(edges[0][3]) if edges else 0
    graph = None
    if not errors:
        try:
            graph = TransitionGraph.build(n, edges, int(b), names)
        except ParseError as exc:
            for msg in str(exc).split("; "):
                errors.append(msg + (f" (b={b})" if "homology label" in msg else ""))
    records = []
    for k, rec in enumerate(data.get("exceptional", []) or []):
        try:
            cyc = rec.get("cycles", rec.get("cycle"))
            if cyc and all(isinstance(x, int) for x in cyc):
                cyc = [cyc]
            records.append(ExceptionalCycleRecord(
                tuple(tuple(int(i) for i in c) for c in cyc),
                rec.get("type", rec.get("type_content")),
                int(rec.get("pn", 2)),
                int(rec.get("po", 1)),
            ))
        except (ParseError, TypeError, AttributeError, ValueError) as exc:
            errors.append(f"exceptional record {k}: {exc}")
    if graph is not None and records:
        try:
            resolve_records(graph, records)
        except ValidationError as exc:
            errors.append(str(exc))

    cover = None
    if data.get("cover") is not None:
        raw = data["cover"]
        try:
            if "cyclic" in raw:
                cover = CoverSpec.cyclic(int(raw["cyclic"]), [int(v) for v in raw["voltage"]])
            else:
                cover = CoverSpec(tuple(tuple(int(i) for i in g) for g in raw["generators"]),
                                  tuple(tuple(int(i) for i in v) for v in raw["voltage"]))
            if graph is not None:
                errors.extend(f"cover: {m}" for m in cover.errors(graph))
        except (KeyError, TypeError, ValueError) as exc:
            errors.append(f"cover: malformed ({exc})")

    action = None
    if data.get("deck_action") is not None:
        raw = data["deck_action"]
        try:
            action = DeckAction(
                tuple(tuple(int(i) for i in p) for p in raw["vertex_perms"]),
                tuple(tuple(int(i) for i in p) for p in raw["edge_perms"]),
                tuple(tuple(tuple(int(x) for x in r) for r in m) for m in raw["matrices"]),
            )
            if graph is not None:
                errors.extend(f"deck_action: {m}" for m in deck_action_errors(graph, action))
        except (KeyError, TypeError, ValueError) as exc:
            errors.append(f"deck_action: malformed ({exc})")

    scalars = {}
    for key in ("chi_S", "b1"):
        v = data.get(key)
        if v is not None and (not isinstance(v, int) or isinstance(v, bool)):
            errors.append(f"{key} must be an integer")
        scalars[key] = v
    tags = data.get("fiber_components")
    if tags is not None:
        if not isinstance(tags, list) or len(tags) != n:
            errors.append(f"fiber_components must tag each of the {n} vertices")
            tags = None
        else:
            tags = tuple(int(x) for x in tags)
    hom = None
    if data.get("homological_action") is not None:
        hom = _int_matrix(data["homological_action"], "homological_action", errors)
        if hom is not None and any(len(r) != len(hom) for r in hom):
            errors.append("homological_action must be square")
    poly = None
    if data.get("polynomial") is not None:
        try:
            poly = element_from_json(data["polynomial"])
        except ParseError as exc:
            errors.append(f"polynomial: {exc}")

    if errors:
        raise ValidationError("\n".join(errors))
    return InputDocument(graph, tuple(records), cover, action, scalars["chi_S"], scalars["b1"],
                         tags, hom, poly)


def parse_input(path: str) -> InputDocument:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return document_from_json(data)


def graph_to_json(g: TransitionGraph) -> dict:
    return {
        "vertices": list(g.vertex_names) if g.vertex_names else g.n_vertices,
        "b": g.b,
        "edges": [{"source": e.source, "target": e.target, "sign": e.sign,
                   "hvec": list(e.hvec), "weight": e.weight} for e in g.edges],
    }


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)
