import json
import os
import subprocess
import sys
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given

from flowtorus.cli import COMMANDS, main
from flowtorus.document import (
    decode_number,
    document_from_json,
    element_from_json,
    element_to_json,
    encode_number,
    parse_input,
    point_from_json,
)
from flowtorus.errors import ParseError, ValidationError
from flowtorus.hull import direction_hull
from flowtorus.zeta import kappa
from helpers import elements, figure_eight

DATA = Path(__file__).parent / "data"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def write(tmp_path, obj, name="doc.json"):
    p = tmp_path / name
    p.write_text(json.dumps(obj) if not isinstance(obj, str) else obj)
    return p


def test_minimal_document():
    doc = parse_input(DATA / "loop.json")
    assert doc.graph.n_vertices == 1 and len(doc.graph.edges) == 1
    assert doc.cover is None and doc.exceptional == ()


def test_validation_lists_every_problem():
    raw = {"graph": {"vertices": 2, "b": 2, "edges": [
        {"source": 0, "target": 5, "sign": 1, "hvec": [1, 0]},
        {"source": 0, "target": 0, "sign": 1, "hvec": [1]},
    ]}, "b1": "two"}
    with pytest.raises(ValidationError) as err:
        document_from_json(raw)
    lines = str(err.value).splitlines()
    assert any("edge 0" in line for line in lines)
    assert any("edge 1" in line and "b=2" in line for line in lines)
    assert any("b1" in line for line in lines)


def test_cover_and_action_errors_reported_together():
    raw = json.loads((DATA / "figure_eight.json").read_text())
    raw["cover"]["voltage"] = [1]
    raw["deck_action"]["matrices"][1] = [[1, 0], [0, 1]]
    with pytest.raises(ValidationError) as err:
        document_from_json(raw)
    msg = str(err.value)
    assert "cover:" in msg and "deck_action:" in msg


def test_parse_error_has_position(tmp_path):
    p = write(tmp_path, '{"graph": {"vertices": 1,\n "edges": [}')
    with pytest.raises(ParseError) as err:
        parse_input(p)
    assert "line 2" in str(err.value)
    with pytest.raises(ParseError):
        parse_input(tmp_path / "missing.json")


def test_number_encoding():
    assert encode_number(Fraction(3, 4)) == "3/4"
    assert encode_number(2**60) == str(2**60)
    assert encode_number(-7) == -7
    assert decode_number("3/4") == Fraction(3, 4)
    assert decode_number(str(2**60)) == 2**60
    with pytest.raises(ParseError):
        decode_number(True)
    with pytest.raises(ParseError):
        decode_number(0.5)


@given(elements(b=2, max_terms=5))
def test_element_json_round_trip(p):
    big = p.scale(2**70) if not p.is_zero() else p
    for q in (p, big):
        assert element_from_json(json.loads(json.dumps(element_to_json(q)))) == q


def test_hull_command(capsys):
    code, out, _ = run(capsys, "hull", "--input", DATA / "figure_eight.json")
    assert code == 0
    assert "(1, 0)" in out and "(0, 1)" in out and "1: 1" in out


def test_kappa_of_loop(capsys):
    code, out, _ = run(capsys, "kappa", "--input", DATA / "loop.json")
    assert code == 0 and out.strip() == "kappa = 1 - x1*t"


def test_json_round_trips(capsys):
    g = figure_eight()
    _, out, _ = run(capsys, "hull", "--input", DATA / "figure_eight.json", "--format", "json")
    obj = json.loads(out)
    h = direction_hull(g)
    assert sorted(point_from_json(v) for v in obj["vertices"]) == sorted(h.vertex_point(v) for v in h.vertices)
    assert obj["dim"] == h.dim and len(obj["faces"]) == len(h.faces)
    _, out, _ = run(capsys, "kappa", "--input", DATA / "figure_eight.json", "--format", "json")
    assert element_from_json(json.loads(out)["kappa"]) == kappa(g)
    _, out, _ = run(capsys, "zeta", "--input", DATA / "figure_eight.json", "--format", "json")
    assert element_from_json(json.loads(out)["zeta"]) == kappa(g)


def test_criterion_passes_on_fixture(capsys):
    code, out, _ = run(capsys, "criterion", "--input", DATA / "three_loops_z3.json", "--samples", "2048")
    assert code == 0
    assert out.startswith("PASS: s = 3, threshold = 3")
    assert "exceeds 1 by 3 standard errors" in out


@pytest.mark.parametrize("cmd", COMMANDS)
def test_every_command_is_deterministic(capsys, cmd):
    doc = DATA / ("cat_map.json" if cmd == "homology-action" else "figure_eight.json")
    extra = ["--samples", "512"] if cmd in ("mahler", "criterion") else []
    extra += ["--prime", "5"] if cmd == "find-mq" else []
    a = run(capsys, cmd, "--input", doc, *extra)
    b = run(capsys, cmd, "--input", doc, *extra)
    assert a == b


def test_exit_codes(tmp_path, capsys):
    assert run(capsys, "validate", "--input", DATA / "figure_eight.json")[0] == 0
    bad = write(tmp_path, {"graph": {"vertices": 1, "edges": [[0, 3, 1, [0], 1]]}})
    code, _, err = run(capsys, "validate", "--input", bad)
    assert code == 1 and "edge 0" in err
    # no cycles: the hull is empty, a computation error
    acyclic = write(tmp_path, {"graph": {"vertices": 2, "edges": [[0, 1, 1, [1], 1]]}}, "a.json")
    assert run(capsys, "hull", "--input", acyclic)[0] == 2
    assert run(capsys, "hull", "--input", DATA / "figure_eight.json", "--cap", "1")[0] == 3


def test_json_error_object(tmp_path, capsys):
    bad = write(tmp_path, {"graph": {"vertices": 1, "edges": [[0, 3, 1, [0], 1]]}})
    code, out, _ = run(capsys, "validate", "--input", bad, "--format", "json")
    obj = json.loads(out)
    assert code == 1 and obj["exit_code"] == 1 and obj["error"] == "ValidationError"


def test_cap_from_environment(monkeypatch, capsys):
    monkeypatch.setenv("FLOWTORUS_CAP", "cycles=1")
    assert run(capsys, "hull", "--input", DATA / "figure_eight.json")[0] == 3
    monkeypatch.setenv("FLOWTORUS_CAP", "bogus")
    assert run(capsys, "hull", "--input", DATA / "figure_eight.json")[0] == 1


def test_lm_and_find_mq(capsys):
    code, out, _ = run(capsys, "lm", "--input", DATA / "loop.json", "--upto", "3")
    assert code == 0 and "x1^3*t^3" in out
    code, out, _ = run(capsys, "find-mq", "--input", DATA / "loop.json", "--prime", "7", "--eval", "2")
    assert code == 0 and "3" in out
    code, _, _ = run(capsys, "find-mq", "--input", DATA / "loop.json", "--prime", "4", "--eval", "2")
    assert code == 1


def test_homology_action_command(capsys):
    code, out, _ = run(capsys, "homology-action", "--input", DATA / "cat_map.json", "--format", "json")
    obj = json.loads(out)
    assert code == 0 and obj["b1"] == 1 and obj["torsion"] == []


def test_console_entry_point():
    env = dict(os.environ)
    env.pop("FLOWTORUS_CAP", None)
    proc = subprocess.run([sys.executable, "-m", "flowtorus", "kappa", "--input", str(DATA / "loop.json")],
                          capture_output=True, text=True, env=env)
    assert proc.returncode == 0 and proc.stdout.strip() == "kappa = 1 - x1*t"


@pytest.mark.parametrize("cmd", ["validate", "hull", "faces", "kappa", "zeta", "cover", "orbits"])
def test_json_output_names_the_command(capsys, cmd):
    code, out, _ = run(capsys, cmd, "--input", DATA / "figure_eight.json", "--format", "json")
    assert code == 0 and json.loads(out)["command"] == cmd
