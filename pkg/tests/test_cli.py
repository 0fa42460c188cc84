import json
import subprocess
import sys

import pytest

from resolvekit.cli import main, run, spec_from_json
from resolvekit.errors import InputError, ParseError

CUSP = {"vars": ["x", "y"], "gens": ["y^2-x^3"], "b": 2}
UMBRELLA = {"vars": ["x", "y", "z"], "gens": ["x^2-y^2*z"], "b": 2}
SAN2 = {"vars": ["x", "y", "t"], "gens": ["x^2*y^2+t*x^4"], "b": 2, "base": "t",
        "family": {"samples": ["0", "1"], "truncation": 1, "conditions": ["R", "F", "C"]}}


@pytest.fixture
def write(tmp_path):
    def go(doc, name="spec.json"):
        p = tmp_path / name
        p.write_text(doc if isinstance(doc, str) else json.dumps(doc))
        return str(p)
    return go


def cli(*args):
    return main([str(a) for a in args])


def test_resolve_writes_report_and_dot(write, tmp_path):
    out, dot = tmp_path / "r.json", tmp_path / "t.dot"
    assert cli("resolve", "--input", write(CUSP), "--out", out, "--dot", dot) == 0
    rep = json.loads(out.read_text())
    assert rep["tool"] == "resolvekit" and rep["mode"] == "resolve"
    assert rep["result"]["resolved"] is True and rep["result"]["depth"] == 1
    assert rep["input"]["gens"] == ["y^2-x^3"]
    text = dot.read_text()
    assert text.startswith("digraph charts {") and text.count("->") == 2


def test_report_round_trip(write, tmp_path):
    out = tmp_path / "r.json"
    assert cli("resolve", "--input", write(UMBRELLA), "--out", out) == 0
    again = tmp_path / "again.json"
    assert cli("resolve", "--input", out, "--out", again) == 0
    assert json.loads(out.read_text()) == json.loads(again.read_text())


def test_family_mode(write, tmp_path):
    out = tmp_path / "r.json"
    assert cli("family", "--input", write(SAN2), "--out", out) == 0
    rep = json.loads(out.read_text())
    got = {c["condition"]: (c["verdict"], c["step"]) for c in rep["result"]["conditions"]}
    assert got == {"R": ("fails", 0), "F": ("fails", 1), "C": ("fails", 1)}
    assert rep["samples"] == ["0", "1"] and rep["truncation"] == 1


def test_principalize_and_embedded(write, tmp_path):
    out = tmp_path / "r.json"
    doc = {"vars": ["x", "y"], "gens": ["x^2*y"], "E": ["x", "y"]}
    assert cli("principalize", "--input", write(doc), "--out", out) == 0
    assert json.loads(out.read_text())["result"]["resolved"] is None
    assert cli("embedded", "--input", write({"vars": ["x", "y"], "gens": ["y^2-x^3"]}),
               "--out", out) == 0
    assert json.loads(out.read_text())["result"]["eta"] == 3


@pytest.mark.parametrize("doc", [
    '{"vars": ["x"], "gens": ["x^^2"]}',
    '{"vars": ["x"], "gens": ["x y"]}',
    '{"vars": ["x", "t"], "gens": ["x^2"], "base": "t", "E": ["t"]}',
    '{"vars": ["x"], "gens": ["x^2"], "b": 0}',
    '{"vars": ["x"], "gens": ["x^2"], "b": true}',
    '{"vars": ["x", "x"], "gens": ["x"]}',
    '{"vars": ["x"], "gens": []}',
    '{"vars": ["x"], "gens": ["x"], "mode": "family"}',
    '{"vars": ["x"], "gens": ["x"], "family": {"samples": ["zero"]}}',
    '[1, 2]',
    '{"vars": ["x"], "gens": ["x"]',
])
def test_input_errors_exit_1(write, tmp_path, doc):
    assert cli("resolve", "--input", write(doc), "--out", tmp_path / "r.json") == 1
    assert not (tmp_path / "r.json").exists()


def test_missing_file_and_bad_flags(write, tmp_path):
    assert cli("resolve", "--input", tmp_path / "nope.json", "--out", tmp_path / "r.json") == 1
    assert cli("resolve", "--input", write(CUSP), "--out", tmp_path / "r.json",
               "--max-steps", "-1") == 1
    assert cli("family", "--input", write(SAN2), "--out", tmp_path / "r.json",
               "--samples", "0,abc") == 1
    assert cli("family", "--input", write(CUSP), "--out", tmp_path / "r.json") == 1


def test_step_cap_exit_2(write, tmp_path):
    assert cli("resolve", "--input", write(UMBRELLA), "--out", tmp_path / "r.json",
               "--max-steps", "1") == 2


def test_reduction_cap_exit_2(write, tmp_path):
    doc = dict(UMBRELLA, caps={"reduction_cap": 1})
    assert cli("resolve", "--input", write(doc), "--out", tmp_path / "r.json") == 2


def test_algorithm_failure_exit_3(write, tmp_path, capsys):
    doc = {"vars": ["x", "y", "z"], "gens": ["2*x^2*y*z^3-2*x*y*z-3"]}
    assert cli("resolve", "--input", write(doc), "--out", tmp_path / "r.json") == 3
    assert "NonCoordinateCenter at step 0" in capsys.readouterr().err


def test_spec_validation():
    spec = spec_from_json(SAN2)
    assert spec.base == "t" and spec.truncation == 1 and spec.conditions == ["R", "F", "C"]
    assert spec_from_json(spec.to_json()) == spec
    with pytest.raises(InputError):
        spec_from_json({"vars": ["x", "t"], "gens": ["x"], "base": "t", "E": ["t"]})
    with pytest.raises(ParseError) as info:
        spec_from_json({"vars": ["x"], "gens": ["x", "x+"]})
    assert "gens[1]" in str(info.value)
    with pytest.raises(InputError):
        run(spec_from_json(dict(CUSP, mode="resolve")), "embedded")


def test_console_entry_point(write, tmp_path):
    proc = subprocess.run([sys.executable, "-m", "resolvekit.cli", "resolve", "--input",
                           write(CUSP), "--out", str(tmp_path / "r.json")],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
