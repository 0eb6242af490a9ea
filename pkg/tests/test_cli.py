from __future__ import annotations

import io
import json
import os
import subprocess
import sys

import jsonschema
import pytest

from coxflat.cli import COMMANDS, run

SCHEMAS = os.path.join(os.path.dirname(__file__), "..", "docs", "schemas")
T333 = '{"generators":["a","b","c"],"orders":[[1,3,3],[3,1,3],[3,3,1]]}'
T237 = '{"generators":["a","b","c"],"orders":[[1,2,7],[2,1,3],[7,3,1]]}'
TREE = '{"generators":["s","t"],"orders":[[1,0],[0,1]]}'
SQUARE = ('{"generators":["s","t","u","v"],"orders":[[1,0,2,2],[0,1,2,2],[2,2,1,0],[2,2,0,1]]}')

CASES = {
    "classify": ["--matrix", "B~3"],
    "rank": ["--matrix", T333],
    "hyperbolic": ["--matrix", T237],
    "ball": ["--matrix", "A2", "--radius", "2"],
    "distance": ["--matrix", T333, "--u", "a b", "--v", "c"],
    "walls": ["--matrix", T333, "--u", "a", "--v", "b"],
    "hull": ["--matrix", "A2", "--elements", "1;s1 s2 s1", "--radius", "3"],
    "split": ["--matrix", SQUARE, "--x", "1", "--y", "s u", "--walls", "s"],
    "subgroup": ["--matrix", T333, "--walls", "a;b c b"],
    "triangle": ["--matrix", T333, "--walls", "a;b;c"],
    "closure": ["--matrix", T333, "--walls", "a;b c b", "--radius", "3"],
    "flat": ["--matrix", T333, "--T", "a,b,c", "--window", "3", "--pivot", "a"],
    "witness": ["--matrix", T333, "--T", "a,b,c"],
    "building-check": ["--matrix", TREE, "--thickness", '{"s":2,"t":2}', "--samples", "100", "--radius", "4"],
    "building-project": ["--matrix", TREE, "--thickness", '{"s":2,"t":2}', "--U", "s", "--x", '[["t",1],["s",1]]'],
    "building-apartment": ["--matrix", TREE, "--thickness", '{"s":2,"t":2}', "--radius", "2",
                           "--chambers", '[{"address":[],"element":""},{"address":[["s",2]],"element":"s"}]'],
    "building-flat": ["--matrix", TREE, "--thickness", '{"s":2,"t":2}', "--window", "4", "--apartment-radius", "8",
                      "--chambers", '[{"address":[],"element":""},{"address":[["s",2]],"element":"s"}]'],
}


def invoke(argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(argv, stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def schema(name):
    with open(os.path.join(SCHEMAS, f"{name}.schema.json"), encoding="utf-8") as fh:
        return json.load(fh)


def test_every_command_has_a_case_and_schema():
    assert set(CASES) == set(COMMANDS)
    for name in COMMANDS:
        jsonschema.Draft202012Validator.check_schema(schema(name))


@pytest.mark.parametrize("name", COMMANDS)
def test_command_output_matches_schema(name):
    code, out, err = invoke([name] + CASES[name])
    assert code == 0, err
    jsonschema.validate(json.loads(out), schema(name))
    assert err.strip()
    # determinism: byte-identical on a second run
    assert invoke([name] + CASES[name])[1] == out


def test_examples():
    code, out, _ = invoke(["rank", "--matrix", T333])
    assert code == 0 and json.loads(out)["rank"] == 2
    code, out, _ = invoke(["hyperbolic", "--matrix", T237])
    assert json.loads(out)["hyperbolic"] is True
    code, out, _ = invoke(["witness", "--matrix", T333, "--T", "a,b,c"])
    doc = json.loads(out)
    assert doc["rank"] == 2 and doc["commutators"]["all_trivial"] and doc["verified"]


def test_split_example():
    doc = json.loads(invoke(["split"] + CASES["split"])[1])
    assert doc["z"] == ["u"]


def test_classify_component():
    code, out, _ = invoke(["classify", "--matrix", T333, "--component", "a,b"])
    assert code == 0 and json.loads(out)["kind"] == "Spherical"


def test_dot_output():
    code, out, _ = invoke(["hull", "--matrix", "A2", "--elements", "s1", "--radius", "1", "--output", "dot"])
    assert code == 0 and out.startswith("graph cayley {")


def test_text_output():
    code, out, _ = invoke(["rank", "--matrix", T333, "--output", "text"])
    assert code == 0 and "flat rank 2" in out


def test_matrix_from_file(tmp_path):
    p = tmp_path / "m.json"
    p.write_text(T333)
    code, out, _ = invoke(["rank", "--matrix", str(p)])
    assert code == 0 and json.loads(out)["rank"] == 2


@pytest.mark.parametrize("argv, code", [
    (["rank", "--matrix", '{"generators":["s"],"orders":[[2]]}'], 1),
    (["distance", "--matrix", "A2", "--u", "zz", "--v", "s1"], 1),
    (["split", "--matrix", "A2", "--x", "1", "--y", "s1 s2", "--walls", "s1"], 1),
    (["building-project", "--matrix", TREE, "--thickness", '{"s":2,"t":2}', "--x", '[["s",5]]'], 1),
    (["frobnicate"], 2),
    (["rank"], 2),
    (["rank", "--matrix", "A2", "--output", "dot"], 2),
    (["ball", "--matrix", "A2", "--radius", "-1"], 2),
    (["rank", "--matrix", "not-a-type"], 2),
    (["ball", "--matrix", "A~2", "--radius", "13"], 3),
])
def test_exit_codes(argv, code, capsys):
    got, _, err = invoke(argv)
    assert got == code
    if code in (1, 3):
        assert f"coxflat {argv[0]}" in err


def test_error_names_input():
    _, _, err = invoke(["split", "--matrix", "A2", "--x", "1", "--y", "s1 s2", "--walls", "s1"])
    assert "s1 s2 s1" in err


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "coxflat.cli", "rank", "--matrix", T333],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and json.loads(proc.stdout)["rank"] == 2
