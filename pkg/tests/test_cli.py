import json
import shutil
import subprocess
from importlib.resources import files
from pathlib import Path

import pytest

from ncpoly.cli import main, parse_graph_file, run
from ncpoly.ribbon import RibbonGraph, fixture

DATA = files("ncpoly") / "data"
GOLDEN = sorted((Path(__file__).parent / "golden").glob("*.json"))


def L(line, end):
    return {"line": line, "end": end}


def E(k):
    return {"ext": k}


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


def data(name):
    return str(DATA / name)


@pytest.mark.parametrize("path", GOLDEN, ids=lambda p: p.stem)
def test_golden_outputs(path):
    case = json.loads(path.read_text())
    argv = [case["argv"][0], data(case["argv"][1])] + case["argv"][2:]
    code, out = run(argv)
    assert code == 0
    assert out == case["output"]


def test_hu_bubble_string():
    code, out = run(["hu", data("bubble.json")])
    assert code == 0
    assert out["polynomial"] == "t1 + t2 + t1^2*t2 + t1*t2^2 + 4*t1*s^2 + 4*t2*s^2 + 4*t1^2*t2*s^2 + 4*t1*t2^2*s^2"


def test_poles_and_factorize_examples():
    assert run(["poles", data("sunshine.json")]) == (0, {"poles": ["3/1", "4/1"]})
    code, out = run(["factorize", data("hyper.json"), "--subgraph", "4,5,6"])
    assert code == 0 and out["factorizes"] is True


def test_det_and_pfaffian_agree():
    for name in ("bubble.json", "sunshine.json", "three-line.json"):
        a = run(["hu", data(name)])[1]
        b = run(["hu", data(name), "--method", "pfaffian"])[1]
        assert a["polynomial"] == b["polynomial"]


def test_integrate_output_shape():
    code, out = run(["integrate", data("bubble.json"), "--dim", "3"])
    assert code == 0 and set(out) == {"value", "abs_err", "cells", "settings"}
    assert out["value"] == pytest.approx(0.1683342634164603, rel=1e-6)
    assert out["settings"]["s"] == "1/1" and out["settings"]["renormalized"] is False
    code, out = run(["integrate", data("bubble.json"), "--dim", "4", "--renormalized", "--s", "1/2"])
    assert code == 0 and out["settings"]["renormalized"] is True and out["settings"]["s"] == "1/2"


def test_precondition_errors_exit_2(tmp_path):
    assert run(["integrate", data("bubble.json"), "--dim", "4.2"])[0] == 2
    assert run(["integrate", data("bubble.json")])[0] == 2
    assert run(["integrate", data("bubble.json"), "--dim", "abc"])[0] == 2
    assert run(["factorize", data("sunshine.json"), "--subgraph", "1"])[0] == 2
    assert run(["factorize", data("sunshine.json")])[0] == 2
    assert run(["hu", str(tmp_path / "missing.json")])[0] == 2
    assert run(["hu", write(tmp_path, "junk.json", [1, 2])])[0] == 2
    assert run(["hu", data("bubble.json"), "--root", "5"])[0] == 2
    assert run(["gen-corpus", "--max-lines", "7"])[0] == 2


def test_non_orientable_file(tmp_path):
    path = write(
        tmp_path,
        "bad.json",
        {"vertices": [[L(1, "src"), L(2, "src"), E(1), E(2)], [L(1, "tgt"), L(2, "tgt"), E(3), E(4)]], "root": 0},
    )
    code, out = run(["topology", path])
    assert code == 2 and "line 1 joins two '+' corners" in out["error"]


def test_corner_referenced_twice(tmp_path):
    path = write(tmp_path, "dup.json", {"vertices": [[L(1, "tgt"), L(1, "tgt"), E(1), E(2)]], "root": 0})
    code, out = run(["hu", path])
    assert code == 2 and "corner (line 1, tgt)" in out["error"]


def test_parse_relabels_lines(tmp_path):
    path = write(
        tmp_path,
        "gap.json",
        {"vertices": [[L(7, "tgt"), L(9, "src"), E(2), E(3)], [L(9, "tgt"), L(7, "src"), E(5), E(8)]], "root": 0},
    )
    assert parse_graph_file(path) == fixture("bubble")


def test_root_flag_changes_only_subleading_terms():
    a = run(["hu", data("three-line.json"), "--root", "0"])[1]
    b = run(["hu", data("three-line.json"), "--root", "1"])[1]
    assert a["root"] == 0 and b["root"] == 1
    assert a["leading"] == b["leading"]


def test_gen_corpus(tmp_path):
    a = run(["gen-corpus", "--max-lines", "4", "--seed", "3", "--count", "5"])[1]
    b = run(["gen-corpus", "--max-lines", "4", "--seed", "3", "--count", "5"])[1]
    assert a == b and a["count"] == 5
    assert run(["gen-corpus", "--max-lines", "2"])[1]["count"] == 17
    code, out = run(["gen-corpus", "--max-lines", "2", "--out", str(tmp_path / "c")])
    assert code == 0 and len(out["files"]) == 17
    for f in out["files"]:
        assert RibbonGraph.loads(Path(f).read_text()) == parse_graph_file(f)


def test_main_prints_json(capsys):
    assert main(["poles", data("bubble.json"), "--pretty"]) == 0
    text = capsys.readouterr().out
    assert json.loads(text) == {"poles": ["4/1"]} and "\n  " in text


def test_console_script():
    exe = shutil.which("ncpoly")
    if exe is None:
        pytest.skip("console script not installed")
    proc = subprocess.run([exe, "poles", data("sunshine.json")], capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and json.loads(proc.stdout) == {"poles": ["3/1", "4/1"]}
    proc = subprocess.run([exe, "integrate", data("bubble.json"), "--dim", "4.2"], capture_output=True, text=True)
    assert proc.returncode == 2 and json.loads(proc.stdout)["kind"] == "ConvergenceError"
