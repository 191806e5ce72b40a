import json
import subprocess
import sys
from pathlib import Path

import pytest

from subshift.cli import main

SPECS = Path(__file__).resolve().parent.parent / "specs"


def run(capsys, *argv):
    code = main([str(SPECS / a[6:]) if a.startswith("specs/") else a for a in argv])
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_entropy_exact(capsys):
    code, rep = run(capsys, "entropy", "--spec", "specs/golden_mean.sft")
    assert code == 0
    assert rep["result"]["exact"]["lower"] == pytest.approx(0.481211825, abs=1e-9)


def test_entropy_box(capsys):
    code, rep = run(capsys, "entropy", "--spec", "specs/hard_square.sft", "--box", "4")
    assert code == 0 and rep["result"]["box"]["params"]["count"] == 1234


def test_empty_subshift(capsys, tmp_path):
    f = tmp_path / "e.sft"
    f.write_text("dim = 1\nalphabet = 0 1\nwindow = (0)\nforbid = {(0):0}\nforbid = {(0):1}\n")
    code, rep = run(capsys, "entropy", "--spec", str(f))
    assert code == 0 and rep["result"]["h"] == "-inf"


def test_language(capsys):
    code, rep = run(capsys, "language", "--spec", "specs/hard_square.sft", "--box", "2")
    assert code == 0 and rep["result"]["count"] == 7


def test_periodic(capsys):
    code, rep = run(capsys, "periodic", "--spec", "specs/hard_square.sft", "--subgroup", "2,0;0,2", "--exact-stab")
    assert code == 0 and rep["result"]["fixed"] == 7 and rep["result"]["exact_stab"] == 4


def test_least_periods(capsys):
    code, rep = run(capsys, "least-periods", "--spec", "specs/golden_mean.sft", "--max", "6")
    assert rep["result"]["least_periods"] == [1, 2, 3, 4, 10, 12]


def test_voronoi(capsys):
    code, rep = run(capsys, "voronoi", "--centers", "specs/centers_0_10.json", "--radius2", "9", "--dim", "1")
    assert code == 0 and [t["center"] for t in rep["result"]["tiling"]] == [[0], [10]]


def test_negative_offsets(capsys):
    # the fixed point 0^inf is fixed by every shift, so the lemma hypotheses fail
    code, rep = run(capsys, "marker-lemma", "--spec", "specs/golden_mean.sft", "--p", "-1,1")
    assert code == 2 and rep["witness"]["point"] == [0]


def test_find_marker(capsys):
    code, rep = run(capsys, "find-marker", "--spec", "specs/golden_mean.sft", "--n", "2")
    assert code == 0 and rep["result"]["verified"]


def test_retract_safe(capsys):
    code, rep = run(capsys, "retract", "--mode", "safe", "--spec", "specs/golden_mean.sft",
                    "--input", "specs/golden_word.json", "--symbol", "0")
    assert code == 0 and rep["result"]["output"]["values"] == ["0", "0"]


def test_check_embed_verdicts(capsys, tmp_path):
    code, rep = run(capsys, "check-embed", "--x", "specs/golden_mean.sft", "--y-full-alphabet", "2", "--max-period", "8")
    assert code == 0 and rep["result"]["verdict"] == "YES"
    code, rep = run(capsys, "check-embed", "--x", "specs/two_fixed_points.sft", "--y", "specs/golden_mean.sft")
    assert code == 0 and rep["result"]["verdict"] == "NO"
    y = tmp_path / "y.sft"
    y.write_text("dim = 1\nalphabet = 0 1 2\nwindow = (0) (1)\nforbid = {(0):2, (1):2}\n")
    code, rep = run(capsys, "check-embed", "--x", "specs/golden_mean.sft", "--y", str(y), "--max-period", "8")
    assert code == 1 and rep["result"]["verdict"] == "INCONCLUSIVE"


def test_build_embedding(capsys):
    code, rep = run(capsys, "build-embedding", "--x", "specs/golden_mean.sft", "--target", "2")
    assert code == 0 and rep["result"]["artifact"]["transcript"]["periodic"]["ok"]


@pytest.mark.parametrize("argv", [
    ["entropy", "--spec", "missing.sft"],
    ["entropy"],
    ["nonsense"],
    ["retract", "--mode", "coloring", "--spec", "specs/three_colorings.sft", "--input", "specs/golden_word.json"],
])
def test_input_errors(capsys, argv):
    assert main([str(SPECS / a[6:]) if a.startswith("specs/") else a for a in argv]) == 2


def test_table_format(capsys):
    main(["least-periods", "--spec", str(SPECS / "golden_mean.sft"), "--max", "4", "--format", "table"])
    assert "least_periods = [1,2,3,4]" in capsys.readouterr().out.splitlines()


def test_same_seed_same_bytes():
    argv = [sys.executable, "-m", "subshift.cli", "find-marker", "--spec", str(SPECS / "golden_mean.sft"),
            "--n", "3", "--seed", "5"]
    a = subprocess.run(argv, capture_output=True, check=True).stdout
    b = subprocess.run(argv, capture_output=True, check=True).stdout
    assert a == b and b"\r" not in a
