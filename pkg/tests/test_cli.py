import json
import os
import subprocess
import sys

import pytest
from hypothesis import given
from hypothesis import strategies as st

from affmodel import cli
from affmodel.polyalg import format_polynomial, polynomial_ring

from conftest import polys


def run(argv, doc=None, tmp_path=None, capsys=None):
    """Run the command line in-process; returns (status, stdout, stderr)."""
    if doc is not None:
        path = tmp_path / "job.json"
        path.write_text(json.dumps(doc) if not isinstance(doc, str) else doc, encoding="utf-8")
        argv = argv + [str(path)]
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def gb_doc(gens, variables=("x", "y"), **extra):
    return {"version": 1, "command": "gb", "field": "q",
            "payload": {"variables": list(variables), "generators": list(gens), **extra}}


def test_gb_single(tmp_path, capsys):
    code, out, _ = run(["gb"], gb_doc(["x"], ["x"]), tmp_path, capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["result"]["basis"] == ["x"]
    assert out == cli.dumps(doc)


def test_gb_unit_ideal(tmp_path, capsys):
    code, out, _ = run(["gb"], gb_doc(["x*y-1", "x^2"]), tmp_path, capsys)
    assert code == 0 and json.loads(out)["result"]["basis"] == ["1"]


def test_output_is_byte_identical(tmp_path, capsys):
    doc = cli.shipped_jobs()["p1_model.json"]
    a = run(["model", "build"], doc, tmp_path, capsys)
    b = run(["model", "build"], doc, tmp_path, capsys)
    assert a[0] == 0 and a == b


def test_pushout_rejects_non_closed_leg(tmp_path, capsys):
    doc = {"version": 1, "command": "pushout", "field": "q", "payload": {
        "apex": {"variables": ["x", "s"], "relations": ["x*s-1"]},
        "left": {"source": {"variables": ["x"], "relations": []}, "images": ["x"]},
        "right": {"source": {"variables": ["y"], "relations": []}, "images": ["s"]}}}
    code, out, err = run(["pushout"], doc, tmp_path, capsys)
    assert code == cli.EXIT_MATH and out == ""
    assert "closed embedding" in err


@pytest.mark.parametrize("text, status", [
    ("{not json", cli.EXIT_PARSE),
    (json.dumps(gb_doc(["x+"])), cli.EXIT_PARSE),
    (json.dumps({**gb_doc(["x"]), "version": 2}), cli.EXIT_VALIDATION),
    (json.dumps({**gb_doc(["x"]), "field": "fp:4"}), cli.EXIT_VALIDATION),
    (json.dumps({"version": 1, "command": "gb", "field": "q"}), cli.EXIT_VALIDATION),
    (json.dumps(gb_doc(["z"])), cli.EXIT_PARSE),
])
def test_error_statuses(text, status, tmp_path, capsys):
    code, out, err = run(["gb"], text, tmp_path, capsys)
    assert code == status and out == "" and err.startswith("affmodel:")


def test_math_rejection_of_bad_complex(tmp_path, capsys):
    doc = {"version": 1, "command": "specseq filtered", "field": "q", "payload": {
        "complex": {"dims": {"0": 1, "1": 1, "2": 1}, "differentials": {"0": [[1]], "1": [[1]]}},
        "weights": {"0": [0], "1": [0], "2": [0]}}}
    code, _, _ = run(["specseq", "filtered"], doc, tmp_path, capsys)
    assert code == cli.EXIT_MATH


def test_chart_limit_is_validation_error(tmp_path, capsys):
    doc = {"version": 1, "command": "model build", "field": "q",
           "payload": {"scheme": {"standard": "projective", "n": 4}}}
    code, _, _ = run(["model", "build"], doc, tmp_path, capsys)
    assert code == cli.EXIT_VALIDATION


def test_command_mismatch(tmp_path, capsys):
    code, _, _ = run(["cech"], gb_doc(["x"]), tmp_path, capsys)
    assert code == cli.EXIT_VALIDATION


def test_field_flag_overrides(tmp_path, capsys):
    code, out, _ = run(["gb"], gb_doc(["2*x-1"]), tmp_path, capsys)
    assert code == 0 and json.loads(out)["result"]["basis"] == ["x-1/2"]
    code, out, _ = run(["gb", "--field", "fp:2"], gb_doc(["2*x-1"]), tmp_path, capsys)
    doc = json.loads(out)
    assert code == 0 and doc["field"] == "fp:2" and doc["result"]["basis"] == ["1"]


@pytest.mark.parametrize("name", sorted(cli.shipped_jobs()))
def test_shipped_jobs_verify(name):
    rep = cli.verify_document(cli.shipped_jobs()[name])
    assert rep["ok"], [c for c in rep["checks"] if not c["ok"]]


def test_p1_identification_checked():
    rep = cli.verify_document(cli.shipped_jobs()["p1_model.json"])
    names = [c["name"] for c in rep["checks"]]
    assert any("identification" in n or "intersection" in n for n in names)
    assert rep["ok"]


def test_verify_stored_result(tmp_path, capsys):
    doc = cli.shipped_jobs()["gb_twisted_cubic.json"]
    code, out, _ = run(["gb"], doc, tmp_path, capsys)
    assert code == 0
    stored = json.loads(out)
    code, vout, _ = run(["verify"], stored, tmp_path, capsys)
    assert code == 0 and json.loads(vout)["ok"]
    stored["result"]["basis"] = stored["result"]["basis"][1:]
    code, vout, err = run(["verify"], stored, tmp_path, capsys)
    assert code == cli.EXIT_INTERNAL and not json.loads(vout)["ok"]


def test_out_is_written_atomically(tmp_path, capsys):
    target = tmp_path / "result.json"
    target.write_text("old", encoding="utf-8")
    code, out, _ = run(["gb", "--out", str(target)], gb_doc(["x"], ["x"]), tmp_path, capsys)
    assert code == 0 and out == ""
    assert json.loads(target.read_text(encoding="utf-8"))["result"]["basis"] == ["x"]
    assert not [p for p in os.listdir(tmp_path) if p.endswith(".tmp")]


def test_failed_job_leaves_out_untouched(tmp_path, capsys):
    target = tmp_path / "result.json"
    target.write_text("old", encoding="utf-8")
    code, _, _ = run(["gb", "--out", str(target)], "{", tmp_path, capsys)
    assert code == cli.EXIT_PARSE and target.read_text(encoding="utf-8") == "old"


def test_text_format(tmp_path, capsys):
    code, out, _ = run(["verify", "--format", "text"], cli.shipped_jobs()["circle_mv.json"], tmp_path, capsys)
    assert code == 0
    assert out.startswith("verify cohomology mv over q: ok")


def test_every_command_has_a_subparser(tmp_path, capsys):
    for cmd in cli.COMMANDS:
        with pytest.raises(SystemExit) as exc:
            cli.main(cmd.split() + ["--help"])
        assert exc.value.code == 0
    capsys.readouterr()


def test_unknown_subcommand():
    with pytest.raises(SystemExit) as exc:
        cli.main(["frobnicate"])
    assert exc.value.code == 2


def test_console_script_runs():
    doc = json.dumps(gb_doc(["x"], ["x"]))
    p = subprocess.run([sys.executable, "-m", "affmodel.cli", "gb"], input=doc, capture_output=True, text=True)
    assert p.returncode == 0 and json.loads(p.stdout)["result"]["basis"] == ["x"]


R = polynomial_ring("x y")


@given(st.lists(polys(R, max_deg=3, max_terms=3, nonzero=True), min_size=1, max_size=3),
       st.sampled_from(["grevlex", "lex"]))
def test_round_trip(gens, order):
    text = [format_polynomial(g).replace("+", " + ") for g in gens]
    doc = gb_doc(text, order=order)
    job = cli.parse_job(doc)
    canon = job.document()
    assert cli.parse_job(canon).document() == canon
    assert cli.dumps(cli.parse_job(json.loads(cli.dumps(canon))).document()) == cli.dumps(canon)
    out1 = cli.run_job(job)
    out2 = cli.run_job(cli.parse_job(out1["job"]))
    assert cli.dumps(out1) == cli.dumps(out2)
