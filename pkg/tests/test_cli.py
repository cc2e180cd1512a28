import io
import json
from pathlib import Path

import jsonschema
import mpmath
import pytest

from multisum import cli
from multisum.variational import CrossCheckError

ROOT = Path(__file__).resolve().parents[1]
DATA = ROOT / "data"
SCHEMAS = ROOT / "docs" / "schemas"


def run(*argv):
    out = io.StringIO()
    code = cli.main([str(a) for a in argv], stdout=out)
    text = out.getvalue()
    return code, (json.loads(text) if text else None), text


def schema(name):
    return json.loads((SCHEMAS / f"{name}.schema.json").read_text())


CASES = [
    ("validate", DATA / "apery.json"),
    ("polytope", DATA / "apery.json"),
    ("polytope", DATA / "inverse_binomial.json", "--faces"),
    ("ansatz", DATA / "closed_form.json"),
    ("sequence", DATA / "apery.json", "--n", 6),
    ("estimate", DATA / "central_binomial.json", "--n", 80, "--order", 3),
    ("check", DATA / "closed_form.json", "--n", 40),
    ("laurent", "trace", DATA / "x_plus_inverse.json", "--n", 8),
    ("laurent", "term", DATA / "hexagon_f.json"),
    ("laurent", "critical", DATA / "x_plus_inverse.json"),
    ("laurent", "verify", DATA / "x_plus_inverse.json"),
]


@pytest.mark.parametrize("argv", CASES, ids=lambda a: " ".join(str(x) for x in a[:2]))
def test_reports_validate_against_schemas(argv):
    code, rep, _ = run(*argv)
    jsonschema.validate(rep, schema(argv[0]))
    assert rep["command"] == argv[0]
    assert rep["config"]["precision_digits"] == 64
    assert code == 0 and rep["ok"]


def test_error_reports_validate_too():
    code, rep, _ = run("sequence", DATA / "hexagon_f.json")
    assert code == 2 and not rep["ok"]
    jsonschema.validate(rep, schema("sequence"))


def test_validate_apery():
    code, rep, _ = run("validate", DATA / "apery.json")
    assert code == 0 and rep["ok"] is True and rep["violations"] == []


def test_check_apery():
    code, rep, _ = run("check", DATA / "apery.json")
    assert code == 0
    with mpmath.workdps(64):
        vals = [mpmath.mpf(v["value"]["re"]) for v in rep["ansatz"]["s_set"]]
        r2 = mpmath.sqrt(2)
        for target in (17 + 12 * r2, 17 - 12 * r2):
            assert min(abs(v - target) for v in vals) < mpmath.mpf(10) ** -40
    assert float(rep["match"]["relative_error"]) < 1e-6
    quad = [v["minimal_polynomial"]["coeffs"] for v in rep["ansatz"]["s_set"] if "minimal_polynomial" in v]
    assert quad == [[1, -34, 1], [1, -34, 1]]


def test_laurent_verify_hexagon():
    code, rep, _ = run("laurent", "verify", DATA / "hexagon_f.json")
    assert code == 0 and rep["ok"]
    assert float(rep["max_residual"]) < 1e-25
    jsonschema.validate(rep, schema("laurent"))


def test_corpus_is_byte_identical_and_valid():
    c1, rep, t1 = run("corpus")
    c2, _, t2 = run("corpus")
    assert c1 == c2 == 0 and t1 == t2
    jsonschema.validate(rep, schema("corpus"))
    assert rep["passed"]


def test_unknown_subcommand(capsys):
    code, rep, _ = run("frobnicate")
    assert code == 2 and rep is None
    assert "usage" in capsys.readouterr().err


def test_malformed_json_is_positioned(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"c0": "1",\n  "c": [1,,]}')
    code, rep, _ = run("validate", bad)
    assert code == 2
    assert f"{bad}:2:" in rep["error"]


def test_missing_file():
    code, rep, _ = run("ansatz", "/nonexistent/term.json")
    assert code == 2 and "cannot read" in rep["error"]


def test_precision_floor_and_environment(monkeypatch):
    code, rep, _ = run("--digits", 20, "validate", DATA / "apery.json")
    assert code == 2 and "precision_digits" in rep["error"]
    monkeypatch.setenv("MULTISUM_PRECISION", "40")
    code, rep, _ = run("sequence", DATA / "closed_form.json", "--n", 3)
    assert code == 0 and rep["config"]["precision_digits"] == 40
    monkeypatch.setenv("MULTISUM_PRECISION", "many")
    code, _, _ = run("sequence", DATA / "closed_form.json")
    assert code == 2


def test_seq_n_floor():
    code, rep, _ = run("--seq-n", 8, "sequence", DATA / "closed_form.json")
    assert code == 2 and "seq_n" in rep["error"]


def test_cross_check_failure_exit_code(monkeypatch):
    def boom(*a, **k):
        raise CrossCheckError("forced")

    monkeypatch.setattr(cli, "ansatz_set", boom)
    code, rep, _ = run("ansatz", DATA / "apery.json")
    assert code == 3 and rep["error"] == "forced"


def test_failed_verification_exit_code(monkeypatch):
    real = cli.verify_psi

    def broken(*a, **k):
        rep = real(*a, **k)
        rep.ok = False
        return rep

    monkeypatch.setattr(cli, "verify_psi", broken)
    code, rep, _ = run("laurent", "verify", DATA / "x_plus_inverse.json")
    assert code == 3 and rep["ok"] is False
    jsonschema.validate(rep, schema("laurent"))


def test_input_digest_tracks_content(tmp_path):
    src = json.loads((DATA / "closed_form.json").read_text())
    a = tmp_path / "a.json"
    a.write_text(json.dumps(src, indent=4))
    _, r1, _ = run("validate", DATA / "closed_form.json")
    _, r2, _ = run("validate", a)
    assert r1["input_digest"] == r2["input_digest"]
    src["c"] = ["2"]
    a.write_text(json.dumps(src))
    _, r3, _ = run("validate", a)
    assert r3["input_digest"] != r1["input_digest"]
