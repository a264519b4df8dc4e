import json
import subprocess
import sys

import pytest

from conftest import FIXTURES
from stackycdga import cli
from stackycdga.report import Verdict, VerificationReport
from stackycdga.serialize import ReportDocument, cdga_to_json, load_document, parse_cdga
from stackycdga import samples
from stackycdga.errors import ParseError

EXIT = {"pass": 0, "fail": 1, "unknown": 2}
ALL = sorted(FIXTURES.glob("*.json"))


def run_cli(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("path", ALL, ids=[p.stem for p in ALL])
def test_fixture_expected_verdict(path, capsys):
    job = json.loads(path.read_text())["job"]
    code, out, err = run_cli(capsys, job["command"], path)
    assert not err
    assert code == EXIT[job["verdict"]], out


def test_bundled_fixture_count():
    assert len(ALL) >= 20
    commands = {json.loads(p.read_text())["job"]["command"] for p in ALL}
    assert commands == set(cli.COMMANDS)


def test_etale_gm_structured(capsys):
    code, out, _ = run_cli(capsys, "check-etale", FIXTURES / "gm_gl1.json", "--format", "structured")
    assert code == 0
    doc = json.loads(out)
    assert doc["verdict"] == "pass" and doc["command"] == "check-etale"
    assert doc["tool"] == "stackycdga" and doc["version"]
    assert "seconds" in doc["timing"]


def test_cohomology_sl2(capsys):
    code, out, _ = run_cli(capsys, "cohomology", FIXTURES / "sl2_ce.json", "--format", "structured")
    assert code == 0
    assert json.loads(out)["result"]["dims"] == [1, 0, 0, 1]


@pytest.mark.parametrize("path", [p for p in ALL if p.stem in {"flat_sl2", "gm_gl1", "tot_square", "koszul_shuffle"}], ids=lambda p: p.stem)
def test_deterministic_modulo_timing(path, capsys):
    cmd = json.loads(path.read_text())["job"]["command"]
    outs = []
    for _ in range(2):
        _, out, _ = run_cli(capsys, cmd, path, "--format", "structured", "--seed", 7)
        doc = json.loads(out)
        del doc["timing"]
        outs.append(json.dumps(doc, sort_keys=True))
    assert outs[0] == outs[1]


def test_malformed_document_reports_position(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"generators": [["x", 0, 1]],\n "differential": {"x": }}')
    code, out, err = run_cli(capsys, "check-cdga", bad)
    assert code == 3 and not out
    assert "line 2" in err and "column" in err


def test_bad_element_string_reports_path(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"generators": [["x", 0, 1], ["xi", 1, 1]], "differential": {"x": "xi +"}}))
    code, _, err = run_cli(capsys, "check-cdga", bad)
    assert code == 3 and "differential.x" in err and "position" in err


def test_invariant_violation_is_input_error(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"generators": [["x", 0, 1], ["xi", 1, 2]], "differential": {"x": "xi"}}))
    code, _, err = run_cli(capsys, "check-cdga", bad)
    assert code == 3 and "NonHomogeneousDifferential" in err


def test_missing_file(capsys, tmp_path):
    code, _, err = run_cli(capsys, "check-cdga", tmp_path / "nope.json")
    assert code == 3 and "cannot read" in err


def test_nonpositive_bound_rejected(capsys):
    code, _, err = run_cli(capsys, "cohomology", FIXTURES / "sl2_ce.json", "--weight-bound", 0)
    assert code == 3 and "bound" in err


def test_out_file(tmp_path, capsys):
    target = tmp_path / "report.json"
    code, out, _ = run_cli(capsys, "derham-build", FIXTURES / "derham_a2.json", "--out", target, "--format", "structured")
    assert code == 0 and not out
    doc = ReportDocument.from_json(target.read_text())
    assert doc.verdict is Verdict.PASS


def test_text_format(capsys):
    code, out, _ = run_cli(capsys, "check-etale", FIXTURES / "trivial_action.json")
    assert code == 1
    assert out.splitlines()[0].endswith("FAIL")
    assert "time:" in out


def test_stdin_input(monkeypatch, capsys):
    import io

    monkeypatch.setattr(sys, "stdin", io.StringIO((FIXTURES / "gm_gl1.json").read_text()))
    code, _, _ = run_cli(capsys, "check-etale", "-")
    assert code == 0


def test_report_document_roundtrip():
    child = VerificationReport("a", Verdict.FAIL, "broken", witness={"value": "x*xi"})
    rep = VerificationReport("top", Verdict.FAIL, "combined", children=[child])
    doc = ReportDocument("check-cdga", {"weight_bound": 4}, rep, {"dims": [1, 0]}, 0.25, version="0.1.0")
    back = ReportDocument.from_json(doc.to_json())
    assert back.same_content(doc) and back.timing == 0.25
    assert back.to_json() == doc.to_json()


def test_cdga_json_roundtrip():
    for A in (samples.sl2_ce(), samples.gm_over_gl1(), samples.de_rham_affine(2)):
        B = parse_cdga(load_document(json.dumps(cdga_to_json(A))), "doc")
        assert B.presentation == A.presentation and B.differential == A.differential


def test_load_document_errors():
    with pytest.raises(ParseError) as info:
        load_document("[1, 2", "x.json")
    assert info.value.position is not None


def test_console_script():
    proc = subprocess.run(
        [sys.executable, "-m", "stackycdga.cli", "check-etale", str(FIXTURES / "ga_lie.json")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
