import json
import subprocess
import sys
from pathlib import Path

import pytest

from cdgl.cli import SCENARIOS, load_model, main
from cdgl.fixtures import TEXTS

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("scenario", ["check", "homology", "derivations", "mc", "gauge", "fibration",
                                      "classify-cell"])
def test_scenarios_pass_on_cp2(capsys, scenario):
    code, out, _ = run(capsys, scenario, "cp2")
    assert code == 0
    assert out.rstrip().endswith("status: pass")


def test_file_and_builtin_agree(capsys):
    _, a, _ = run(capsys, "homology", str(FIXTURES / "disk1.cdgl"), "--json", "-")
    _, b, _ = run(capsys, "homology", "disk1", "--json", "-")
    ra, rb = json.loads(a), json.loads(b)
    assert ra["results"] == rb["results"] and ra["certificates"] == rb["certificates"]


def test_fixture_files_match_builtin_texts():
    for name, text in TEXTS.items():
        assert (FIXTURES / f"{name}.cdgl").read_text() == text


def test_json_report_shape(capsys):
    code, out, _ = run(capsys, "check", "disk1", "--json", "-")
    rep = json.loads(out)
    assert code == 0 and rep["schema"] == "cdgl-report/1"
    assert rep["scenario"] == "check" and rep["status"] == "pass"
    assert rep["truncation"] == 6
    assert set(rep) >= {"model", "provenance", "window", "certificates", "results", "d2_sign"}


def test_json_file_written(capsys, tmp_path):
    target = tmp_path / "r.json"
    code, out, _ = run(capsys, "homology", "cp2", "--json", str(target))
    assert code == 0 and "status: pass" in out
    assert json.loads(target.read_text())["scenario"] == "homology"


def test_deterministic_output(capsys):
    outs = {run(capsys, "gauge", "cp2", "--json", "-", "--seed", "3")[1] for _ in range(3)}
    assert len(outs) == 1


def test_options(capsys):
    code, out, _ = run(capsys, "homology", "cp2", "--truncate", "4", "--window", "0..3", "--json", "-")
    rep = json.loads(out)
    assert code == 0 and rep["truncation"] == 4 and rep["window"] == [0, 3]


def test_failing_certificates_exit_one(capsys):
    code, out, _ = run(capsys, "quasi-iso-suite", "disk1")
    assert code == 1
    assert "FAIL" in out and out.rstrip().endswith("status: fail")


def test_usage_errors_exit_two(capsys, tmp_path):
    assert run(capsys, "check", str(tmp_path / "missing.cdgl"))[0] == 2
    bad = tmp_path / "bad.cdgl"
    bad.write_text("generator x : 1\nd x = [x, \n")
    code, _, err = run(capsys, "check", str(bad))
    assert code == 2 and "line 2" in err
    assert run(capsys, "fibration", "mctoy")[0] == 2
    assert run(capsys, "check", "disk1", "--window", "3..1")[0] == 2
    with pytest.raises(SystemExit):
        main(["no-such-scenario", "disk1"])


def test_load_model_provenance():
    script, prov = load_model("cp2")
    assert script.name == "cp2" and "built-in" in prov
    script, prov = load_model(str(FIXTURES / "cp2.cdgl"))
    assert "cp2.cdgl" in prov


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "cdgl.cli", "check", "disk1"], capture_output=True, text=True)
    assert r.returncode == 0 and "status: pass" in r.stdout


def test_scenario_list():
    assert set(SCENARIOS) >= {"check", "homology", "derivations", "mc", "gauge", "fibration",
                              "classify-cell", "quasi-iso-suite"}
