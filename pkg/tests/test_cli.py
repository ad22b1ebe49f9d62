import csv
import filecmp
import json
import subprocess
import sys
from importlib import resources
from pathlib import Path

import jsonschema
import pytest

from trisecant import cli

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "data"
REPORT_SCHEMA = json.loads(resources.files("trisecant").joinpath("schemas", "report.json").read_text())


def run(tmp_path, *argv, data=None):
    out = tmp_path / "report.json"
    args = list(argv) + ["--output", str(out)]
    if data is not None:
        if isinstance(data, dict):
            path = tmp_path / "input.json"
            path.write_text(json.dumps(data))
            data = path
        args += ["--input", str(data)]
    code, report = cli.run(args)
    text = out.read_text()
    assert json.loads(text) == json.loads(json.dumps(report))
    jsonschema.validate(json.loads(text), REPORT_SCHEMA)
    return code, json.loads(text)


def lame():
    return json.loads((DATA / "lame_g1.json").read_text())


def test_pass_exit_code(tmp_path):
    code, rep = run(tmp_path, "flex-check", data=DATA / "lame_g1.json")
    assert code == 0 and rep["status"] == "pass" and rep["pass"] and rep["asserted"]
    assert [r["name"] for r in rep["reports"]] == ["flex_A", "flex_B", "flex_C"]


def test_failed_assertion_exit_code(tmp_path):
    data = lame()
    data["E"] = [0.0, 0.0]
    code, rep = run(tmp_path, "flex-check", data=data)
    assert code == 1 and rep["status"] == "fail" and not rep["pass"]
    # the same data with assertions switched off only reports
    data["assert"] = False
    code, rep = run(tmp_path, "flex-check", data=data)
    assert code == 0 and not rep["pass"] and not rep["asserted"]


def test_input_errors(tmp_path):
    code, rep = run(tmp_path, "flex-check", data=DATA / "malformed_B.json")
    assert code == 2 and rep["error"]["type"] == "NotSiegel"
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, rep = run(tmp_path, "flex-check", data=bad)
    assert code == 2 and rep["error"]["type"] == "JSONDecodeError"
    data = lame()
    del data["p"]
    code, rep = run(tmp_path, "flex-check", data=data)
    assert code == 2 and rep["error"]["message"].startswith("schema error")
    code, rep = run(tmp_path, "flex-check", data=tmp_path / "missing.json")
    assert code == 2


def test_numerical_error_exit_code(tmp_path):
    # Z at the half period puts the origin of the grid on the theta divisor
    data = lame()
    data["Z"] = [[[0.6, 0.55]]]
    code, rep = run(tmp_path, "flex-check", data=data)
    assert code == 3 and rep["error"]["type"] == "NearDivisor"


def test_csv_output(tmp_path):
    path = tmp_path / "rows.csv"
    code, rep = run(tmp_path, "tangent-check", "--csv", str(path), "--samples", "2",
                    data=DATA / "tangent_g1.json")
    assert code == 0
    rows = list(csv.reader(path.read_text().splitlines()))
    assert rows[0] == ["name", "sample", "residual", "scale", "normalized"]
    assert len(rows) == 1 + sum(r["samples"] for r in rep["reports"])
    assert {r[0] for r in rows[1:]} == {"tangent_A", "tangent_B", "tangent_C"}


def test_tolerance_override(tmp_path):
    code, rep = run(tmp_path, "flex-check", "--tol", "1e-30", data=DATA / "lame_g1.json")
    assert code == 1 and all(r["tolerance"] == 1e-30 for r in rep["reports"])


def test_seed_changes_samples_not_verdict(tmp_path):
    reps = [run(tmp_path, "trisecant-check", "--seed", s, data=DATA / "trisecant_g1.json")[1]
            for s in ("1", "2")]
    assert all(r["pass"] for r in reps)
    assert reps[0]["reports"][0]["worst"] != reps[1]["reports"][0]["worst"]


@pytest.mark.parametrize("cmd,data,key", [
    ("theta-eval", "theta_g1.json", "values"), ("kummer", "kummer_g2.json", "kummer"),
    ("secancy", "three_points.json", "rank"), ("bc-spectral", None, "R"),
])
def test_result_commands(tmp_path, cmd, data, key):
    code, rep = run(tmp_path, cmd, data=None if data is None else DATA / data)
    assert code == 0 and key in rep["result"]


def test_hirota_from_input(tmp_path):
    code, rep = run(tmp_path, "hirota-check", data=DATA / "hirota_soliton.json")
    assert code == 0 and rep["result"]["value"] == "0"
    data = json.loads((DATA / "hirota_soliton.json").read_text())
    data["rates"][2] = "1/2"
    code, rep = run(tmp_path, "hirota-check", data=data)
    assert code == 1 and rep["result"]["value"] != "0"


def test_help_lists_every_command():
    out = subprocess.run([sys.executable, "-m", "trisecant.cli", "--help"], capture_output=True, text=True,
                         check=True).stdout
    for name in cli.COMMANDS:
        assert name in out
    assert "schemas/report.json" in out


def test_bad_arguments_exit_through_argparse():
    with pytest.raises(SystemExit):
        cli.run(["no-such-command"])
    with pytest.raises(SystemExit):
        cli.run(["kp-demo", "--threads", "0"])
    with pytest.raises(SystemExit):
        cli.run(["flex-check"])


def test_documented_schemas_match_packaged_ones():
    packaged = Path(str(resources.files("trisecant").joinpath("schemas")))
    names = sorted(p.name for p in packaged.glob("*.json"))
    assert names == sorted(p.name for p in (ROOT / "docs" / "schemas").glob("*.json"))
    assert set(names) == {f"{c}.json" for c in cli.COMMANDS} | {"report.json"}
    for n in names:
        assert filecmp.cmp(packaged / n, ROOT / "docs" / "schemas" / n, shallow=False)


@pytest.mark.parametrize("name", sorted(p.name for p in DATA.glob("*.json")))
def test_data_files_are_valid_json(name):
    json.loads((DATA / name).read_text())
