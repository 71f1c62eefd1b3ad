import csv
import json
import subprocess
import sys

import pytest

from gl4whittaker.cli import main


def test_omega(capsys):
    assert main(["omega", "--q", "3", "--x", "0,0,1,0"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert len(out["omega0"]) == 4
    assert [r["det_L"] for r in out["omega0"]] == [1, 2, 1, 0]


def test_verify_writes_report(tmp_path):
    out = tmp_path / "r.json"
    code = main(["verify", "--q", "3", "--flavor", "witt", "--x", "0,1,1,0", "--theta-c", "3", "--out", str(out)])
    rep = json.loads(out.read_text())
    assert code == 0 and rep["verdict"] is True


def test_table_exports(tmp_path, capsys):
    out = tmp_path / "table.csv"
    assert main(["table", "--q", "3", "--out", str(out)]) == 0
    with open(out) as fh:
        rows = list(csv.reader(fh))
    assert rows[0][:4] == ["row", "kind", "type", "dim"]
    summary = json.loads((tmp_path / "table.json").read_text())
    assert summary["n_classes"] == 78


def test_whittaker(capsys):
    assert main(["whittaker", "--q", "3", "--theta-c", "2", "--x", "0,0,1,0"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["dimension"] == 54


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"q": 3, "x": [0, 1, 1, 0], "flavor": "eq"}))
    assert main(["--config", str(cfg), "omega"]) == 0
    assert json.loads(capsys.readouterr().out)["x"] == [0, 1, 1, 0]


@pytest.mark.parametrize("args", [["omega", "--n", "3"], ["omega", "--l", "3"]])
def test_rejects_other_n_and_l(args):
    with pytest.raises(SystemExit) as e:
        main(args)
    assert "only n = 2 and l = 2" in str(e.value)


def test_bad_config_key(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"qq": 3}))
    with pytest.raises(SystemExit):
        main(["--config", str(cfg), "omega"])


def test_module_entry_point():
    r = subprocess.run(
        [sys.executable, "-m", "gl4whittaker", "omega", "--q", "3"],
        capture_output=True,
        text=True,
        env={"GL4W_THREADS": "1", "PATH": ""},
    )
    assert r.returncode == 0, r.stderr
    assert json.loads(r.stdout)["q"] == 3
