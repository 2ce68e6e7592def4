import json
import subprocess
import sys

import pytest

from torusindex.averaging import IndexReport
from torusindex.cli import main
from torusindex.datasets import builtin_datasets
from torusindex.localization import dump_dataset


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_index_s2_dirac(capsys):
    code, out, _ = run(capsys, "index", "--builtin", "s2-rotation", "--operator", "dirac", "--engine", "both")
    assert code == 0
    assert "exact     0" in out and "numeric   0" in out


def test_index_json_round_trips(capsys):
    code, out, _ = run(capsys, "index", "--builtin", "cp2-s1-011", "--operator", "signature", "--report", "json")
    assert code == 0
    obj = json.loads(out)
    assert obj["exact_index"] == "1/1"
    report = IndexReport.from_dict(obj)
    assert report.to_dict() == obj


def test_index_not_cancelled_exits_2(capsys):
    code, out, err = run(capsys, "index", "--builtin", "example9-n11", "--engine", "exact")
    assert code == 2
    assert "NOT CANCELLED" in out and "(-u^2 + 1)^2" in out
    assert "did not cancel" in err


def test_input_errors_exit_1(capsys, tmp_path):
    assert run(capsys, "index", "--dataset", str(tmp_path / "missing.json"))[0] == 1
    bad = tmp_path / "bad.json"
    bad.write_text('{"rank": 1, "components": [{"name": "p", "dim": 0, "normal_lines": [{"weight": [0]}]}]}')
    code, _, err = run(capsys, "index", "--dataset", str(bad))
    assert code == 1 and "n^perp" in err
    assert run(capsys, "index", "--builtin", "s2-rotation", "--chamber", "0")[0] == 1
    assert run(capsys, "index", "--builtin", "s2-rotation", "--chamber", "1,2")[0] == 1
    assert run(capsys, "index", "--builtin", "s2-rotation", "--nodes", "100")[0] == 1
    assert run(capsys, "index", "--builtin", "s2-rotation", "--nodes", str(1 << 21))[0] == 1
    assert run(capsys, "index", "--builtin", "no-such")[0] == 1
    with pytest.raises(SystemExit) as info:
        main(["index"])
    assert info.value.code == 1


def test_dataset_file(capsys, tmp_path):
    path = tmp_path / "cp2.json"
    dump_dataset(builtin_datasets("cp2-t2"), path)
    code, out, _ = run(capsys, "index", "--dataset", str(path), "--operator", "euler", "--engine", "exact")
    assert code == 0 and "exact     3" in out


def test_nclass(capsys):
    code, out, _ = run(capsys, "nclass", "--builtin", "s2-rotation", "--report", "json")
    obj = json.loads(out)
    assert code == 0 and abs(obj["total"]) < 1e-9
    values = []
    for q in ("3/10", "3/5"):
        code, out, _ = run(capsys, "nclass", "--builtin", "example9-n11", "--chamber", q, "--report", "json")
        values.append(json.loads(out)["components"][0]["integral"])
    assert all(abs(v) < 1e6 for v in values)
    code, out, _ = run(capsys, "nclass", "--builtin", "cp2-s1-011", "--trunc", "2")
    assert code == 0 and "line" in out


def test_list_and_selftest_filter(capsys):
    code, out, _ = run(capsys, "list")
    assert code == 0 and "example9-n11" in out
    code, out, _ = run(capsys, "selftest", "--filter", "chamber")
    assert code == 0
    lines = [line for line in out.splitlines() if line.startswith(("PASS", "FAIL"))]
    assert len(lines) == 1 and "chamber" in lines[0]
    assert run(capsys, "selftest", "--filter", "zzz")[0] == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "torusindex", "index", "--builtin", "k3", "--engine", "exact"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "exact     2" in proc.stdout
