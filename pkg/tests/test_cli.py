import csv
import io
import json
import os
import subprocess
import sys

import pytest

from scalefn import maps
from scalefn.cli import run

MAPS = os.path.join(os.path.dirname(__file__), os.pardir, "notebooks", "maps")


def _map(name):
    return os.path.join(MAPS, name + ".json")


def _run(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _csv(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_validate_text(capsys):
    code, out, _ = _run(capsys, "validate", "builtin:example1")
    assert code == 0
    assert "0 1 1\n1 1 1\n1 1 0" in out
    assert "orientations: + - +" in out


def test_validate_json_file(capsys):
    code, out, _ = _run(capsys, "validate", _map("quadratic"), "--format", "json")
    assert code == 0
    d = json.loads(out)
    assert d["incidence"] == [[1, 1], [1, 1]]
    assert d["critical_points"][0]["gamma"] == 2.0
    assert d["geometrically_finite"] is True


def test_invalid_map_exits_1(capsys, tmp_path):
    cfg = maps.example1_config()
    cfg["branches"][0]["domain"] = [0.0, 0.1]
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(cfg))
    code, _, err = _run(capsys, "validate", str(p))
    assert code == 1 and "error:" in err
    assert _run(capsys, "validate", str(tmp_path / "missing.json"))[0] == 1
    assert _run(capsys, "validate", "builtin:nonesuch")[0] == 1


def test_partition_stats(capsys):
    code, out, _ = _run(capsys, "partition-stats", "builtin:example1", "--n-max", "5")
    rows = _csv(out)
    assert code == 0
    assert [int(r["count"]) for r in rows] == [3, 7, 17, 41, 99]
    assert all(float(r["sum_lengths"]) == pytest.approx(1.0) for r in rows)


def test_scaling_table_covers_the_seven_classes(capsys):
    code, out, _ = _run(capsys, "scaling-table", "builtin:example1", "--count", "40")
    assert code == 0
    rows = _csv(out)
    assert len(rows) == 40
    assert all(r["converged"] == "true" for r in rows)
    values = {round(float(r["value"]), 12) for r in rows}
    assert values == {0.2, 0.4, -0.375, -0.3, -0.6, 0.625, 0.5}


def test_scaling_table_explicit_address(capsys):
    code, out, _ = _run(capsys, "scaling-table", "builtin:example1", "--address", "+0|-1", "--address", "|-1")
    rows = _csv(out)
    assert code == 0
    assert [r["address"] for r in rows] == ["+0|-1", "|-1"]
    assert float(rows[0]["value"]) == pytest.approx(0.2)


def test_scaling_table_nonconvergence_exits_2(capsys):
    code, out, err = _run(capsys, "scaling-table", "builtin:quadratic", "--address", "|+0,-1", "--max-depth", "6")
    assert code == 2
    (row,) = _csv(out)
    assert row["converged"] == "false" and row["depth"] == "6"


def test_eigen(capsys):
    code, out, _ = _run(capsys, "eigen", "builtin:example1", "--max-period", "2")
    rows = json.loads(out)
    assert code == 0
    assert [r["address"] for r in rows] == ["|-1", "|+0,-1", "|+0,+2", "|-1,+0", "|-1,+2", "|+2,+0", "|+2,-1"]
    assert all(r["identity_error"] < 1e-8 for r in rows)


def test_exponent(capsys):
    code, out, _ = _run(capsys, "exponent", "builtin:cubic", "--side", "both")
    rows = json.loads(out)
    assert code == 0
    assert [r["side"] for r in rows] == ["left", "right"]
    assert all(abs(r["gamma"] - 3) < 1e-6 for r in rows)
    assert _run(capsys, "exponent", "builtin:example1")[0] == 1


def test_compare(capsys):
    code, out, _ = _run(capsys, "compare", _map("example1"), _map("example1_other_lengths"), "--count", "10")
    d = json.loads(out)
    assert code == 0
    assert d["verdict"] == "invariants-differ"
    assert d["disagreements"] > 0
    code, out, _ = _run(capsys, "compare", "builtin:example1", _map("example1"), "--count", "10")
    assert json.loads(out)["verdict"] == "invariants-match"
    assert _run(capsys, "compare", "builtin:example1", "builtin:quadratic")[0] == 1


def test_probe(capsys):
    code, out, _ = _run(
        capsys, "probe-discontinuity", "builtin:quadratic", "--address", "|+0", "--n1", "3", "--k-min", "4", "--k-max", "8"
    )
    d = json.loads(out)
    assert code == 0
    assert abs(d["jump_ratio"] - 1) > 0.1
    code, out, _ = _run(capsys, "probe-discontinuity", "builtin:example1", "--address", "|-1")
    assert json.loads(out)["note"] == "NoCriticalPoints"


def test_output_file_and_determinism(capsys, tmp_path):
    outs = []
    for k in range(2):
        p = tmp_path / f"t{k}.csv"
        assert run(["scaling-table", "builtin:quadratic", "--count", "12", "-o", str(p)]) == 0
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]
    assert outs[0].startswith(b"address,depth,value,error_bound,converged\n")


def test_worker_count_does_not_change_output(tmp_path, monkeypatch):
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    argv = ["scaling-table", "builtin:example1", "--count", "25"]
    assert run(argv + ["-o", str(p1)]) == 0
    monkeypatch.setenv("SCALEFN_THREADS", "2")
    assert run(argv + ["-o", str(p2)]) == 0
    assert p1.read_bytes() == p2.read_bytes()


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "scalefn", "validate", "builtin:doubling"], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0
    assert "branches: 2" in proc.stdout
