import csv
import json
import math
import subprocess
import sys

import pytest

from mirrorchannel import cli

PW_HEADER = "omega,kappa,cutoff_low,cutoff_high,tau,n_bar,class"
PK_HEADER = "traj,kappa,epsilon,xi,nu,j,n,tau,n_bar,class,quad_error"


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_planewave_single_point_threshold(tmp_path):
    out = tmp_path / "pw.csv"
    code = cli.main(["planewave", "--kappa", "1", "--omega-min", repr(1 / (2 * math.pi)), "--omega-steps", "1",
                     "--out", str(out)])
    assert code == 0
    text = out.read_text()
    assert text.splitlines()[0] == PW_HEADER
    (row,) = _rows(out)
    assert float(row["tau"]) == pytest.approx(1.0, abs=1e-12)
    assert row["class"] == "classical_additive"
    meta = json.loads((tmp_path / "pw.csv.json").read_text())
    assert meta["settings"]["kappa"] == 1.0 and meta["rows"] == 1


def test_planewave_grid_is_sorted_and_full_precision(tmp_path):
    out = tmp_path / "pw.csv"
    assert cli.main(["planewave", "--omega-min", "0.05", "--omega-max", "20", "--omega-steps", "7",
                     "--out", str(out)]) == 0
    rows = _rows(out)
    omegas = [float(r["omega"]) for r in rows]
    assert omegas == sorted(omegas) and len(omegas) == 7
    for r in rows:
        tau = float(r["tau"])
        assert tau == pytest.approx(1 / (2 * math.pi * float(r["omega"])), rel=1e-12)
        assert float("%.17g" % tau) == tau
    classes = {r["class"] for r in rows}
    assert classes == {"amplifier", "attenuator"}


def test_parallel_output_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["packet", "--kappa", "1", "--epsilon", "0.1", "--j-min", "1", "--j-max", "2", "--n-min", "-2",
            "--n-max", "2"]
    assert cli.main(args + ["--out", str(a)]) == 0
    assert cli.main(args + ["--jobs", "2", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    rows = _rows(a)
    assert a.read_text().splitlines()[0] == PK_HEADER
    keys = [(int(r["j"]), int(r["n"])) for r in rows]
    assert keys == sorted(keys) and len(keys) == 10


def test_flagged_rows_give_exit_three_and_are_listed(tmp_path):
    out = tmp_path / "f.csv"
    code = cli.main(["packet", "--preset", "fig1", "--j-max", "1", "--n-min", "0", "--n-max", "1",
                     "--out", str(out)])
    assert code == cli.EXIT_FLAGGED
    meta = json.loads((tmp_path / "f.csv.json").read_text())
    assert {(f["j"], f["n"]) for f in meta["flagged"]} == {(0, 0), (0, 1)}
    assert len(_rows(out)) == 4


def test_darcx_planewave_is_rejected(tmp_path, capsys):
    out = tmp_path / "x.csv"
    code = cli.main(["planewave", "--traj", "darcx", "--out", str(out)])
    assert code == cli.EXIT_USAGE
    assert "plane wave approach leads to undefined tau" in capsys.readouterr().err
    assert not out.exists()


@pytest.mark.parametrize(
    "args",
    [
        ["planewave", "--omega-steps", "0"],
        ["planewave", "--omega-min", "2", "--omega-max", "1", "--omega-steps", "3"],
        ["packet", "--n-min", "3", "--n-max", "2"],
        ["packet", "--traj", "darcx"],
        ["packet", "--epsilon", "-1"],
        ["planewave", "--cutoff-low", "1e-3", "--cutoff-high", "1e3"],
        ["planewave", "--jobs", "0"],
        ["planewave", "--bogus"],
    ],
)
def test_usage_errors_write_nothing(tmp_path, args):
    out = tmp_path / "u.csv"
    assert cli.main(args + ["--out", str(out)]) == cli.EXIT_USAGE
    assert not out.exists()


def test_config_file_and_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# sweep\nomega-min = 0.1\nomega_max = 1.0\nomega-steps = 3\nkappa = 5\n")
    out = tmp_path / "c.csv"
    assert cli.main(["planewave", "--config", str(cfg), "--kappa", "2", "--out", str(out)]) == 0
    rows = _rows(out)
    assert len(rows) == 3
    assert {float(r["kappa"]) for r in rows} == {2.0}
    assert float(rows[0]["omega"]) == 0.1 and float(rows[-1]["omega"]) == pytest.approx(1.0)


def test_config_overrides_preset(tmp_path):
    cfg = tmp_path / "p.cfg"
    cfg.write_text("preset = fig1\nj-min = 2\nj-max = 2\nn-min = 0\nn-max = 0\n")
    out = tmp_path / "p.csv"
    assert cli.main(["packet", "--config", str(cfg), "--out", str(out)]) == 0
    (row,) = _rows(out)
    assert (row["j"], row["n"], float(row["epsilon"])) == ("2", "0", 0.1)


@pytest.mark.parametrize("content", ["kappa 1\n", "colour = blue\n", "kappa = fast\n"])
def test_bad_config(tmp_path, content):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text(content)
    assert cli.main(["planewave", "--config", str(cfg)]) == cli.EXIT_USAGE


def test_missing_config():
    assert cli.main(["planewave", "--config", "/nonexistent/run.cfg"]) == cli.EXIT_USAGE


def test_presets_resolve():
    args = cli.build_parser().parse_args(["packet", "--preset", "fig3"])
    s = cli.resolve_settings(args)
    tasks = cli.packet_tasks(s)
    assert len(tasks) == 3 * 81
    for t in tasks:
        assert abs(t.xi * t.nu) == pytest.approx(1e-50) and t.epsilon == 2e-44 and t.j == 0


def test_optimize_eps_output(capsys):
    assert cli.main(["optimize-eps", "--kappa", "1", "--eps-min", "0.05", "--eps-max", "0.5"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "kappa,j,n,epsilon,tau,method,at_boundary"
    fields = lines[1].split(",")
    assert float(fields[3]) == pytest.approx(0.05) and fields[-1] == "true"


def test_selftest_passes_and_catches_injected_fault(capsys):
    assert cli.main(["selftest"]) == 0
    assert "FAIL" not in capsys.readouterr().out
    assert cli.main(["selftest", "--inject-fault", "gamma-branch"]) == cli.EXIT_FAILURE
    out = capsys.readouterr().out
    assert "FAIL  thermal spectrum" in out


def test_console_entry_points():
    res = subprocess.run([sys.executable, "-m", "mirrorchannel", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and "0.1.0" in res.stdout
    res = subprocess.run(["mirrorchannel", "planewave", "--omega-steps", "1", "--omega-min", "1"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert res.stdout.splitlines()[0] == PW_HEADER


def test_no_subcommand_is_usage_error():
    assert cli.main([]) == cli.EXIT_USAGE


def test_tau_offset_column_for_darcx(tmp_path):
    out = tmp_path / "d.csv"
    args = ["packet", "--traj", "darcx", "--xi", "0.3", "--nu", "1", "--epsilon", "0.1", "--j-min", "1",
            "--j-max", "1", "--n-min", "0", "--n-max", "1"]
    assert cli.main(args + ["--tau-offset", "--out", str(out)]) == 0
    assert out.read_text().splitlines()[0] == PK_HEADER + ",tau_minus_one"
    for r in _rows(out):
        assert float(r["tau_minus_one"]) == pytest.approx(float(r["tau"]) - 1.0, rel=1e-6, abs=1e-12)
    plain = tmp_path / "p.csv"
    assert cli.main(args + ["--out", str(plain)]) == 0
    assert plain.read_text().splitlines()[0] == PK_HEADER
    assert "note" in json.loads((tmp_path / "p.csv.json").read_text())
