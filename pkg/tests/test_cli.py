import csv
import io
import math
import subprocess
import sys
import time

import pytest

from d2dmotif.cli import SweepSpec, main, run_sweep
from d2dmotif.errors import DomainError
from d2dmotif.pointprocess import NetworkConfig
from d2dmotif.report import COLUMNS, format_value, write_rows


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def parse(text):
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == COLUMNS
    return [dict(zip(COLUMNS, r)) for r in rows[1:]]


@pytest.fixture(scope="module")
def analytic_csv():
    buf = io.StringIO()
    from d2dmotif.cli import run_analytic
    write_rows([run_analytic(NetworkConfig())], buf)
    return buf.getvalue()


def test_analytic_row_is_finite(analytic_csv):
    (row,) = parse(analytic_csv)
    assert row["source"] == "analytic"
    for key in ("e_star", "e_chain_first", "e_chain_second", "e_seeding", "e_avg", "outage_star",
                "outage_chain", "z_star", "z_chain", "p_ss"):
        assert math.isfinite(float(row[key])), key
    assert row["outage_chain_corr"] == ""
    assert len(row["truncation_bounds"].split(";")) == 3
    assert float(row["p_ss"]) == pytest.approx(0.43558973843518875, rel=1e-8)


def test_float_format():
    assert format_value(1 / 3) == "0.333333333"
    assert format_value(12345678901.0) == "1.23456789e+10"
    assert format_value(7) == "7"
    assert format_value(None) == ""
    assert format_value(math.nan) == "nan"
    assert format_value("abc") == "abc"


def test_simulate_bytes_are_stable(tmp_path, capsys):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        assert main(["simulate", "--trials", "3", "--seed", "5", "--out", str(p)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()
    assert b"\r" not in paths[0].read_bytes()
    code, out, _ = run(["simulate", "--trials", "3", "--seed", "5"], capsys)
    assert code == 0 and out.encode() == paths[0].read_bytes()
    (row,) = parse(out)
    assert row["source"] == "simulated"


def test_single_trial_has_unbounded_stderr(capsys):
    code, out, _ = run(["simulate", "--trials", "1"], capsys)
    (row,) = parse(out)
    assert code == 0 and row["stderr_e_star"] == "inf"


def test_sweep_orders_rows_by_axis(capsys):
    code, out, _ = run(["sweep", "--axis", "s_th", "--values", "10,20,30", "--modes", "simulate",
                        "--trials", "2"], capsys)
    rows = parse(out)
    assert code == 0
    assert [float(r["s_th"]) for r in rows] == [10.0, 20.0, 30.0]


def test_single_value_sweep_equals_single_run(capsys):
    _, single, _ = run(["simulate", "--trials", "2", "--seed", "3"], capsys)
    _, swept, _ = run(["sweep", "--axis", "s_th", "--values", "20", "--modes", "simulate",
                       "--trials", "2", "--seed", "3"], capsys)
    assert single == swept


def test_scatter_sweep_preset(capsys):
    spec = SweepSpec(NetworkConfig(), "sigma2", (50.0, 100.0, 150.0), ("simulate",), trials=2)
    rows = run_sweep(spec)
    assert [r[COLUMNS.index("sigma2")] for r in rows] == ["50", "100", "150"]


def test_motif_probability_preset(tmp_path, capsys):
    cfg = tmp_path / "fig.cfg"
    cfg.write_text("scatter_variance_m2 = 100\nmax_link_distance_m = 20\n")
    code, out, _ = run(["sweep", "--config", str(cfg), "--axis", "s_th", "--values", "20"],
                       capsys)
    (row,) = parse(out)
    assert code == 0
    assert float(row["p_ss"]) == pytest.approx(0.45, abs=0.05)


def test_sweep_spec_validation():
    base = NetworkConfig()
    with pytest.raises(DomainError):
        SweepSpec(base, "gamma", (1.0,))
    with pytest.raises(DomainError):
        SweepSpec(base, "s_th", ())
    with pytest.raises(DomainError):
        SweepSpec(base, "s_th", (20.0, 10.0))
    with pytest.raises(DomainError):
        SweepSpec(base, "s_th", (10.0,), modes=("plot",))
    with pytest.raises(DomainError):
        SweepSpec(base, "s_th", (10.0,), trials=0)
    with pytest.raises(DomainError):
        list(SweepSpec(base, "N", (10.5,)).configs())


@pytest.mark.parametrize("text,code", [
    ("bogus_key = 1\n", 1),
    ("devices_per_cluster = 2\n", 2),
    ("devices_per_cluster = 6\n", 3),
    ("max_link_distance_m = 0.001\nparent_density_per_km2 = 1e-9\n", 4),
])
def test_exit_codes(tmp_path, capsys, text, code):
    cfg = tmp_path / "c.cfg"
    cfg.write_text(text)
    got, _, err = run(["analytic", "--config", str(cfg)], capsys)
    assert got == code
    assert err.startswith("error")
    if code > 1:
        assert "s_th=" in err and "N=" in err


def test_missing_config_file_is_generic_error(tmp_path, capsys):
    code, _, _ = run(["analytic", "--config", str(tmp_path / "none.cfg")], capsys)
    assert code == 1


def test_bad_arguments_are_generic_errors(capsys):
    assert run(["frobnicate"], capsys)[0] == 1
    assert run(["sweep", "--axis", "s_th", "--values", "x"], capsys)[0] == 1


def test_zero_tolerance_fails_validation(capsys):
    code, out, _ = run(["validate", "--quick", "--tolerance-scale", "0"], capsys)
    assert code == 5
    assert "[FAIL]" in out


def test_quick_validation_is_fast_and_passes(capsys):
    start = time.perf_counter()
    code, out, _ = run(["validate", "--quick"], capsys)
    assert code == 0
    assert time.perf_counter() - start < 60
    assert "[FAIL]" not in out and out.count("[PASS]") >= 15


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "d2dmotif", "simulate", "--trials", "1"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == ",".join(COLUMNS)
