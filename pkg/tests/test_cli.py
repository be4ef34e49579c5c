import csv
import io
import math
import textwrap

import numpy as np
import pytest

from frictionlab import cli
from frictionlab.config import ConfigError, from_dict, grid_values, load


def _write(tmp_path, text, name="cfg.toml"):
    path = tmp_path / name
    path.write_text(textwrap.dedent(text))
    return str(path)


def _read_csv(path):
    with open(path) as fh:
        return list(csv.reader(fh))


BRICK = """
    scenario = "brick_incline"
    dt = 1e-4
    duration = 0.02
    output_every = 5
    [params]
    alpha = 0.18
    [friction]
    k_d = 632.0
"""


# -- config ---------------------------------------------------------------------

def test_grid_values():
    assert grid_values({"start": 2.0, "stop": 30.0, "count": 10}, "a")[-1] == 30.0
    assert len(grid_values({"start": 2.0, "stop": 30.0, "count": 10}, "a")) == 10
    assert grid_values([1, 2, 3], "a") == [1.0, 2.0, 3.0]
    assert grid_values({"start": 1.0, "stop": 2.0, "count": 1}, "a") == [1.0]
    fine = grid_values({"start": 1.0, "stop": 30.0, "count": 291}, "a")
    etas = grid_values({"start": 0.2, "stop": 0.5, "count": 31}, "e")
    assert len(fine) * len(etas) == 9021
    assert math.isclose(fine[1] - fine[0], 0.1)
    for bad in ([], ["x"], {"start": 0, "stop": 1}, {"start": 0, "stop": 1, "count": 0}):
        with pytest.raises(ConfigError):
            grid_values(bad, "a")


@pytest.mark.parametrize("raw, message", [
    ({}, "scenario"),
    ({"scenario": "teapot"}, "unknown scenario"),
    ({"scenario": "brick_incline", "dt": 0.0}, "dt"),
    ({"scenario": "brick_incline", "dt": "fast"}, "dt"),
    ({"scenario": "brick_incline", "duration": -1.0}, "duration"),
    ({"scenario": "brick_incline", "output_every": 0}, "output_every"),
    ({"scenario": "brick_incline", "params": {"colour": 1}}, "params"),
    ({"scenario": "brick_incline", "friction": {"mu_x": 1}}, "friction"),
    ({"scenario": "brick_incline", "friction": {"mu_s": 0.1, "mu_k": 0.2}}, "mu_s"),
    ({"scenario": "brick_incline", "extra": 1}, "top-level"),
])
def test_invalid_configs(raw, message):
    with pytest.raises(ConfigError, match=message):
        from_dict(raw)


def test_dt_outside_band_warns(caplog):
    from_dict({"scenario": "brick_incline", "dt": 1e-2})
    assert "outside" in caplog.text


def test_load_reports_malformed_toml(tmp_path):
    with pytest.raises(ConfigError, match="malformed"):
        load(_write(tmp_path, 'scenario = "brick'))
    with pytest.raises(ConfigError, match="cannot read"):
        load(str(tmp_path / "missing.toml"))


def test_shipped_configs_validate():
    import glob
    import os
    root = os.path.join(os.path.dirname(__file__), os.pardir, "configs")
    files = sorted(glob.glob(os.path.join(root, "*.toml")))
    assert files
    for path in files:
        load(path)


# -- run --------------------------------------------------------------------------

def test_run_writes_csv(tmp_path):
    out = tmp_path / "brick.csv"
    assert cli.main(["run", "--config", _write(tmp_path, BRICK), "--out", str(out)]) == 0
    rows = _read_csv(out)
    header, body = rows[0], rows[1:]
    assert header[0] == "t" and "c.Fe_x" in header and "c.slide_mode" in header
    assert len(body) == 41
    times = [float(r[0]) for r in body]
    assert times == sorted(times)
    # 17 significant digits round-trip exactly
    value = body[-1][header.index("brick.x")]
    assert float("%.17g" % float(value)) == float(value)


def test_run_config_errors_exit_2(tmp_path, capsys):
    assert cli.main(["run", "--config", _write(tmp_path, 'scenario = "brick_incline"\ndt = 0\n'),
                     "--out", str(tmp_path / "x.csv")]) == 2
    assert "dt" in capsys.readouterr().err
    assert cli.main(["run", "--config", _write(tmp_path, "scenario = [", "b.toml")]) == 2
    assert cli.main(["run"]) == 2


def test_run_numerical_failure_exit_3(tmp_path, capsys):
    cfg = _write(tmp_path, """
        scenario = "brick_incline"
        dt = 1e-3
        duration = 1.0
        [friction]
        k_e = 1e300
        k_d = 1e300
    """)
    with np.errstate(all="ignore"):
        assert cli.main(["run", "--config", cfg, "--out", str(tmp_path / "x.csv")]) == 3
    assert "numerical" in capsys.readouterr().err


def test_seedless_runs_are_identical(tmp_path):
    cfg = _write(tmp_path, BRICK)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    cli.main(["run", "--config", cfg, "--out", str(a)])
    cli.main(["run", "--config", cfg, "--out", str(b), "--seedless"])
    assert a.read_text() == b.read_text()


# -- sweep ------------------------------------------------------------------------

SWEEP = """
    scenario = "sphere_incline"
    duration = 0.05
    output_every = 10
    [sweep]
    alpha_deg = {alphas}
    eta_r = {etas}
"""


def test_single_cell_sweep(tmp_path):
    out = tmp_path / "pm.csv"
    cfg = _write(tmp_path, SWEEP.format(alphas="[35.0]", etas="[0.3]"))
    assert cli.main(["sweep", "--config", cfg, "--out", str(out)]) == 0
    rows = _read_csv(out)
    assert rows[0] == ["alpha_deg", "eta_r", "simulated", "oracle", "agree", "boundary"]
    assert len(rows) == 2 and rows[1][3] == "RwS"


def test_sweep_order_independent_of_workers(tmp_path):
    cfg = _write(tmp_path, SWEEP.format(alphas="[5.0, 20.0, 35.0]", etas="[0.2, 0.45]"))
    serial, parallel = tmp_path / "s.csv", tmp_path / "p.csv"
    assert cli.main(["sweep", "--config", cfg, "--out", str(serial)]) == 0
    assert cli.main(["sweep", "--config", cfg, "--out", str(parallel), "--workers", "3"]) == 0
    assert serial.read_text() == parallel.read_text()
    rows = _read_csv(serial)[1:]
    assert [(float(r[0]), float(r[1])) for r in rows] == [
        (5.0, 0.2), (5.0, 0.45), (20.0, 0.2), (20.0, 0.45), (35.0, 0.2), (35.0, 0.45)]


def test_sweep_rejects_other_scenarios(tmp_path):
    assert cli.main(["sweep", "--config", _write(tmp_path, BRICK)]) == 2


# -- roll model comparison -----------------------------------------------------------

def test_compare_roll_models_quiescent_disk(tmp_path):
    cfg = _write(tmp_path, """
        scenario = "disk_rolling"
        duration = 0.01
        output_every = 10
        [params]
        v0 = 0.0
        [compare]
        mu_r = 0.1
    """)
    out = tmp_path / "cmp.csv"
    assert cli.main(["compare-roll-models", "--config", cfg, "--out", str(out)]) == 0
    rows = _read_csv(out)
    header = rows[0]
    hist = header.index("history.c.Tre_j_y")
    leg = header.index("legacy.c.Tre_j_y")
    for row in rows[1:]:
        assert float(row[hist]) == 0.0 and float(row[leg]) == 0.0
        assert float(row[header.index("history.disk.vx")]) == 0.0
        assert float(row[header.index("legacy.disk.vx")]) == 0.0


def test_compare_needs_rolling_scenario(tmp_path):
    assert cli.main(["compare-roll-models", "--config", _write(tmp_path, BRICK)]) == 2


# -- oracle -------------------------------------------------------------------------

def test_oracle_command(capsys):
    assert cli.main(["oracle", "--alpha-deg", "5", "--mu-s", "0.25", "--mu-k", "0.2",
                     "--eta-r", "0.3"]) == 0
    assert capsys.readouterr().out.strip() == "S"
    assert cli.main(["oracle", "--alpha-deg", "5"]) == 2


def test_csv_float_format():
    assert cli.fmt(0.1) == "0.10000000000000001"
    assert cli.fmt(np.float64(1.0)) == "1"
    assert cli.fmt("PR") == "PR"
