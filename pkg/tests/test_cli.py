"""CLI surface: exit codes, output files, determinism, the invariant
suite, and the snapshot inspector."""

import os

import numpy as np
import pytest

from mhd2d.cli import cli_main
from mhd2d.storage import read_snapshot, read_timeseries_csv

SMALL = """
nx = 12
ny = 12
t_final = 0.05
eps = 1e-2
delta = 1e-2
init_kind = ratio-profile
init_rho_amp = 0.1
init_kx = 1
init_ky = 1
init_ratio_mid = 1.25
init_ratio_amp = 0.75
init_jx = 1
record_interval = 2
snapshot_interval = 5
run_id = smoke
"""

CONSTANT = """
nx = 12
ny = 12
t_final = 0.05
init_kind = constant
run_id = const
"""


@pytest.fixture
def small_cfg(tmp_path):
    path = tmp_path / "small.cfg"
    path.write_text(SMALL)
    return str(path)


def test_run_writes_outputs_and_exits_zero(small_cfg, tmp_path, capsys):
    out = tmp_path / "out"
    assert cli_main(["run", small_cfg, "--output-dir", str(out)]) == 0
    run_dir = out / "smoke"
    files = sorted(os.listdir(run_dir))
    assert "timeseries.csv" in files
    snaps = [f for f in files if f.endswith(".mhd2")]
    assert len(snaps) >= 2
    series = read_timeseries_csv(run_dir / "timeseries.csv")
    assert series.records[0].t == 0.0
    assert "outputs in" in capsys.readouterr().out


def test_run_is_bit_deterministic(small_cfg, tmp_path):
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert cli_main(["run", small_cfg, "--output-dir", str(out_a)]) == 0
    assert cli_main(["run", small_cfg, "--output-dir", str(out_b)]) == 0
    csv_a = (out_a / "smoke" / "timeseries.csv").read_bytes()
    csv_b = (out_b / "smoke" / "timeseries.csv").read_bytes()
    assert csv_a == csv_b
    for f in sorted(os.listdir(out_a / "smoke")):
        assert (out_a / "smoke" / f).read_bytes() == (out_b / "smoke" / f).read_bytes()


def test_env_var_overrides_output_dir(small_cfg, tmp_path, monkeypatch):
    env_dir = tmp_path / "from_env"
    monkeypatch.setenv("MHD2D_OUTPUT_DIR", str(env_dir))
    assert cli_main(["run", small_cfg]) == 0
    assert (env_dir / "smoke" / "timeseries.csv").exists()


def test_missing_config_path_exit_2(capsys):
    assert cli_main(["run", "/nonexistent/path.cfg"]) == 2
    assert "config error" in capsys.readouterr().err


def test_invalid_config_exit_2(tmp_path, capsys):
    path = tmp_path / "bad.cfg"
    path.write_text("nx = 12\nny = 12\nt_final = 1\nGamma = 3\ndelta = 0.1\n")
    assert cli_main(["run", str(path)]) == 2
    assert "Gamma" in capsys.readouterr().err


def test_unknown_key_exit_2(tmp_path, capsys):
    path = tmp_path / "bad.cfg"
    path.write_text("nx = 12\nny = 12\nt_final = 1\nbogus = 1\n")
    assert cli_main(["run", str(path)]) == 2


def test_usage_error_exit_2():
    assert cli_main(["frobnicate"]) == 2
    assert cli_main([]) == 2


def test_verify_constant_config_all_pass(tmp_path, capsys):
    path = tmp_path / "const.cfg"
    path.write_text(CONSTANT)
    assert cli_main(["verify", str(path)]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out
    assert "constant-fixed-point" in out


def test_verify_reckless_cfl_fails_exit_1(tmp_path, capsys):
    path = tmp_path / "long.cfg"
    path.write_text(SMALL.replace("t_final = 0.05", "t_final = 1.0"))
    assert cli_main(["verify", str(path), "--cfl", "5.0"]) == 1
    out = capsys.readouterr().out
    assert "FAIL positivity" in out or "FAIL maximum-principle" in out


def test_aborted_run_flushes_partial_outputs(tmp_path, capsys):
    path = tmp_path / "long.cfg"
    path.write_text(SMALL.replace("t_final = 0.05", "t_final = 1.0")
                    .replace("record_interval = 2", "record_interval = 1"))
    out = tmp_path / "out"
    assert cli_main(["run", str(path), "--output-dir", str(out), "--cfl", "5.0"]) == 1
    assert "run aborted" in capsys.readouterr().err
    run_dir = out / "smoke"
    series = read_timeseries_csv(run_dir / "timeseries.csv")
    assert len(series.records) >= 1  # whatever was computed landed on disk


def test_inspect_prints_header_and_stats(small_cfg, tmp_path, capsys):
    out = tmp_path / "out"
    cli_main(["run", small_cfg, "--output-dir", str(out)])
    snap = sorted((out / "smoke").glob("*.mhd2"))[0]
    assert cli_main(["inspect", str(snap)]) == 0
    text = capsys.readouterr().out
    assert "grid 12 x 12" in text
    assert "rho" in text and "uy" in text
    state = read_snapshot(snap)
    assert np.isfinite(state.rho).all()


def test_inspect_bad_file_exit_1(tmp_path, capsys):
    path = tmp_path / "junk.mhd2"
    path.write_bytes(b"JUNKJUNKJUNK")
    assert cli_main(["inspect", str(path)]) == 1


def test_sweep_eps_cli(small_cfg, tmp_path, capsys):
    out = tmp_path / "out"
    code = cli_main(["sweep-eps", small_cfg, "--output-dir", str(out),
                     "--eps-list", "1e-2,5e-3"])
    assert code == 0
    assert (out / "smoke_sweep_eps.csv").exists()
    assert "eps sweep" in capsys.readouterr().out


def test_sweep_delta_cli(small_cfg, tmp_path, capsys):
    out = tmp_path / "out"
    code = cli_main(["sweep-delta", small_cfg, "--output-dir", str(out),
                     "--delta-list", "1e-2,2.5e-3"])
    assert code == 0
    assert (out / "smoke_sweep_delta.csv").exists()


def test_mms_cli_tiny(small_cfg, tmp_path, capsys):
    out = tmp_path / "out"
    code = cli_main(["mms", small_cfg, "--output-dir", str(out),
                     "--resolutions", "8,12"])
    assert code == 0
    assert (out / "smoke_mms.csv").exists()
    assert "order[rho]" in capsys.readouterr().out
