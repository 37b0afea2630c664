import pathlib

import pytest

import app
from blocks.components.io.run_config import build_config
from tests.support import SYSTEMS_DIR


def _system(name: str) -> str:
    return str(SYSTEMS_DIR / f"{name}.json")


def _read_report(path: pathlib.Path) -> dict:
    pairs = (line.split(" = ", 1) for line in path.read_text(encoding="utf-8").splitlines())
    return {k: v for k, v in pairs}


def _run(subcommand: str, out: pathlib.Path, *extra: str) -> int:
    return app.main([subcommand, "--out", str(out), "--no-cache", *extra])


def test_dim_conformal(tmp_path, capsys):
    code = _run("dim", tmp_path, "--ifs", _system("conformal_rotation_pair"), "--nmax", "10", "--tol", "1e-12")
    assert code == app.EXIT_OK
    report = _read_report(tmp_path / "dimension.txt")
    assert float(report["prediction"]) == pytest.approx(1.0, abs=1e-9)
    assert report["subcommand"] == "dim"
    assert report["norm_half_ok"] == "false"
    assert "config.workers" not in report
    assert (tmp_path / "roots.csv").read_text().startswith("n,t_n\n")
    assert "dimension = " in capsys.readouterr().out


def test_dim_outputs_do_not_depend_on_workers(tmp_path):
    one, two = tmp_path / "w1", tmp_path / "w2"
    args = ("--ifs", _system("generic_pair"), "--nmax", "8")
    assert _run("dim", one, *args, "--workers", "1") == 0
    assert _run("dim", two, *args, "--workers", "2") == 0
    for name in ("dimension.txt", "roots.csv"):
        assert (one / name).read_bytes() == (two / name).read_bytes()


def test_pressure_grid(tmp_path):
    code = _run("pressure", tmp_path, "--ifs", _system("diagonal_triple"), "--t-grid", "1,2", "--nmax", "3", "--plot")
    assert code == 0
    report = _read_report(tmp_path / "pressure.txt")
    assert report["strictly_decreasing"] == "true"
    assert report["grid.0.fekete_upper_label"] == "rigorous upper bound"
    lines = (tmp_path / "pressure.csv").read_text().splitlines()
    assert lines[0] == "t,n,P_n"
    assert len(lines) == 1 + 2 * 3
    assert (tmp_path / "pressure_curve.png").read_bytes()[:4] == b"\x89PNG"


def test_pressure_rejects_unsorted_grid(tmp_path):
    code = _run("pressure", tmp_path, "--ifs", _system("diagonal_triple"), "--t-grid", "2,1,0")
    assert code == app.EXIT_ERROR
    assert not (tmp_path / "pressure.txt").exists()


def test_missing_ifs_is_usage_error(tmp_path):
    assert _run("dim", tmp_path) == app.EXIT_ERROR


def test_broken_ifs_file(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"dimension": 2, "maps": [', encoding="utf-8")
    assert _run("dim", tmp_path / "out", "--ifs", str(bad)) == app.EXIT_ERROR


def test_verify_natural(tmp_path):
    code = _run("verify", tmp_path, "--ifs", _system("generic_pair"), "--samples", "300", "--nmax", "8")
    assert code == app.EXIT_OK
    report = _read_report(tmp_path / "verify.txt")
    assert report["violated"] == "false"
    assert report["kind"] == "natural"


def test_measure_outputs(tmp_path):
    one, two = tmp_path / "w1", tmp_path / "w2"
    args = ("--ifs", _system("swap_pair"), "--nmax", "6", "--depth", "2", "--samples", "50", "--iterations", "20")
    assert _run("measure", one, *args) == 0
    assert _run("measure", two, *args, "--workers", "2") == 0
    report = _read_report(one / "measure.txt")
    assert float(report["diagnostics.invariance_defect_max"]) <= 1 / 6 + 1e-12
    assert (one / "measure.csv").read_text().startswith("word,mass\n00,")
    for name in ("measure.txt", "measure.csv"):
        assert (one / name).read_bytes() == (two / name).read_bytes()


def test_render_is_byte_identical(tmp_path):
    one, two = tmp_path / "w1", tmp_path / "w2"
    args = ("--ifs", _system("generic_pair"), "--count", "5000", "--resolution", "64", "--seed", "3")
    assert _run("render", one, *args) == 0
    assert _run("render", two, *args, "--workers", "2") == 0
    data = (one / "attractor.pgm").read_bytes()
    assert data.startswith(b"P5\n64 64\n255\n")
    assert data == (two / "attractor.pgm").read_bytes()
    assert (one / "render.txt").read_bytes() == (two / "render.txt").read_bytes()


def test_render_equilibrium_driver(tmp_path):
    args = ("--ifs", _system("swap_pair"), "--count", "2000", "--resolution", "32", "--driver", "equilibrium", "--nmax", "6")
    assert _run("render", tmp_path, *args) == 0
    assert _read_report(tmp_path / "render.txt")["driver"].startswith("measure:")


def test_boxdim_single_cloud(tmp_path):
    code = _run("boxdim", tmp_path, "--ifs", _system("cantor"), "--count", "50000")
    assert code == 0
    report = _read_report(tmp_path / "boxdim.txt")
    assert 0.0 < float(report["estimate"]) < 1.0
    assert (tmp_path / "box_counts.csv").exists()


def test_run_dispatch(tmp_path):
    cfg = build_config(
        "dim",
        {"ifs": pathlib.Path(_system("diagonal_triple")), "nmax": 3, "out": tmp_path, "use_cache": False},
    )
    assert app.run(cfg) == app.EXIT_OK
    assert float(_read_report(tmp_path / "dimension.txt")["prediction"]) == pytest.approx(1.2924812503605781, abs=1e-6)


def test_render_points_csv(tmp_path):
    args = ("--ifs", _system("cantor"), "--count", "100", "--resolution", "16", "--points")
    assert _run("render", tmp_path, *args) == 0
    lines = (tmp_path / "points.csv").read_text().splitlines()
    assert lines[0] == "x0"
    assert len(lines) == 101


def test_boxdim_trials_over_budget(tmp_path):
    args = ("--ifs", _system("generic_pair"), "--trials", "3", "--count", "1000", "--nmax", "3", "--budget", "1")
    assert _run("boxdim", tmp_path, *args) == app.EXIT_ERROR
    assert not (tmp_path / "boxdim.txt").exists()
