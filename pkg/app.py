from __future__ import annotations

import argparse
import hashlib
import logging
import pathlib
import sys
from typing import Any, Callable, Dict, List, Optional

import pandas as pd

from blocks.components.affine.box_counting import box_dimension, default_scales, full_dimension_trials
from blocks.components.affine.chaos_game import attractor_points
from blocks.components.affine.ifs_model import AffineIFS
from blocks.components.cylinder.axioms import verify_axioms
from blocks.components.cylinder.cylinder_function import (
    CylinderFunction,
    NaturalCylinderFunction,
    product_from_ifs,
)
from blocks.components.equilibrium.diagnostics import equilibrium_diagnostics
from blocks.components.equilibrium.measures import (
    CylinderMeasure,
    bernoulli_lower_estimate,
    local_dimension_samples,
    measure_to_frame,
    mu_cesaro,
)
from blocks.components.io.cache import PartitionSumCache
from blocks.components.io.ifs_file import parse_ifs_file
from blocks.components.io.reports import flatten, format_value, write_bytes, write_csv, write_report
from blocks.components.io.run_config import SUBCOMMANDS, RunConfig, build_config
from blocks.components.pressure.dimension import affinity_dimension, pressure_root
from blocks.components.pressure.partition_sum import pressure_sequence
from blocks.components.util.errors import UsageError
from blocks.components.visual.render_pgm import render_pgm

logger = logging.getLogger("app")

# ===== Pfade / Repo-Layout ====================================================
BASE_DIR = pathlib.Path(__file__).parent.resolve()

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VIOLATION = 2

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


# ===== Hilfsfunktionen ========================================================
def _sha1_bytes(data: bytes) -> str:
    return hashlib.sha1(data).hexdigest()[:10]


def _out(cfg: RunConfig, name: str) -> pathlib.Path:
    return pathlib.Path(cfg.out) / name


def _open_cache(cfg: RunConfig) -> Optional[PartitionSumCache]:
    if not cfg.use_cache or cfg.cache is None:
        return None
    path = pathlib.Path(cfg.cache)
    if not path.is_absolute():
        path = BASE_DIR / path
    return PartitionSumCache(path)


def _load_ifs(cfg: RunConfig) -> AffineIFS:
    if cfg.ifs is None:
        raise UsageError(f"{cfg.subcommand} requires --ifs")
    return parse_ifs_file(cfg.ifs)


def _cylinder(cfg: RunConfig, ifs: AffineIFS) -> CylinderFunction:
    return product_from_ifs(ifs) if cfg.kind == "product" else NaturalCylinderFunction(ifs)


def _equilibrium_driver(cfg: RunConfig, ifs: AffineIFS, cache: Optional[PartitionSumCache]) -> CylinderMeasure:
    """mu_n at the level-nmax root of the natural cylinder function."""
    cf = NaturalCylinderFunction(ifs)
    t_n = pressure_root(cf, cfg.nmax, cfg.tol, workers=cfg.workers, budget=cfg.budget, cache=cache)
    k = min(cfg.depth, cfg.nmax)
    return mu_cesaro(cf, t_n, cfg.nmax, k, tail=cfg.tail, workers=cfg.workers, budget=cfg.budget)


def _report(cfg: RunConfig, name: str, ifs: AffineIFS, values: Dict[str, Any]) -> pathlib.Path:
    return write_report(_out(cfg, name), cfg.subcommand, cfg.echo(), ifs.content_hash(), values)


# ===== Subcommands ============================================================
def cmd_dim(cfg: RunConfig) -> int:
    ifs = _load_ifs(cfg)
    rep = affinity_dimension(ifs, cfg.nmax, cfg.tol, workers=cfg.workers, budget=cfg.budget, cache=_open_cache(cfg))
    values: Dict[str, Any] = dict(rep.to_dict())
    for n, t_n in rep.roots:
        values[f"t_{n}"] = t_n
    values["warnings"] = "; ".join(rep.warnings)
    _report(cfg, "dimension.txt", ifs, values)
    write_csv(rep.to_frame(), _out(cfg, "roots.csv"))
    print(f"dimension = {format_value(rep.prediction)}")
    return EXIT_OK


def cmd_pressure(cfg: RunConfig) -> int:
    ifs = _load_ifs(cfg)
    cf = _cylinder(cfg, ifs)
    cache = _open_cache(cfg)
    frames: List[pd.DataFrame] = []
    values: Dict[str, Any] = {"kind": cf.kind, "grid_points": len(cfg.grid)}
    top: List[float] = []
    for i, t in enumerate(cfg.grid):
        rep = pressure_sequence(cf, t, cfg.nmax, workers=cfg.workers, budget=cfg.budget, cache=cache)
        frames.append(rep.to_frame())
        values.update(flatten(f"grid.{i}", rep.to_dict()))
        if rep.per_level:
            top.append(rep.values[-1])
    values["strictly_decreasing"] = all(b < a for a, b in zip(top, top[1:]))
    frame = pd.concat(frames, ignore_index=True)
    _report(cfg, "pressure.txt", ifs, values)
    write_csv(frame, _out(cfg, "pressure.csv"))
    if cfg.plot:
        from blocks.components.visual.pressure_plot import plot_pressure_curve

        plot_pressure_curve(frame, _out(cfg, "pressure_curve.png"), title=ifs.name)
    return EXIT_OK


def cmd_measure(cfg: RunConfig) -> int:
    ifs = _load_ifs(cfg)
    cf = _cylinder(cfg, ifs)
    cache = _open_cache(cfg)
    n, k = cfg.nmax, cfg.depth
    t = cfg.t if cfg.t is not None else pressure_root(cf, n, cfg.tol, workers=cfg.workers, budget=cfg.budget, cache=cache)
    m = mu_cesaro(cf, t, n, k, tail=cfg.tail, workers=cfg.workers, budget=cfg.budget)
    diag = equilibrium_diagnostics(
        cf, t, n, k, tail=cfg.tail, workers=cfg.workers, budget=cfg.budget, cache=cache, measure=m
    )
    values: Dict[str, Any] = {"kind": cf.kind, "t": t}
    values.update(flatten("diagnostics", diag.to_dict()))
    if cfg.samples > 0:
        loc = local_dimension_samples(cf, t, n, cfg.samples, cfg.seed, workers=cfg.workers, budget=cfg.budget)
        values.update({"local_dimension.count": cfg.samples, "local_dimension.mean": loc.mean, "local_dimension.std": loc.std})
    if cfg.iterations > 0:
        est = bernoulli_lower_estimate(cf, t, k, cfg.iterations, workers=cfg.workers, budget=cfg.budget)
        values.update(flatten("bernoulli", est.to_dict()))
    _report(cfg, "measure.txt", ifs, values)
    write_csv(measure_to_frame(m), _out(cfg, "measure.csv"))
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    ifs = _load_ifs(cfg)
    cf = _cylinder(cfg, ifs)
    rep = verify_axioms(cf, cfg.grid, cfg.nmax, cfg.samples, cfg.seed, workers=cfg.workers)
    values = rep.to_dict()
    values["violated"] = rep.violated()
    _report(cfg, "verify.txt", ifs, values)
    if rep.violated():
        logger.error("axiom violation: %s", rep.flags())
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_render(cfg: RunConfig) -> int:
    ifs = _load_ifs(cfg)
    driver = _equilibrium_driver(cfg, ifs, _open_cache(cfg)) if cfg.driver == "equilibrium" else None
    cloud = attractor_points(ifs, driver, cfg.count, cfg.burn_in, cfg.seed, workers=cfg.workers)
    pgm = render_pgm(cloud, cfg.resolution)
    write_bytes(pgm, _out(cfg, "attractor.pgm"))
    if cfg.points:
        write_csv(cloud.to_frame(), _out(cfg, "points.csv"))
    _report(cfg, "render.txt", ifs, {"points": len(cloud), "driver": cloud.driver, "pgm_sha1": _sha1_bytes(pgm)})
    return EXIT_OK


def cmd_boxdim(cfg: RunConfig) -> int:
    ifs = _load_ifs(cfg)
    if cfg.trials > 0:
        res = full_dimension_trials(
            ifs,
            trials=cfg.trials,
            radius=cfg.radius,
            seed=cfg.seed,
            count=cfg.count,
            burn_in=cfg.burn_in,
            n_max=cfg.nmax,
            depth=cfg.depth,
            t_tol=cfg.tol,
            levels=(cfg.levels[0], cfg.levels[1]),
            workers=cfg.workers,
            budget=cfg.budget,
        )
        values: Dict[str, Any] = {
            "target": res.target,
            "tolerance": res.tolerance,
            "required": res.required,
            "agreeing": res.agreeing,
            "passed": res.passed,
        }
        for o in res.outcomes:
            values[f"trial.{o.index}.estimate"] = o.estimate
            values[f"trial.{o.index}.ok"] = o.ok
        _report(cfg, "boxdim.txt", ifs, values)
        write_csv(res.to_frame(), _out(cfg, "trials.csv"))
        return EXIT_OK

    driver = _equilibrium_driver(cfg, ifs, _open_cache(cfg)) if cfg.driver == "equilibrium" else None
    cloud = attractor_points(ifs, driver, cfg.count, cfg.burn_in, cfg.seed, workers=cfg.workers)
    box = box_dimension(cloud, default_scales(cloud, (cfg.levels[0], cfg.levels[1])), workers=cfg.workers)
    values = {"points": len(cloud), "driver": cloud.driver}
    values.update(box.to_dict())
    _report(cfg, "boxdim.txt", ifs, values)
    write_csv(box.to_frame(), _out(cfg, "box_counts.csv"))
    return EXIT_OK


COMMANDS: Dict[str, Callable[[RunConfig], int]] = {
    "dim": cmd_dim,
    "pressure": cmd_pressure,
    "measure": cmd_measure,
    "verify": cmd_verify,
    "render": cmd_render,
    "boxdim": cmd_boxdim,
}


def run(config: RunConfig) -> int:
    """Dispatch one subcommand; 0 ok, 1 error, 2 axiom violation."""
    try:
        return COMMANDS[config.subcommand](config)
    except (ValueError, RuntimeError, OSError) as e:
        logger.error("%s failed: %s", config.subcommand, e)
        return EXIT_ERROR


# ===== CLI ====================================================================
def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--ifs", type=pathlib.Path, help="IFS document (JSON)")
    grid = common.add_mutually_exclusive_group()
    grid.add_argument("--t", type=float, help="single parameter t")
    grid.add_argument("--t-grid", dest="t_grid", help="A:B:STEP or comma list, ascending")
    common.add_argument("--nmax", type=int)
    common.add_argument("--depth", type=int)
    common.add_argument("--tol", type=float)
    common.add_argument("--seed", type=int)
    common.add_argument("--workers", type=int)
    common.add_argument("--out", type=pathlib.Path)
    common.add_argument("--budget", type=int)
    common.add_argument("--driver", choices=["uniform", "equilibrium"])
    common.add_argument("--kind", choices=["natural", "product"])
    common.add_argument("--tail", choices=["repeat", "drop"])
    common.add_argument("--count", type=int)
    common.add_argument("--burn-in", dest="burn_in", type=int)
    common.add_argument("--resolution", type=int)
    common.add_argument("--samples", type=int)
    common.add_argument("--iterations", type=int)
    common.add_argument("--trials", type=int)
    common.add_argument("--radius", type=float)
    common.add_argument("--cache", type=pathlib.Path)
    common.add_argument("--no-cache", dest="use_cache", action="store_const", const=False)
    common.add_argument("--plot", action="store_const", const=True)
    common.add_argument("--points", action="store_const", const=True, help="render: also write points.csv")
    common.add_argument("--log-level", dest="log_level", choices=["DEBUG", "INFO", "WARNING", "ERROR"])

    parser = argparse.ArgumentParser(
        prog="app.py",
        description="Subadditive pressure, affinity dimension and equilibrium approximants of affine IFS.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    helps = {
        "dim": "affinity dimension (roots t_n of P_n)",
        "pressure": "finite-level pressure on a t grid",
        "measure": "Cesaro equilibrium approximant and diagnostics",
        "verify": "sample the cylinder-function conditions",
        "render": "chaos-game attractor as PGM",
        "boxdim": "box-counting cross-check",
    }
    for name in SUBCOMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {k: v for k, v in vars(args).items() if k != "subcommand"}
    logging.basicConfig(level=overrides.get("log_level") or "WARNING", format=LOG_FORMAT, stream=sys.stderr)
    try:
        config = build_config(args.subcommand, overrides)
    except UsageError as e:
        logger.error("usage: %s", e)
        return EXIT_ERROR
    logging.getLogger().setLevel(config.log_level)
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
