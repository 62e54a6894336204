"""`gradfrac` command line: run, check and sweep."""

from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from gradfrac import __version__
from gradfrac.cases.reference import reference_quantities
from gradfrac.cases.runner import LoadPath
from gradfrac.core.config import apply_thread_cap, settings
from gradfrac.core.errors import GradFracError, IncrementAbortError
from gradfrac.core.logs import setup_logging
from gradfrac.fem.meshfile import write_mesh
from gradfrac.io.curves import Normalization, write_curves
from gradfrac.io.fields import gather_fields, write_fields
from gradfrac.io.runconfig import RunConfig, log_header, parse_config

logger = logging.getLogger("gradfrac.runtime")

CURVES_FILE = "curves.csv"
MESH_FILE = "mesh.txt"


def output_directory(config: RunConfig, base: Path | None = None) -> Path:
    directory = config.output.directory
    if directory.is_absolute():
        return directory
    return Path(base if base is not None else settings.output_dir) / directory


def run_config(config: RunConfig, out_dir: Path, log_level: str) -> int:
    setup_logging(log_level, out_dir / "run.log")
    threads = apply_thread_cap(1 if config.deterministic else settings.threads)
    logger.info("gradfrac=%s python=%s threads=%d output=%s", __version__, sys.version.split()[0], threads, out_dir)
    for line in log_header(config):
        logger.info(line)

    spec = config.case
    ref = reference_quantities(spec.material, spec.fracture)
    norm = Normalization(K0=ref.K0, R0=ref.R0, thickness=spec.thickness)
    snapshot_dir = out_dir / "fields"

    path: LoadPath | None = None

    def snapshot(step: int, state) -> None:
        if step % config.output.snapshot_interval:
            return
        nodal, gauss = gather_fields(path.model, state, config.output.fields)
        write_fields(snapshot_dir, path.model.mesh, step, nodal, gauss)

    path = LoadPath(spec, on_snapshot=snapshot if config.output.snapshots else None)
    mesh = path.model.mesh
    try:
        write_mesh(out_dir / MESH_FILE, mesh)
    except OSError as exc:
        logger.warning("mesh file not written: %s", exc)
    logger.info("mesh nodes=%d elements=%d", mesh.n_nodes, mesh.n_elements)
    dump_dir = out_dir if config.output.dump_on_abort else None
    try:
        path.run(dump_dir)
    except IncrementAbortError as exc:
        logger.error("%s", exc)
        if path.results:
            curves = write_curves(out_dir / CURVES_FILE, spec.kind, path.results, norm)
            logger.info("partial curves=%s steps=%d", curves, len(path.results))
        return 1
    curves = write_curves(out_dir / CURVES_FILE, spec.kind, path.results, norm)
    logger.info("done steps=%d curves=%s", len(path.results), curves)
    return 0


def _cmd_run(args) -> int:
    config = parse_config(args.config, args.set)
    return run_config(config, output_directory(config, args.output), args.log_level)


def _cmd_check(args) -> int:
    config = parse_config(args.config, args.set)
    for line in log_header(config):
        logger.info(line)
    ref = reference_quantities(config.case.material, config.case.fracture)
    print(f"K0={ref.K0:.6g} MPa*sqrt(mm)")
    print(f"R0={ref.R0:.6g} mm")
    print(f"sigma_hat={ref.sigma_hat:.6g} MPa")
    print(f"sigma_hat/sigma_Y={ref.sigma_hat_ratio:.4g}")
    print(f"R0/ell_f={ref.R0_over_ell_f:.4g}")
    return 0


def sweep_value_text(value: str) -> str:
    return value.strip().replace("/", "_")


def _sweep_one(config_path: Path, overrides: list[str], out_dir: Path, log_level: str) -> int:
    try:
        config = parse_config(config_path, overrides)
        return run_config(config, out_dir, log_level)
    except GradFracError as exc:
        logging.getLogger("gradfrac.runtime").error("%s", exc)
        return 1


def _cmd_sweep(args) -> int:
    values = [v for v in args.values.split(",") if v.strip()]
    if not values:
        raise GradFracError("--values needs at least one value")
    base = parse_config(args.config, args.set)
    root = output_directory(base, args.output)
    jobs = []
    for value in values:
        overrides = list(args.set) + [f"{args.param}={value.strip()}"]
        parse_config(args.config, overrides)
        jobs.append((args.config, overrides, root / f"{args.param}={sweep_value_text(value)}", args.log_level))

    logger.info("sweep param=%s values=%s jobs=%d", args.param, ",".join(v.strip() for v in values), args.jobs)
    if args.jobs <= 1:
        codes = [_sweep_one(*job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            codes = list(pool.map(_sweep_one, *zip(*jobs)))
    setup_logging(args.log_level)
    for job, code in zip(jobs, codes):
        logger.info("sweep result dir=%s exit=%d", job[2], code)
    return 0 if all(code == 0 for code in codes) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gradfrac", description="Phase-field fracture with strain gradient plasticity.")
    parser.add_argument("--log-level", default=settings.log_level, help="logging level (default from GRADFRAC_LOG_LEVEL)")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("config", type=Path, help="TOML run configuration")
        p.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE", help="override a config value")

    run = sub.add_parser(
        "run",
        help="solve a case and write curves and snapshots (step 0 included)",
        description="Solve a case. Snapshots include step 0 (the initial, seeded state), "
        "so n increments write n + 1 field files at snapshot_interval = 1.",
    )
    common(run)
    run.add_argument("--output", type=Path, default=None, help="base directory for relative output directories")
    run.set_defaults(handler=_cmd_run)

    check = sub.add_parser("check", help="validate a config and print derived quantities")
    common(check)
    check.set_defaults(handler=_cmd_check)

    sweep = sub.add_parser("sweep", help="run a case once per value of one parameter")
    common(sweep)
    sweep.add_argument("--param", required=True, help="dotted key, e.g. material.ell_p")
    sweep.add_argument("--values", required=True, help="comma-separated values")
    sweep.add_argument("--jobs", type=int, default=1, help="independent processes (default 1, serial)")
    sweep.add_argument("--output", type=Path, default=None)
    sweep.set_defaults(handler=_cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    setup_logging(args.log_level)
    try:
        return args.handler(args)
    except GradFracError as exc:
        logging.getLogger("gradfrac.error").error("%s", exc)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
