#!/usr/bin/env python3
"""Boundary-layer R-curve families over sigma_hat/sigma_Y and ell_p/R0 (overnight)."""
from __future__ import annotations

import argparse
import itertools
import sys
from pathlib import Path

from gradfrac.core.errors import GradFracError
from gradfrac.core.logs import setup_logging
from gradfrac.io.runconfig import parse_config
from gradfrac.app.runtime import output_directory, run_config

PROJECT_ROOT = Path(__file__).resolve().parent.parent
STRENGTH_RATIOS = (0.5, 2.0, 3.0, 4.0)
LENGTH_RATIOS = (12.5, 25.0, 75.0, 125.0)


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--config", type=Path, default=PROJECT_ROOT / "configs/rcurve_family.toml")
    parser.add_argument("--strength", type=_floats, default=list(STRENGTH_RATIOS), help="sigma_hat/sigma_Y values")
    parser.add_argument("--lengths", type=_floats, default=list(LENGTH_RATIOS), help="ell_p/R0 values")
    parser.add_argument("--output", type=Path, default=None)
    parser.add_argument("--log-level", default="INFO")
    args = parser.parse_args()

    setup_logging(args.log_level)
    failed = []
    for ratio, length in itertools.product(args.strength, args.lengths):
        overrides = [f"fracture.strength_ratio={ratio}", f"material.ell_p_over_R0={length}"]
        try:
            config = parse_config(args.config, overrides)
            out_dir = output_directory(config, args.output) / f"strength={ratio:g}" / f"ell_p_over_R0={length:g}"
            code = run_config(config, out_dir, args.log_level)
        except GradFracError as exc:
            print(f"[rcurve] strength={ratio:g} ell_p/R0={length:g} failed: {exc}", file=sys.stderr)
            code = 1
        if code:
            failed.append((ratio, length))
    for ratio, length in failed:
        print(f"[rcurve] incomplete: strength={ratio:g} ell_p/R0={length:g}")
    return 1 if failed else 0


if __name__ == "__main__":
    raise SystemExit(main())
