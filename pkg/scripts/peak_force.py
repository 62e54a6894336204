#!/usr/bin/env python3
"""Peak force and the opening at which it occurs, one line per curve file."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from gradfrac.io.curves import read_curves


def peak(path: Path) -> tuple[float, float]:
    columns = read_curves(path)
    if "force" not in columns:
        raise ValueError(f"{path}: no force column (boundary-layer curve?)")
    k = int(np.argmax(columns["force"]))
    return float(columns["force"][k]), float(columns["u"][k])


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("curves", nargs="+", type=Path, help="curves.csv files (directories are searched)")
    args = parser.parse_args()

    paths: list[Path] = []
    for p in args.curves:
        paths.extend(sorted(p.rglob("curves.csv")) if p.is_dir() else [p])
    if not paths:
        print("[peak] no curve files found", file=sys.stderr)
        return 1
    print("file,peak_force_kN,u_at_peak_mm")
    for path in paths:
        try:
            force, u = peak(path)
        except (OSError, ValueError) as exc:
            print(f"[peak] {exc}", file=sys.stderr)
            continue
        print(f"{path},{force:.6g},{u:.6g}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
