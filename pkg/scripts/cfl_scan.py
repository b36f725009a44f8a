#!/usr/bin/env python3
"""Regenerate the committed linear-stability CFL table.

For every point kind, dissipation model and degree, the one-step update of
the scheme for unit-speed linear advection on a uniform periodic mesh is a
block-circulant operator with only nearest-neighbour coupling.  The script
extracts the three blocks by applying one step to unit impulses, forms the
amplification matrix over a grid of 512 wavenumbers, and bisects for the
largest Courant number whose spectral radius stays below 1 + 1e-12.  Results
are floored to 4 decimals and written to src/crkfr/data/cfl_table.json.

Usage: python3 scripts/cfl_scan.py [--degrees 0..7] [--check]
"""

import argparse
import json
import math
import pathlib
import sys

import numpy as np

from crkfr import driver, solver1d
from crkfr.config import RunConfig

N_WAVENUMBERS = 512
TOLERANCE = 1e-12
N_ELEMENTS = 7
CENTER = 3


def one_step_blocks(degree, kind, model, nu):
    """Nearest-neighbour blocks of the one-step operator at Courant number nu."""
    cfg = RunConfig(
        problem="linadv_sine",
        degree=degree,
        mesh=(N_ELEMENTS,),
        points=kind,
        dissipation=model,
        cfl=1.0,
        scaling_limiter=False,
    )
    _, ws, fld, _ = driver.setup(cfg)
    dt = nu * ws.dx[0]

    n = degree + 1
    blocks = {off: np.zeros((n, n)) for off in (-1, 0, 1)}
    for p in range(n):
        u = np.zeros_like(fld.values)
        u[CENTER, p, 0] = 1.0
        out = solver1d.step_1d(u, 0.0, dt, ws, cfg)
        for off in (-1, 0, 1):
            blocks[off][:, p] = out[CENTER + off, :, 0]
        out[CENTER - 1 : CENTER + 2] = 0.0
        if np.max(np.abs(out)) > 1e-13:
            raise RuntimeError("one-step stencil is wider than nearest neighbours")
    return blocks


def max_amplification(blocks, n_wavenumbers=N_WAVENUMBERS):
    ks = 2.0 * np.pi * np.arange(n_wavenumbers) / n_wavenumbers
    worst = 0.0
    for k in ks:
        h = blocks[0] + blocks[-1] * np.exp(-1j * k) + blocks[1] * np.exp(1j * k)
        worst = max(worst, np.abs(np.linalg.eigvals(h)).max())
    return worst


def scan_one(degree, kind, model):
    def stable(nu):
        return max_amplification(one_step_blocks(degree, kind, model, nu)) <= 1.0 + TOLERANCE

    lo, hi = 1e-4, 2.0
    if not stable(lo):
        return 0.0
    while stable(hi):
        hi *= 2.0
    for _ in range(40):
        if hi - lo < 1e-5:
            break
        mid = 0.5 * (lo + hi)
        if stable(mid):
            lo = mid
        else:
            hi = mid
    return math.floor(lo * 1e4) / 1e4


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--degrees", default="0-7", help="degree range, e.g. 0-7 or 2")
    parser.add_argument("--check", action="store_true",
                        help="compare against the committed table instead of writing")
    args = parser.parse_args(argv)

    if "-" in args.degrees:
        lo, hi = args.degrees.split("-")
        degrees = range(int(lo), int(hi) + 1)
    else:
        degrees = [int(args.degrees)]

    table = {}
    for kind in ("gl", "gll"):
        table[kind] = {}
        for model in ("d1", "d2", "dcsx"):
            values = []
            for degree in range(8):
                if degree not in degrees or (kind == "gll" and degree == 0):
                    values.append(None)
                    continue
                value = scan_one(degree, kind, model)
                values.append(value)
                print(f"{kind} {model} N={degree}: CFL = {value}", flush=True)
            table[kind][model] = values

    out_path = pathlib.Path(__file__).resolve().parents[1] / "src" / "crkfr" / "data" / "cfl_table.json"
    if args.check:
        committed = json.loads(out_path.read_text())
        bad = []
        for kind in table:
            for model in table[kind]:
                for degree, value in enumerate(table[kind][model]):
                    if value is None:
                        continue
                    ref = committed[kind][model][degree]
                    if ref is None or abs(ref - value) > 2e-4:
                        bad.append((kind, model, degree, ref, value))
        if bad:
            print("MISMATCH:", bad)
            return 1
        print("committed table matches the scan")
        return 0

    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(json.dumps(table, indent=2) + "\n")
    print(f"wrote {out_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
