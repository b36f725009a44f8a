"""Command-line front end.

Verbs: run, converge, bench, list-problems.  Exit codes: 0 success,
2 admissibility abort, 3 configuration error.  CRKFR_THREADS caps the
worker pool used by the array backend.
"""

import argparse
import os
import pathlib
import sys

from crkfr import bench, driver, fieldio, problems
from crkfr.config import ConfigError, parse_config


def _apply_thread_cap(cfg):
    cap = os.environ.get("CRKFR_THREADS", "").strip()
    threads = cfg.threads
    if cap:
        try:
            cap_n = int(cap)
        except ValueError:
            raise ConfigError(f"CRKFR_THREADS must be an integer, got {cap!r}")
        threads = min(threads, cap_n) if threads > 0 else cap_n
    if threads > 0:
        # the array backend parallelizes through BLAS threads; cap them
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, str(threads))
    return threads


def _write_run_outputs(report, out_dir):
    out = pathlib.Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(report.to_json() + "\n")
    fieldio.write_field(report.field, out / "field_final.txt")
    for snap in report.snapshots:
        fieldio.write_field(snap, out / f"field_t{snap.time:.6f}.txt")
    (out / "run.log").write_text("\n".join(report.log) + "\n")
    return out


def cmd_run(args):
    cfg = parse_config(args.config, args.override)
    _apply_thread_cap(cfg)
    report = driver.run(cfg)
    out = _write_run_outputs(report, args.output)
    if report.errors:
        l2 = ", ".join(f"{v:.6e}" for v in report.errors["l2"])
        print(f"errors (L2 per variable): {l2}")
    print(f"completed {report.steps} steps to t = {report.final_time:.6e}; outputs in {out}")
    return 0


def cmd_converge(args):
    cfg = parse_config(args.config, args.override)
    _apply_thread_cap(cfg)
    meshes = [int(m) for m in args.meshes.split(",") if m]
    if not meshes:
        raise ConfigError("--meshes must list at least one extent")
    degrees = [int(d) for d in args.degrees.split(",")] if args.degrees else [cfg.degree]
    rows = []
    for degree in degrees:
        rows.extend(driver.convergence_study(cfg.replace(degree=degree), meshes))
    text = driver.eoc_table_text(rows)
    out = pathlib.Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text)
    print(text, end="")
    print(f"wrote {out}")
    return 0


def cmd_bench(args):
    cfg = parse_config(args.config, args.override)
    _apply_thread_cap(cfg)
    if args.compare_backends:
        reports = bench.compare_backends(cfg, repetitions=args.repetitions)
        chunks = []
        for name, rep in reports.items():
            if rep is None:
                chunks.append(f"# backend {name}: unavailable\n")
            else:
                chunks.append(bench.bench_report_text(rep))
        text = "".join(chunks)
    else:
        report = bench.bench_step(cfg, repetitions=args.repetitions)
        text = bench.bench_report_text(report)
    out = pathlib.Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text)
    print(text, end="")
    return 0


def cmd_list_problems(args):
    for name in problems.names():
        prob = problems.get(name)
        print(f"{name:32s} {prob.dim}-D  {prob.description}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="crkfr", description=__doc__)
    sub = parser.add_subparsers(dest="verb", required=True)

    run_p = sub.add_parser("run", help="run one configuration")
    run_p.add_argument("config")
    run_p.add_argument("--override", action="append", default=[], metavar="key=value")
    run_p.add_argument("--output", "-o", default="out")
    run_p.set_defaults(fn=cmd_run)

    conv_p = sub.add_parser("converge", help="refinement study on one configuration")
    conv_p.add_argument("config")
    conv_p.add_argument("--meshes", required=True, help="comma-separated element counts")
    conv_p.add_argument("--degrees", default="", help="optional comma-separated degrees")
    conv_p.add_argument("--override", action="append", default=[], metavar="key=value")
    conv_p.add_argument("--output", "-o", default="eoc.csv")
    conv_p.set_defaults(fn=cmd_converge)

    bench_p = sub.add_parser("bench", help="per-phase step timings and trace counters")
    bench_p.add_argument("config")
    bench_p.add_argument("--repetitions", type=int, default=20)
    bench_p.add_argument("--compare-backends", action="store_true")
    bench_p.add_argument("--override", action="append", default=[], metavar="key=value")
    bench_p.add_argument("--output", "-o", default="bench.csv")
    bench_p.set_defaults(fn=cmd_bench)

    list_p = sub.add_parser("list-problems", help="list the built-in problems")
    list_p.set_defaults(fn=cmd_list_problems)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 3
    except driver.AdmissibilityError as exc:
        print(f"admissibility abort: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
