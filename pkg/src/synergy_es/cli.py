"""Command-line surface: run, sweep, batch, identify, compare."""

import argparse
import os
import sys

import numpy as np

from .config import read_config
from .harness import (ExperimentConfig, compare_traces, read_trace_csv,
                      run_batch, run_episode, run_sweep, write_trace_csv)
from .personalizer import PersonalizerConfig
from .sysid import (identify_from_records, read_iteration_csv,
                    write_fitted_subject, write_identification_report)


def _parse_seeds(text):
    return tuple(int(s) for s in text.replace(",", " ").split())


def _experiment_config(args):
    kwargs = {}
    if getattr(args, "config", None):
        cp = read_config(args.config)
        if cp.has_section("experiment"):
            sec = cp["experiment"]
            if "subject" in sec:
                kwargs["subject"] = sec["subject"]
            if "algorithm" in sec:
                kwargs["algorithm"] = sec["algorithm"]
            if "iterations" in sec:
                kwargs["iterations"] = int(sec["iterations"])
            if "seeds" in sec:
                kwargs["seeds"] = _parse_seeds(sec["seeds"])
            if "noise_std" in sec:
                kwargs["noise_std"] = float(sec["noise_std"])
            if "fixed_theta" in sec:
                kwargs["fixed_theta"] = float(sec["fixed_theta"])
        if cp.has_section("personalizer"):
            from .config import parse_vector
            sec = cp["personalizer"]
            defaults = PersonalizerConfig()
            pc = PersonalizerConfig(
                omega_o=float(sec.get("omega_o", np.pi / 4)),
                dither_amplitude=float(sec.get("a", 0.02)),
                gain=float(sec.get("k", 0.05)),
                epsilon=float(sec.get("epsilon", 0.1)),
                filter_gain=float(sec.get("H", 0.5)),
                filter_q=float(sec.get("Q", 5.0)),
                observer_gain=(tuple(parse_vector(sec["L"])) if "L" in sec
                               else defaults.observer_gain),
                theta_0=float(sec.get("theta_0", 1.0)),
                bounds=(tuple(parse_vector(sec["bounds"])) if "bounds" in sec
                        else defaults.bounds),
                warmup_iterations=int(sec.get("warmup_iterations", 8)),
            )
            kwargs["personalizer"] = pc
    if getattr(args, "subject", None):
        kwargs["subject"] = args.subject
    if getattr(args, "algorithm", None):
        kwargs["algorithm"] = args.algorithm
    if getattr(args, "seed", None):
        kwargs["seeds"] = _parse_seeds(args.seed)
    if getattr(args, "iterations", None):
        kwargs["iterations"] = args.iterations
    if getattr(args, "out", None):
        kwargs["output_dir"] = args.out
    return ExperimentConfig(**kwargs)


def _cmd_run(args):
    cfg = _experiment_config(args)
    trace = run_episode(cfg)
    os.makedirs(cfg.output_dir, exist_ok=True)
    path = os.path.join(
        cfg.output_dir,
        f"trace_{cfg.algorithm}_{trace.metadata['subject_id']}"
        f"_s{trace.metadata['seed']}.csv")
    write_trace_csv(trace, path)
    print(f"wrote {path} ({len(trace.rows)} iterations)")
    return 0


def _cmd_sweep(args):
    cfg = _experiment_config(args)
    trace = run_sweep(cfg)
    os.makedirs(cfg.output_dir, exist_ok=True)
    path = os.path.join(cfg.output_dir,
                        f"sweep_{trace.metadata['subject_id']}"
                        f"_s{trace.metadata['seed']}.csv")
    write_trace_csv(trace, path)
    print(f"wrote {path} ({len(trace.rows)} iterations)")
    return 0


def _cmd_batch(args):
    cfg = _experiment_config(args)
    summary, traces = run_batch(cfg)
    print(f"episodes: {summary.get('episodes', 0)}")
    print(f"converged: {summary.get('converged', 0)}")
    print(f"median convergence iteration: "
          f"{summary.get('median_convergence_iteration')}")
    print(f"median final theta: {summary.get('median_final_theta')}")
    if summary.get("aborted"):
        print(f"batch aborted with failures: {summary['failures']}",
              file=sys.stderr)
        return 1
    return 0


def _cmd_identify(args):
    _, thetas, perfs = read_iteration_csv(args.input)
    pref, dyn, mse, resid, report = identify_from_records(
        thetas, perfs, order=args.order)
    os.makedirs(args.out, exist_ok=True)
    rpath = os.path.join(args.out, "identification_report.txt")
    spath = os.path.join(args.out, "identified_subject.ini")
    write_identification_report(rpath, pref, dyn, mse, report)
    write_fitted_subject(spath, pref, dyn, report)
    print(f"wrote {rpath}")
    print(f"wrote {spath}")
    print(f"one-step mse: {mse:.6g}")
    return 0


def _cmd_compare(args):
    ta = [read_trace_csv(p) for p in args.a]
    tb = [read_trace_csv(p) for p in args.b]
    report = compare_traces(ta, tb, args.theta_star, tol=args.tol)
    for key, val in report.items():
        print(f"{key}: {val}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="synergy-es",
        description="grey-box extremum-seeking personalization experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="experiment config file (INI)")
        p.add_argument("--seed", help="seed or whitespace/comma-separated list")
        p.add_argument("--out", help="output directory", default=".")
        p.add_argument("--algorithm",
                       choices=["greybox", "blackbox", "sweep", "fixed"])
        p.add_argument("--subject", help="subject id (A|B) or config path")
        p.add_argument("--iterations", type=int)

    p_run = sub.add_parser("run", help="run a single episode")
    common(p_run)
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="linear synergy sweep (0.8 + i/125)")
    common(p_sweep)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_batch = sub.add_parser("batch", help="Monte Carlo batch with summary")
    common(p_batch)
    p_batch.set_defaults(func=_cmd_batch)

    p_id = sub.add_parser("identify", help="grey-box identification from CSV")
    p_id.add_argument("input", help="CSV with iteration,theta,performance")
    p_id.add_argument("--order", type=int, default=2, choices=[2, 3])
    p_id.add_argument("--out", default=".")
    p_id.set_defaults(func=_cmd_identify)

    p_cmp = sub.add_parser("compare", help="differential report on two trace sets")
    p_cmp.add_argument("--a", nargs="+", required=True, help="trace CSVs, set A")
    p_cmp.add_argument("--b", nargs="+", required=True, help="trace CSVs, set B")
    p_cmp.add_argument("--theta-star", type=float, required=True,
                       dest="theta_star")
    p_cmp.add_argument("--tol", type=float, default=0.1)
    p_cmp.set_defaults(func=_cmd_compare)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
