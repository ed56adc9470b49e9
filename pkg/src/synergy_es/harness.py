"""Experiment orchestration: episodes, sweeps, Monte Carlo batches, traces.

Traces are UTF-8 CSV with a header row; run metadata travels in leading
'# key: value' comment lines so a trace file round-trips losslessly.
"""

import csv
import hashlib
import io
import json
import os
from dataclasses import dataclass, field

import numpy as np

from .baseline import BlackBoxEs, BlackBoxEsConfig
from .personalizer import Personalizer, PersonalizerConfig
from .subject import SimulatedSubject, load_subject, subject_a, subject_b
from .svgplot import line_plot

TRACE_COLUMNS = ["iteration", "theta_applied", "theta_hat", "J",
                 "filtered_output", "grad_est", "curv_est", "branch"]

SWEEP_START = 0.8
SWEEP_SLOPE = 1.0 / 125.0
SWEEP_ITERATIONS = 201  # theta reaches 2.4 at i = 200

CONVERGENCE_TOL = 0.1
CONVERGENCE_HOLD = 25


@dataclass
class EpisodeTrace:
    rows: list  # list of dicts keyed by TRACE_COLUMNS
    metadata: dict  # config_hash, seed, subject_id, algorithm

    def __post_init__(self):
        for i, row in enumerate(self.rows):
            if int(row["iteration"]) != i:
                raise ValueError("trace iterations must be contiguous from 0")

    def column(self, name):
        if name == "branch":
            return [r[name] for r in self.rows]
        return np.array([float(r[name]) for r in self.rows])

    def __eq__(self, other):
        if not isinstance(other, EpisodeTrace):
            return NotImplemented
        if self.metadata != other.metadata or len(self.rows) != len(other.rows):
            return False
        for a, b in zip(self.rows, other.rows):
            if set(a) != set(b):
                return False
            for key in a:
                va, vb = a[key], b[key]
                if isinstance(va, float) and isinstance(vb, float):
                    if not (va == vb or (np.isnan(va) and np.isnan(vb))):
                        return False
                elif va != vb:
                    return False
        return True


@dataclass
class ExperimentConfig:
    subject: str = "A"  # "A", "B", or a subject-config path
    algorithm: str = "greybox"  # greybox | blackbox | sweep | fixed
    iterations: int = 150
    seeds: tuple = (0,)
    output_dir: str = "."
    noise_std: float = None  # None keeps the subject's own noise level
    fixed_theta: float = 1.0
    personalizer: PersonalizerConfig = field(default_factory=PersonalizerConfig)
    baseline: BlackBoxEsConfig = field(default_factory=BlackBoxEsConfig)

    def __post_init__(self):
        if self.algorithm not in ("greybox", "blackbox", "sweep", "fixed"):
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.algorithm in ("greybox", "blackbox") and \
                self.iterations < self.personalizer.warmup_iterations:
            raise ValueError("iteration count must cover the warmup period")
        if self.iterations < 1:
            raise ValueError("iteration count must be >= 1")
        if not self.seeds:
            raise ValueError("need at least one seed")

    def config_hash(self):
        blob = json.dumps({
            "subject": self.subject,
            "algorithm": self.algorithm,
            "iterations": self.iterations,
            "noise_std": self.noise_std,
            "fixed_theta": self.fixed_theta,
            "personalizer": self.personalizer.as_dict(),
            "baseline": vars(self.baseline),
        }, sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def make_subject(subject, seed, noise_std=None):
    if isinstance(subject, SimulatedSubject):
        subject.reset(seed)
        return subject
    if subject == "A":
        subj = subject_a(seed)
    elif subject == "B":
        subj = subject_b(seed)
    else:
        subj = load_subject(subject)
        subj.reset(seed)
    if noise_std is not None:
        subj.noise.std = noise_std
        subj.reset(seed)
    return subj


def _records_to_rows(records):
    rows = []
    for r in records:
        rows.append({
            "iteration": r.iteration,
            "theta_applied": r.theta_applied,
            "theta_hat": r.theta_hat,
            "J": r.performance,
            "filtered_output": r.filtered_output,
            "grad_est": r.grad_est,
            "curv_est": r.curv_est,
            "branch": r.branch,
        })
    return rows


def run_episode(config, seed=None):
    """One closed-loop episode; returns its trace (deterministic per seed)."""
    seed = config.seeds[0] if seed is None else seed
    subject = make_subject(config.subject, seed, config.noise_std)
    algo = config.algorithm
    if algo == "sweep":
        return _sweep_trace(config, subject, seed)
    rows = []
    if algo == "greybox":
        loop = Personalizer(config.personalizer)
        theta = loop.applied_theta()
    elif algo == "blackbox":
        loop = BlackBoxEs(config.baseline)
        theta = loop.applied_theta()
    else:  # fixed
        loop = None
        theta = config.fixed_theta
    for i in range(config.iterations):
        j = subject.step(theta)
        if loop is None:
            rows.append({"iteration": i, "theta_applied": theta,
                         "theta_hat": theta, "J": j, "filtered_output": 0.0,
                         "grad_est": 0.0, "curv_est": 0.0, "branch": ""})
        else:
            theta = loop.step(j)
    if loop is not None:
        rows = _records_to_rows(loop.records)
    meta = {"config_hash": config.config_hash(), "seed": seed,
            "subject_id": subject.subject_id, "algorithm": algo}
    return EpisodeTrace(rows, meta)


def _sweep_trace(config, subject, seed):
    rows = []
    for i in range(SWEEP_ITERATIONS):
        theta = SWEEP_START + SWEEP_SLOPE * i
        j = subject.step(theta)
        rows.append({"iteration": i, "theta_applied": theta, "theta_hat": theta,
                     "J": j, "filtered_output": 0.0, "grad_est": 0.0,
                     "curv_est": 0.0, "branch": ""})
    meta = {"config_hash": config.config_hash(), "seed": seed,
            "subject_id": subject.subject_id, "algorithm": "sweep"}
    return EpisodeTrace(rows, meta)


def run_sweep(config, seed=None):
    """Linear synergy sweep theta_i = 0.8 + i/125 over i = 0..200."""
    seed = config.seeds[0] if seed is None else seed
    subject = make_subject(config.subject, seed, config.noise_std)
    return _sweep_trace(config, subject, seed)


def convergence_iteration(theta_hats, theta_star, tol=CONVERGENCE_TOL,
                          hold=CONVERGENCE_HOLD):
    """First iteration i from which |theta_hat - theta*| < tol holds for
    `hold` consecutive iterations; None when never reached."""
    ok = np.abs(np.asarray(theta_hats) - theta_star) < tol
    for i in range(len(ok) - hold + 1):
        if ok[i:i + hold].all():
            return i
    return None


def write_trace_csv(trace, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        for key in ("config_hash", "seed", "subject_id", "algorithm"):
            fh.write(f"# {key}: {trace.metadata[key]}\n")
        writer = csv.DictWriter(fh, fieldnames=TRACE_COLUMNS)
        writer.writeheader()
        for row in trace.rows:
            out = dict(row)
            out["iteration"] = int(row["iteration"])
            for k in ("theta_applied", "theta_hat", "J", "filtered_output",
                      "grad_est", "curv_est"):
                v = float(row[k])
                out[k] = repr(v) if np.isfinite(v) else ""  # empty for n/a
            writer.writerow(out)


def read_trace_csv(path):
    metadata = {}
    body = io.StringIO()
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("#"):
                key, _, val = line[1:].partition(":")
                metadata[key.strip()] = val.strip()
            else:
                body.write(line)
    body.seek(0)
    rows = []
    for row in csv.DictReader(body):
        parsed = {"iteration": int(row["iteration"]), "branch": row["branch"]}
        for k in ("theta_applied", "theta_hat", "J", "filtered_output",
                  "grad_est", "curv_est"):
            parsed[k] = float(row[k]) if row[k] != "" else float("nan")
        rows.append(parsed)
    if "seed" in metadata:
        metadata["seed"] = int(metadata["seed"])
    return EpisodeTrace(rows, metadata)


def summarize_batch(traces, theta_star):
    """Pure aggregation of per-seed traces into batch statistics."""
    convs, finals = [], []
    for tr in traces:
        hats = tr.column("theta_hat")
        conv = convergence_iteration(hats, theta_star)
        convs.append(conv)
        finals.append(float(np.median(hats[-CONVERGENCE_HOLD:])))
    reached = [c for c in convs if c is not None]
    # non-converged seeds rank above every converged one for the median
    ranked = [np.inf if c is None else c for c in convs]
    med = float(np.median(ranked)) if ranked else None
    summary = {
        "episodes": len(traces),
        "converged": len(reached),
        "median_convergence_iteration": None if med is None or np.isinf(med) else med,
        "iqr_convergence":
            (float(np.percentile(reached, 75) - np.percentile(reached, 25))
             if len(reached) >= 2 else None),
        "median_final_theta": float(np.median(finals)),
        "per_seed_convergence": convs,
        "per_seed_final_theta": finals,
    }
    return summary


def run_batch(config, theta_star=None):
    """Per-seed episodes + aggregation + summary CSV + SVG plots."""
    os.makedirs(config.output_dir, exist_ok=True)
    traces = []
    failures = []
    for seed in config.seeds:
        try:
            tr = run_episode(config, seed)
        except Exception as exc:  # partial results flagged, batch aborted
            failures.append((seed, str(exc)))
            break
        traces.append(tr)
        write_trace_csv(tr, os.path.join(
            config.output_dir,
            f"trace_{config.algorithm}_{tr.metadata['subject_id']}_s{seed}.csv"))
    if theta_star is None:
        probe = make_subject(config.subject, config.seeds[0], config.noise_std)
        theta_star = probe.optimum()
    summary = summarize_batch(traces, theta_star) if traces else {}
    summary["theta_star"] = theta_star
    summary["aborted"] = bool(failures)
    if failures:
        summary["failures"] = failures

    spath = os.path.join(config.output_dir, f"summary_{config.algorithm}.csv")
    with open(spath, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["seed", "convergence_iteration", "final_theta_median"])
        for seed, conv, fin in zip(config.seeds,
                                   summary.get("per_seed_convergence", []),
                                   summary.get("per_seed_final_theta", [])):
            writer.writerow([seed, "" if conv is None else conv, repr(fin)])

    if traces:
        iters = traces[0].column("iteration")
        line_plot(os.path.join(config.output_dir,
                               f"theta_{config.algorithm}.svg"),
                  [(f"seed {t.metadata['seed']}", iters, t.column("theta_hat"))
                   for t in traces[:10]],
                  title="synergy estimate across iterations",
                  xlabel="iteration", ylabel="theta_hat")
        line_plot(os.path.join(config.output_dir,
                               f"performance_{config.algorithm}.svg"),
                  [(f"seed {t.metadata['seed']}", iters, t.column("J"))
                   for t in traces[:10]],
                  title="performance across iterations",
                  xlabel="iteration", ylabel="J")
    return summary, traces


def compare_traces(traces_a, traces_b, theta_star, tol=CONVERGENCE_TOL):
    """Differential success report: final theta within tolerance at the end."""
    def successes(traces):
        wins = 0
        for tr in traces:
            hats = tr.column("theta_hat")
            if abs(hats[-1] - theta_star) < tol:
                wins += 1
        return wins

    sa, sb = successes(traces_a), successes(traces_b)
    return {
        "set_a_success": sa, "set_a_total": len(traces_a),
        "set_b_success": sb, "set_b_total": len(traces_b),
        "a_minus_b": sa - sb,
    }
