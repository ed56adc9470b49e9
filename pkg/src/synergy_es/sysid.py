"""Grey-box identification: quadratic map fit, constrained LTI fit, whiteness.

The LTI fitter searches real pole sets inside (0, 1) on a refinable grid
(over-damped by construction) with an inner linear least-squares solve for
the numerator, then normalizes to unity steady-state gain. Residuals are
always evaluated from sample index 3 onward so that order-2 and order-3
fits are scored on the same samples.
"""

import csv
import warnings
from dataclasses import dataclass
from itertools import product

import numpy as np
from scipy.stats import norm

from .config import format_matrix, format_vector, write_config
from .subject import AdaptationDynamics, PreferenceMap

_RESIDUAL_START = 1  # predictions start at sample 1 with zero-padded history


class ConstrainedFitWarning(UserWarning):
    """The pole-constrained fit is much worse than the unconstrained one."""


@dataclass
class SteadyStateSample:
    """Per-synergy steady-state performance statistics."""

    theta: float
    mean_performance: float
    std_performance: float = 0.0
    count: int = 1

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("count must be >= 1")
        if self.std_performance < 0:
            raise ValueError("std must be >= 0")


@dataclass
class WhitenessReport:
    max_normalized_autocorr: float
    threshold: float
    passed: bool
    lags_tested: int
    residual_mean: float
    residual_std: float


def fit_preference_map(samples):
    """Ordinary least squares on the basis [theta^2, theta, 1].

    Warns (but still returns the fit) when the fitted map is not concave.
    """
    thetas = np.array([s.theta for s in samples], dtype=float)
    y = np.array([s.mean_performance for s in samples], dtype=float)
    if np.unique(thetas).size < 3:
        raise ValueError("need at least 3 distinct synergy values for a quadratic fit")
    design = np.column_stack([thetas ** 2, thetas, np.ones_like(thetas)])
    lam, *_ = np.linalg.lstsq(design, y, rcond=None)
    if lam[0] >= 0:
        warnings.warn("fitted map is not concave (lam[0] >= 0)", ConstrainedFitWarning)
    return PreferenceMap(lam)


def _poles_to_denominator(poles):
    # monic z-polynomial with the given roots; coefficients [1, a1, ..., an]
    coeffs = np.array([1.0])
    for p in poles:
        coeffs = np.convolve(coeffs, [1.0, -p])
    return coeffs


def _lagged(series, lag):
    """Series delayed by `lag` samples with zero padding before the start."""
    out = np.zeros_like(series, dtype=float)
    if lag < len(series):
        out[lag:] = series[:len(series) - lag]
    return out


def _arx_residuals(u, y, den):
    """One-step-ahead predictor with fixed AR part; LLS over the B part.

    yhat_i = -sum a_k y_{i-k} + sum b_k u_{i-k}, with zero initial history
    (exact for data generated from rest). Rows run from sample 1 for every
    order, so MSEs of different orders are comparable.
    """
    n = len(den) - 1
    rows = np.arange(_RESIDUAL_START, len(y))
    target = y[rows].astype(float).copy()
    for kk in range(1, n + 1):
        target += den[kk] * _lagged(y, kk)[rows]
    regress = np.column_stack([_lagged(u, kk)[rows] for kk in range(1, n + 1)])
    b, *_ = np.linalg.lstsq(regress, target, rcond=None)
    resid = target - regress @ b
    return b, float(np.mean(resid ** 2))


def _companion_realization(b, den):
    """Controller-canonical state space for b(z)/den(z), strictly proper."""
    n = len(den) - 1
    phi = np.zeros((n, n))
    phi[0, :] = -den[1:]
    if n > 1:
        phi[1:, :-1] = np.eye(n - 1)
    gamma = np.zeros(n)
    gamma[0] = 1.0
    psi = np.asarray(b, dtype=float)
    return AdaptationDynamics(phi, gamma, psi)


def _pole_grids(order, lo, hi, npts):
    base = np.linspace(lo, hi, npts)
    for combo in product(base, repeat=order):
        if all(combo[j] <= combo[j + 1] for j in range(order - 1)):
            yield combo


def fit_adaptation_lti(u_series, j_series, order=2):
    """Constrained fit: real poles in (0, 1), unity gain, min one-step MSE.

    Returns (AdaptationDynamics, mse). The order-3 search also scores the
    best order-2 pole pair with the third pole at exactly zero (a pure
    delay, whose predictor residuals equal the order-2 ones), so the
    order-3 MSE never exceeds the order-2 MSE on the same data.
    """
    u = np.asarray(u_series, dtype=float).ravel()
    y = np.asarray(j_series, dtype=float).ravel()
    if u.shape != y.shape:
        raise ValueError("input and output series must have equal length")
    if order not in (2, 3):
        raise ValueError("order must be 2 or 3")
    if len(u) < 10 * order:
        raise ValueError(f"need at least {10 * order} samples for an order-{order} fit")

    p_min, p_max = 1e-4, 1.0 - 1e-4

    def search(order_n, extra=()):
        best = None
        lo, hi, npts = p_min, p_max, 13
        for _ in range(4):  # refinable grid
            cands = list(_pole_grids(order_n, lo, hi, npts)) + list(extra)
            for poles in cands:
                den = _poles_to_denominator(poles)
                b, mse = _arx_residuals(u, y, den)
                if best is None or mse < best[0]:
                    best = (mse, poles, b, den)
            center = best[1]
            span = (hi - lo) / (npts - 1)
            lo = max(p_min, min(center) - span)
            hi = min(p_max, max(center) + span)
        return best

    if order == 2:
        mse, poles, b, den = search(2)
    else:
        best2 = search(2)
        embedded = ((0.0,) + tuple(sorted(best2[1])),)
        mse, poles, b, den = search(3, extra=embedded)

    dyn = _companion_realization(b, den)
    gain = dyn.steady_state_gain()
    if gain != 0.0:
        dyn = dyn.normalized()

    # diagnostic only: compare with the unconstrained ARX fit
    _, mse_free = _unconstrained_arx(u, y, order)
    floor = 1e-6 * max(1.0, float(np.var(y)))
    if mse > 4.0 * mse_free + floor:
        warnings.warn(
            "pole constraint is strongly active (constrained mse "
            f"{mse:.4g} vs unconstrained {mse_free:.4g})", ConstrainedFitWarning)
    return dyn, mse


def _unconstrained_arx(u, y, n):
    rows = np.arange(_RESIDUAL_START, len(y))
    regress = np.column_stack(
        [-_lagged(y, kk)[rows] for kk in range(1, n + 1)]
        + [_lagged(u, kk)[rows] for kk in range(1, n + 1)])
    theta, *_ = np.linalg.lstsq(regress, y[rows], rcond=None)
    resid = y[rows] - regress @ theta
    return theta, float(np.mean(resid ** 2))


def whiteness_test(residuals, confidence=0.95, max_lag=10):
    """Max-normalized-autocorrelation whiteness test.

    threshold = z((1+confidence)/2) / sqrt(N); lags 1..min(max_lag, N//4).
    At N=50, confidence 0.95 this reproduces the 0.277 validation criterion.
    """
    e = np.asarray(residuals, dtype=float).ravel()
    n = e.size
    if n < 20:
        raise ValueError("need at least 20 residual samples")
    if not 0.0 < confidence < 1.0:
        raise ValueError("confidence must be in (0, 1)")
    lags = min(max_lag, n // 4)
    r0 = float(e @ e)
    if r0 == 0.0:
        acs = np.zeros(lags)
    else:
        acs = np.array([abs(float(e[:-k] @ e[k:])) / r0 for k in range(1, lags + 1)])
    threshold = float(norm.ppf(0.5 + confidence / 2.0) / np.sqrt(n))
    max_ac = float(np.max(acs))
    return WhitenessReport(
        max_normalized_autocorr=max_ac,
        threshold=threshold,
        passed=bool(max_ac < threshold),
        lags_tested=lags,
        residual_mean=float(np.mean(e)),
        residual_std=float(np.std(e, ddof=1)),
    )


def read_iteration_csv(path):
    """Read (iteration, theta, performance) columns from a CSV file."""
    its, thetas, perfs = [], [], []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            its.append(int(row["iteration"]))
            thetas.append(float(row["theta"]))
            perfs.append(float(row["performance"]))
    return np.array(its), np.array(thetas), np.array(perfs)


def identify_from_records(thetas, performances, order=2, confidence=0.95):
    """Full identification pass over an (theta_i, J_i) record.

    Steady-state samples are formed per distinct theta (mean over its
    iterations), the map is fit, then the LTI is fit on (u, J) where
    u = map(theta), and the residual whiteness is analyzed.
    """
    thetas = np.asarray(thetas, dtype=float)
    performances = np.asarray(performances, dtype=float)
    samples = []
    for th in np.unique(thetas):
        sel = thetas == th
        samples.append(SteadyStateSample(
            theta=float(th),
            mean_performance=float(np.mean(performances[sel])),
            std_performance=float(np.std(performances[sel])),
            count=int(np.sum(sel))))
    pref = fit_preference_map(samples)
    u = pref.value(thetas)
    dyn, mse = fit_adaptation_lti(u, performances, order)

    # free-run residuals of the returned model, for the noise analysis
    x = np.zeros(dyn.order)
    pred = np.empty_like(performances)
    for i in range(len(u)):
        pred[i] = float(dyn.psi @ x)
        x = dyn.phi @ x + dyn.gamma * u[i]
    resid = performances - pred
    report = whiteness_test(resid, confidence) if resid.size >= 20 else None
    return pref, dyn, mse, resid, report


def write_identification_report(path, pref, dyn, mse, report):
    lines = [
        "identification report",
        "=====================",
        f"map coefficients: {format_vector(pref.lam)}",
        f"map optimum: {pref.optimum():.6f}" if pref.lam[0] < 0 else "map optimum: n/a (non-concave)",
        f"lti order: {dyn.order}",
        f"lti phi: {format_matrix(dyn.phi)}",
        f"lti gamma: {format_vector(dyn.gamma)}",
        f"lti psi: {format_vector(dyn.psi)}",
        f"lti steady-state gain: {dyn.steady_state_gain():.9f}",
        f"one-step mse: {mse:.6g}",
    ]
    if report is not None:
        lines += [
            f"whiteness max autocorr: {report.max_normalized_autocorr:.4f}",
            f"whiteness threshold: {report.threshold:.4f}",
            f"whiteness passed: {report.passed}",
            f"residual mean: {report.residual_mean:.4f}",
            f"residual std: {report.residual_std:.4f}",
        ]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def write_fitted_subject(path, pref, dyn, report, seed=0):
    """Emit a subject config consumable by the simulator."""
    noise_mean = report.residual_mean if report is not None else 0.0
    noise_std = report.residual_std if report is not None else 0.0
    write_config(path, {"subject": {
        "lambda": format_vector(pref.lam),
        "phi": format_matrix(dyn.phi),
        "gamma": format_vector(dyn.gamma),
        "psi": format_vector(dyn.psi),
        "noise_mean": repr(float(noise_mean)),
        "noise_std": repr(float(noise_std)),
        "seed": str(int(seed)),
        "initial_state": format_vector(np.zeros(dyn.order)),
        "id": "identified",
    }})
