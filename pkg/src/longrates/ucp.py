"""Empirical estimators of uniform-on-compacts convergence in probability.

A sequence of path processes X^n converges ucp to X when the running sup of
|X^n - X| up to each horizon tends to 0 in probability; divergence to +inf
means the running inf exceeds any threshold with probability tending to 1.
These estimators replace the continuous-time running sup/inf with the max/min
over a finite time grid (a lower bound for the true sup: refining the grid
can only increase deviation estimates) and count paths, pairing X^n with X
path-by-path (common random numbers, as the definition requires: the same
underlying outcome drives both).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ModelError
from .models import ExponentialDecay, FHRationalModel, PathEnsemble, simulate_paths

__all__ = [
    "UcpEstimate",
    "PathMatrix",
    "ucp_convergence_prob",
    "ucp_divergence_prob",
    "continuity_harness",
    "ContinuityReport",
    "fh_annuity_ensembles",
    "fh_annuity_n_star",
    "write_ucp_csv",
]

_Z95 = 1.959963984540054


@dataclass(frozen=True)
class UcpEstimate:
    """Estimated deviation probability for one sequence index.

    `threshold` is the epsilon of a convergence estimate or the M of a
    divergence estimate; the confidence interval is a 95% Wilson score
    interval, whose half-width shrinks like n_samples^{-1/2} at fixed p.
    """

    n: int
    threshold: float
    t_horizon: float
    probability: float
    ci_low: float
    ci_high: float
    n_samples: int

    @property
    def half_width(self) -> float:
        return 0.5 * (self.ci_high - self.ci_low)


@dataclass(frozen=True)
class PathMatrix:
    """Bare path ensemble: a time grid plus an (n_paths, n_times) value matrix."""

    time_grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        grid = np.asarray(self.time_grid, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim == 1:
            vals = vals[np.newaxis, :]
        if vals.shape[1] != grid.size:
            raise DomainError("values must have one column per grid time")
        object.__setattr__(self, "time_grid", grid)
        object.__setattr__(self, "values", vals)

    @property
    def n_paths(self) -> int:
        return self.values.shape[0]


def _as_matrix(obj) -> PathMatrix:
    if isinstance(obj, PathMatrix):
        return obj
    if isinstance(obj, PathEnsemble):
        return PathMatrix(obj.time_grid, obj.values)
    raise DomainError(f"expected a path ensemble, got {type(obj).__name__}")


def _paired(seq, target) -> tuple[PathMatrix, np.ndarray]:
    seq = _as_matrix(seq)
    if isinstance(target, (int, float)):
        tgt = np.full((1, seq.time_grid.size), float(target))
    elif isinstance(target, np.ndarray) and target.ndim == 1:
        if target.size != seq.time_grid.size:
            raise DomainError("deterministic target must match the sequence grid")
        tgt = target[np.newaxis, :]
    else:
        tm = _as_matrix(target)
        if tm.time_grid.size != seq.time_grid.size or np.any(tm.time_grid != seq.time_grid):
            raise DomainError("sequence and target grids must match exactly")
        if tm.n_paths not in (1, seq.n_paths):
            raise DomainError("target must pair path-by-path with the sequence")
        tgt = tm.values
    return seq, tgt


def _wilson(count: int, n: int) -> tuple[float, float]:
    if n <= 0:
        raise DomainError("need at least one sample")
    phat = count / n
    z2 = _Z95 * _Z95
    denom = 1.0 + z2 / n
    center = (phat + z2 / (2.0 * n)) / denom
    half = _Z95 * math.sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def _horizon_slice(grid: np.ndarray, t_horizon: float) -> slice:
    if t_horizon < grid[0] or t_horizon > grid[-1] + 1e-12:
        raise DomainError(f"horizon {t_horizon} is outside the path grid")
    stop = int(np.searchsorted(grid, t_horizon + 1e-12))
    return slice(0, max(stop, 1))


def ucp_convergence_prob(seq_ensemble, target, epsilon: float, t_horizon: float,
                         n: int = 0) -> UcpEstimate:
    """Fraction of paths whose grid-sup deviation from the target exceeds epsilon."""
    if epsilon <= 0.0:
        raise DomainError("epsilon must be > 0")
    seq, tgt = _paired(seq_ensemble, target)
    cols = _horizon_slice(seq.time_grid, t_horizon)
    dev = np.max(np.abs(seq.values[:, cols] - tgt[:, cols]), axis=1)
    count = int(np.count_nonzero(dev > epsilon))
    lo, hi = _wilson(count, seq.n_paths)
    return UcpEstimate(n, epsilon, t_horizon, count / seq.n_paths, lo, hi, seq.n_paths)


def ucp_divergence_prob(seq_ensemble, M: float, t_horizon: float, n: int = 0) -> UcpEstimate:
    """Fraction of paths whose grid-inf up to the horizon exceeds the threshold M."""
    seq = _as_matrix(seq_ensemble)
    cols = _horizon_slice(seq.time_grid, t_horizon)
    low = np.min(seq.values[:, cols], axis=1)
    count = int(np.count_nonzero(low > M))
    lo, hi = _wilson(count, seq.n_paths)
    return UcpEstimate(n, M, t_horizon, count / seq.n_paths, lo, hi, seq.n_paths)


@dataclass(frozen=True)
class ContinuityRow:
    n: int
    epsilon: float
    prob_x: float
    prob_y: float
    prob_out: float
    ci_out: tuple[float, float]


@dataclass(frozen=True)
class ContinuityReport:
    """Per-index deviation probabilities of inputs and mapped outputs.

    `monotone_ok` holds when, each time both input probabilities weakly
    decrease from one index to the next, the output probability does not
    increase beyond the joint confidence slack.
    """

    rows: tuple[ContinuityRow, ...]
    monotone_ok: bool


def continuity_harness(map_fn, seq_x, seq_y, limits, epsilon_schedule,
                       t_horizon: float, ns=None) -> ContinuityReport:
    """Empirical continuous-mapping check for a bivariate continuous map.

    seq_x / seq_y are same-length lists of path ensembles converging (in ucp)
    to the limit pair; the harness estimates deviation probabilities of the
    inputs and of map_fn(X^n, Y^n) against map_fn(X, Y) and reports whether
    output deviations shrink whenever the input ones do.
    """
    if len(seq_x) != len(seq_y):
        raise DomainError("seq_x and seq_y must have the same length")
    k = len(seq_x)
    eps = np.broadcast_to(np.asarray(epsilon_schedule, dtype=float), (k,))
    ns = list(range(1, k + 1)) if ns is None else list(ns)
    lim_x, lim_y = limits
    rows = []
    for i in range(k):
        x, tx = _paired(seq_x[i], lim_x)
        y, ty = _paired(seq_y[i], lim_y)
        if np.any(x.time_grid != y.time_grid):
            raise DomainError("the two input sequences must share a grid")
        px = ucp_convergence_prob(x, tx[0] if tx.shape[0] == 1 else PathMatrix(x.time_grid, tx),
                                  float(eps[i]), t_horizon, ns[i])
        py = ucp_convergence_prob(y, ty[0] if ty.shape[0] == 1 else PathMatrix(y.time_grid, ty),
                                  float(eps[i]), t_horizon, ns[i])
        out_seq = PathMatrix(x.time_grid, map_fn(x.values, y.values))
        out_lim = PathMatrix(x.time_grid, map_fn(tx, ty))
        if out_lim.n_paths == 1 and out_seq.n_paths > 1:
            out_lim = PathMatrix(x.time_grid, np.broadcast_to(out_lim.values, out_seq.values.shape))
        po = ucp_convergence_prob(out_seq, out_lim, float(eps[i]), t_horizon, ns[i])
        rows.append(ContinuityRow(ns[i], float(eps[i]), px.probability, py.probability,
                                  po.probability, (po.ci_low, po.ci_high)))
    ok = True
    for a, b in zip(rows, rows[1:]):
        if b.prob_x <= a.prob_x and b.prob_y <= a.prob_y:
            slack = (a.ci_out[1] - a.ci_out[0]) / 2 + (b.ci_out[1] - b.ci_out[0]) / 2
            if b.prob_out > a.prob_out + slack:
                ok = False
    return ContinuityReport(tuple(rows), ok)


# ---------------------------------------------------------------------------
# rational-model annuity ensembles (the lab's standard convergent family)


def _exponential_weights(model: FHRationalModel):
    if not (isinstance(model.f, ExponentialDecay) and isinstance(model.g, ExponentialDecay)):
        raise ModelError("annuity ensembles need the exponential rational model "
                         "(closed-form infinite weight sums)")
    return model.f.rate, model.g.rate


def fh_annuity_ensembles(model: FHRationalModel, delta: float, n_list, t_horizon: float,
                         grid_step: float, n_paths: int, seed: int,
                         n_workers: int = 1):
    """Partial annuity sums S_n and their limit S_inf on a common path grid.

    The tenor is uniform with spacing delta anchored at 0; the path grid must
    not extend past T_1 (the annuity requires evaluation times <= T_1).
    Returns ({n: PathMatrix}, PathMatrix limit, PathEnsemble of the driver).
    """
    if t_horizon > delta + 1e-12:
        raise DomainError("path horizon must not exceed the first exchange date")
    n_list = sorted(set(int(n) for n in n_list))
    if min(n_list) < 1:
        raise DomainError("sequence indices must be >= 1")
    steps = int(round(t_horizon / grid_step))
    grid = np.linspace(0.0, t_horizon, steps + 1)
    ensemble = simulate_paths(model, grid, n_paths, seed, n_workers)
    m = ensemble.values  # (n_paths, n_times)
    alpha, beta = _exponential_weights(model)
    dates = delta * np.arange(1, max(n_list) + 1)
    f_cum = np.cumsum(np.exp(-alpha * dates))
    g_cum = np.cumsum(np.exp(-beta * dates))
    f_inf = 1.0 / math.expm1(alpha * delta)
    g_inf = 1.0 / math.expm1(beta * delta)
    den = model.f(grid) + model.g(grid) * m
    out = {
        n: PathMatrix(grid, delta * (f_cum[n - 1] + g_cum[n - 1] * m) / den)
        for n in n_list
    }
    target = PathMatrix(grid, delta * (f_inf + g_inf * m) / den)
    return out, target, ensemble


def fh_annuity_n_star(model: FHRationalModel, delta: float, epsilon: float,
                      t_horizon: float) -> int:
    """Smallest n whose geometric tail bound pushes the sup deviation under epsilon.

    The deviation of S_n from S_inf is a positive-weighted mediant of the f
    and g tail sums, hence bounded by
    delta * max((F - F_n)/f(t_horizon), (G - G_n)/g(t_horizon)); the bound is
    deterministic, so beyond n_star the deviation probability is exactly 0.
    """
    if epsilon <= 0.0:
        raise DomainError("epsilon must be > 0")
    alpha, beta = _exponential_weights(model)
    out = 1
    for rate in (alpha, beta):
        q = math.exp(-rate * delta)
        floor = math.exp(-rate * t_horizon)
        # delta * q^{n+1} / ((1 - q) * floor) <= epsilon
        n = math.log(delta / (epsilon * floor * (1.0 - q))) / (rate * delta) - 1.0
        out = max(out, int(math.ceil(n)))
    return out


def write_ucp_csv(estimates, path) -> None:
    """CSV of estimates: n, epsilon_or_M, probability, ci_low, ci_high, n_samples."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "epsilon_or_M", "probability", "ci_low", "ci_high", "n_samples"])
        for e in estimates:
            writer.writerow([
                e.n, f"{e.threshold:.17g}", f"{e.probability:.17g}",
                f"{e.ci_low:.17g}", f"{e.ci_high:.17g}", e.n_samples,
            ])
