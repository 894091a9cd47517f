"""Infinite annuity sums, long-horizon rate estimators and their classifiers.

The central objects are the tenor-weighted bond sum S_n(t) and its limit: the
long-term swap rate is 1/S_inf when the sum converges, is zero when it
diverges while the long bond stays finite, and is otherwise the (finite,
non-positive) limit of the finite-n par rates. Long-term yield, simple rate
and bond are estimated on a finite horizon ladder with explicit, configurable
classification thresholds; Undetermined is a first-class outcome and is never
silently coerced to a number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .curves import Curve, TenorGrid, annuity, ois_par_rate
from .errors import DomainError, ModelError
from .models import LinearRationalModel

__all__ = [
    "LongTermClass",
    "ClassifiedValue",
    "TruncatedSum",
    "LongTermReport",
    "HorizonConfig",
    "sum_to_tolerance",
    "long_term_swap_rate",
    "long_term_yield",
    "long_term_simple",
    "long_bond",
    "bond_sum_ratio_k",
    "fh_exponential_closed_forms",
    "lr_closed_forms",
    "FhClosedForms",
    "LrClosedForms",
]


class LongTermClass(Enum):
    """Five-way limit taxonomy of a long-horizon quantity."""

    ZERO = "zero"
    FINITE_POSITIVE = "finite_positive"
    FINITE_NEGATIVE = "finite_negative"
    PLUS_INFINITY = "plus_infinity"
    UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class ClassifiedValue:
    """A limit estimate paired with its class; value is None when meaningless."""

    value: float | None
    cls: LongTermClass

    def is_finite(self) -> bool:
        return self.cls in (
            LongTermClass.ZERO,
            LongTermClass.FINITE_POSITIVE,
            LongTermClass.FINITE_NEGATIVE,
        )


@dataclass(frozen=True)
class TruncatedSum:
    """Partial annuity sum with a geometric tail bound.

    converged implies tail_bound <= the requested tolerance; when False,
    growth_rate reports the recent term ratio (>= 1 signals genuine growth,
    values just under 1 mean the bound would not shrink below tolerance).
    """

    value: float
    n_used: int
    tail_bound: float
    converged: bool
    growth_rate: float


@dataclass(frozen=True)
class LongTermReport:
    """Values and classes of the four long-horizon limits of one curve."""

    ell: ClassifiedValue
    long_bond: ClassifiedValue
    swap: ClassifiedValue
    simple: ClassifiedValue
    horizon_used: float


@dataclass(frozen=True)
class HorizonConfig:
    """Ladder and thresholds for finite-horizon limit classification.

    The ladder tops out at 400 years: the built-in curve families converge at
    rate O(1/T) or faster there, which the pairwise 1/T tail extrapolation
    reduces to well inside class_tol. All thresholds are explicit precisely
    because no finite horizon can certify a ucp limit.
    """

    horizons: tuple[float, ...] = (25.0, 50.0, 100.0, 200.0, 400.0)
    class_tol: float = 1e-4
    extrap_tol: float = 1e-3
    explode_factor: float = 10.0
    growth_min: float = 1.15
    growth_trend_slack: float = 0.05
    decay_ratio_max: float = 0.5
    sum_tol: float = 1e-10
    n_max: int = 50_000

    def __post_init__(self):
        if len(self.horizons) < 3:
            raise DomainError("the horizon ladder needs at least three points")
        if np.any(np.diff(self.horizons) <= 0.0):
            raise DomainError("horizons must be increasing")


DEFAULT_HORIZON = HorizonConfig()

# partial sums larger than this flag genuine divergence
_SUM_CAP = 1e12
# a recent term ratio at least this close to 1 (or above) marks a
# non-summable tail; smaller ratios at n_max mean "undetermined, n_max too small"
_DIVERGENCE_RATIO = 0.999
_RATIO_WINDOW = 5
_BLOCK = 256


def sum_to_tolerance(curve: Curve, t: float, grid: TenorGrid, tol: float = 1e-10,
                     n_max: int = 50_000) -> TruncatedSum:
    """Sum delta_i P(t, T_i) until a geometric tail bound drops below tol.

    The bound is last_term * rho / (1 - rho) with rho the max of the last
    five successive term ratios, applied only while all five stay below 1
    (exact for geometric tails, conservative for exponential mixtures).
    Divergence is reported through converged=False: either the partial sum
    exceeds 1e12 / a term ratio persists at or above ~1, with the recent
    growth rate as a diagnostic.
    """
    if tol <= 0.0:
        raise DomainError("sum_to_tolerance requires tol > 0")
    limit = grid.n_max if grid.n_max is not None else n_max
    limit = min(limit, n_max)
    total = 0.0
    prev_term = None
    ratios: list[float] = []
    n_used = 0
    with np.errstate(over="ignore", invalid="ignore"):
        for start in range(1, limit + 1, _BLOCK):
            stop = min(start + _BLOCK - 1, limit)
            dates = grid.dates_upto(stop)[start - 1 :]
            deltas = grid.deltas_upto(stop)[start - 1 :]
            terms = deltas * np.asarray(curve.price(t, dates), dtype=float)
            for i, term in enumerate(terms):
                n = start + i
                if not math.isfinite(term) or total + term > _SUM_CAP:
                    growth = ratios[-1] if ratios else math.inf
                    return TruncatedSum(total, n_used, math.inf, False, growth)
                total += term
                n_used = n
                if prev_term is not None and prev_term > 0.0:
                    ratios.append(term / prev_term)
                    if len(ratios) > _RATIO_WINDOW:
                        ratios.pop(0)
                prev_term = term
                if len(ratios) == _RATIO_WINDOW and max(ratios) < 1.0:
                    rho = max(ratios)
                    bound = term * rho / (1.0 - rho)
                    if bound <= tol:
                        return TruncatedSum(total, n_used, bound, True, rho)
    growth = ratios[-1] if ratios else math.inf
    bound = math.inf
    if ratios and max(ratios) < 1.0:
        rho = max(ratios)
        bound = (prev_term or 0.0) * rho / (1.0 - rho)
    return TruncatedSum(total, n_used, bound, False, growth)


# ---------------------------------------------------------------------------
# ladder classifiers


def _sign_class(estimate: float, tol: float) -> ClassifiedValue:
    if abs(estimate) <= tol:
        return ClassifiedValue(0.0, LongTermClass.ZERO)
    if estimate > 0.0:
        return ClassifiedValue(estimate, LongTermClass.FINITE_POSITIVE)
    return ClassifiedValue(estimate, LongTermClass.FINITE_NEGATIVE)


def _explosive_up(values: np.ndarray, cfg: HorizonConfig) -> bool:
    v = values
    # fast explosions: far beyond the ladder median and still increasing
    med = float(np.median(v))
    if v[-1] > cfg.explode_factor * abs(med) and v[-1] > v[-2] > v[-3] > 0.0:
        return True
    # slow exponential growth: tail ratio large and not flattening out
    if np.all(v[-3:] > 0.0):
        r1 = v[-2] / v[-3]
        r2 = v[-1] / v[-2]
        if r2 >= cfg.growth_min and r2 >= r1 * (1.0 - cfg.growth_trend_slack) and v[-1] > v[0]:
            return True
    return False


def _nonfinite_class(values: np.ndarray) -> ClassifiedValue | None:
    if np.all(np.isfinite(values)):
        return None
    if np.any(np.isnan(values)):
        return ClassifiedValue(None, LongTermClass.UNDETERMINED)
    finite = values[np.isfinite(values)]
    if np.any(values == math.inf) and (finite.size < 2 or np.all(np.diff(finite) >= 0.0)):
        return ClassifiedValue(None, LongTermClass.PLUS_INFINITY)
    return ClassifiedValue(None, LongTermClass.UNDETERMINED)


def _classify_rate_ladder(horizons, values, cfg: HorizonConfig) -> ClassifiedValue:
    """Classify a rate ladder: raw tail agreement first, then 1/T extrapolation.

    Rates built from -log P / tau or (1/P - 1) / tau approach their limits
    with O(1/T) corrections, so the pairwise extrapolant
    (T2 v2 - T1 v1)/(T2 - T1) cancels the leading term; it is accepted when
    two consecutive extrapolants agree within extrap_tol.
    """
    v = np.asarray(values, dtype=float)
    h = np.asarray(horizons, dtype=float)
    nf = _nonfinite_class(v)
    if nf is not None:
        return nf
    if _explosive_up(v, cfg):
        return ClassifiedValue(None, LongTermClass.PLUS_INFINITY)
    k = max(2, math.ceil(v.size / 4))
    tail = v[-k:]
    if tail.max() - tail.min() <= cfg.class_tol:
        return _sign_class(float(tail.mean()), cfg.class_tol)
    e1 = (h[-2] * v[-2] - h[-3] * v[-3]) / (h[-2] - h[-3])
    e2 = (h[-1] * v[-1] - h[-2] * v[-2]) / (h[-1] - h[-2])
    if abs(e2 - e1) <= cfg.extrap_tol:
        return _sign_class(float(e2), cfg.class_tol)
    return ClassifiedValue(None, LongTermClass.UNDETERMINED)


def _classify_bond_ladder(horizons, values, cfg: HorizonConfig) -> ClassifiedValue:
    """Classify a discount-bond ladder.

    Bonds decay exponentially, not like 1/T, so the rate extrapolation is
    replaced by a geometric-decay rule: a positive strictly decreasing tail
    with ratio <= decay_ratio_max certifies a zero limit (a persistent ratio
    bound below 1 forces the sequence to 0).
    """
    v = np.asarray(values, dtype=float)
    nf = _nonfinite_class(v)
    if nf is not None:
        return nf
    if _explosive_up(v, cfg):
        return ClassifiedValue(None, LongTermClass.PLUS_INFINITY)
    k = max(2, math.ceil(v.size / 4))
    tail = v[-k:]
    if tail.max() - tail.min() <= cfg.class_tol:
        return _sign_class(float(tail.mean()), cfg.class_tol)
    if np.all(v[-3:] > 0.0) and v[-1] < v[-2] < v[-3] and v[-1] / v[-2] <= cfg.decay_ratio_max:
        return ClassifiedValue(0.0, LongTermClass.ZERO)
    return ClassifiedValue(None, LongTermClass.UNDETERMINED)


# ---------------------------------------------------------------------------
# ladder estimators


def long_term_yield(curve: Curve, t: float = 0.0, horizons=None,
                    config: HorizonConfig = DEFAULT_HORIZON) -> ClassifiedValue:
    """Limit estimate of the continuously compounded yield Y(t, t + tau)."""
    h = np.asarray(horizons if horizons is not None else config.horizons, dtype=float)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        prices = np.asarray(curve.price(t, t + h), dtype=float)
        values = -np.log(prices) / h
    return _classify_rate_ladder(h, values, config)


def long_term_simple(curve: Curve, t: float = 0.0, horizons=None,
                     config: HorizonConfig = DEFAULT_HORIZON) -> ClassifiedValue:
    """Limit estimate of the simple rate (1/P - 1)/tau.

    When the long bond explodes the simple rate vanishes identically, so an
    exploding bond ladder short-circuits to (0, Zero).
    """
    h = np.asarray(horizons if horizons is not None else config.horizons, dtype=float)
    bond = long_bond(curve, t, h, config)
    if bond.cls is LongTermClass.PLUS_INFINITY:
        return ClassifiedValue(0.0, LongTermClass.ZERO)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        prices = np.asarray(curve.price(t, t + h), dtype=float)
        values = (1.0 / prices - 1.0) / h
    return _classify_rate_ladder(h, values, config)


def long_bond(curve: Curve, t: float = 0.0, horizons=None,
              config: HorizonConfig = DEFAULT_HORIZON) -> ClassifiedValue:
    """Limit estimate of the discount bond P(t, t + tau) itself."""
    h = np.asarray(horizons if horizons is not None else config.horizons, dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        values = np.asarray(curve.price(t, t + h), dtype=float)
    return _classify_bond_ladder(h, values, config)


# ---------------------------------------------------------------------------
# long-term swap rate


def long_term_swap_rate(curve: Curve, t: float = 0.0, grid: TenorGrid | None = None,
                        tol: float = 1e-10, n_max: int = 50_000,
                        config: HorizonConfig = DEFAULT_HORIZON) -> ClassifiedValue:
    """Fair fixed rate of the perpetual overnight indexed swap.

    Convergent annuity sum: the rate is 1/S_inf, strictly positive. Divergent
    sum with a finite long bond: the rate is 0. Divergent sum with exploding
    bonds: the finite-n par rates are tailed directly (no extrapolation) and
    classified by sign; the limit is never +infinity, and under divergence it
    cannot be positive.
    """
    grid = grid if grid is not None else TenorGrid.uniform(t, 1.0)
    ts = sum_to_tolerance(curve, t, grid, tol, n_max)
    if ts.converged:
        return ClassifiedValue(1.0 / ts.value, LongTermClass.FINITE_POSITIVE)
    diverged = (not math.isfinite(ts.tail_bound)) and ts.growth_rate >= _DIVERGENCE_RATIO
    if math.isinf(ts.growth_rate):
        diverged = True
    if not diverged:
        # terms were still shrinking when n_max ran out: undetermined, not divergent
        return ClassifiedValue(None, LongTermClass.UNDETERMINED)
    bond = long_bond(curve, t, None, config)
    if bond.is_finite():
        return ClassifiedValue(0.0, LongTermClass.ZERO)
    if bond.cls is LongTermClass.UNDETERMINED:
        return ClassifiedValue(None, LongTermClass.UNDETERMINED)
    # exploding bonds: tail the finite-n par-rate sequence directly
    n_top = max(ts.n_used, 2)
    points = sorted({max(1, int(round(f * n_top))) for f in (0.6, 0.7, 0.8, 0.9, 1.0)})
    with np.errstate(over="ignore", invalid="ignore"):
        rates = [ois_par_rate(curve, t, grid, n) for n in points]
    if not all(math.isfinite(r) for r in rates):
        return ClassifiedValue(None, LongTermClass.UNDETERMINED)
    spread = max(rates) - min(rates)
    if spread > config.class_tol:
        return ClassifiedValue(None, LongTermClass.UNDETERMINED)
    return _sign_class(rates[-1], config.class_tol)


# ---------------------------------------------------------------------------
# bond-to-annuity tail ratio


def bond_sum_ratio_k(curve: Curve, t: float = 0.0, grid: TenorGrid | None = None,
                     n_max: int = 50_000, stab_tol: float = 1e-12,
                     window: int = 5) -> tuple[float, dict]:
    """Tail estimate of P(t, T_n) / S_n(t), the residual of the par-rate limit.

    On the uniform unit tenor the ratio lies in [0, 1] and equals 0 whenever
    the annuity diverges with a finite long bond. For index-powered bond
    sequences 1 + x^n the limit is (x-1)/x when x > 1 (direct evaluation;
    a commonly quoted value of 1 for this example does not survive the
    geometric tail sum). Stops once `window` successive changes stay below
    stab_tol; diagnostics report how the tail behaved.
    """
    if n_max < 2:
        raise DomainError("bond_sum_ratio_k requires n_max >= 2")
    grid = grid if grid is not None else TenorGrid.uniform(t, 1.0)
    limit = grid.n_max if grid.n_max is not None else n_max
    limit = min(limit, n_max)
    total = 0.0
    prev_ratio = None
    stable = 0
    last = math.nan
    n_used = 0
    last_delta = math.inf
    with np.errstate(over="ignore", invalid="ignore"):
        for start in range(1, limit + 1, _BLOCK):
            stop = min(start + _BLOCK - 1, limit)
            dates = grid.dates_upto(stop)[start - 1 :]
            deltas = grid.deltas_upto(stop)[start - 1 :]
            prices = np.asarray(curve.price(t, dates), dtype=float)
            for i in range(prices.size):
                price = float(prices[i])
                term = float(deltas[i]) * price
                if not math.isfinite(price) or not math.isfinite(total + term):
                    return last, {"n_used": n_used, "last_delta": last_delta,
                                  "stabilized": False, "note": "overflow"}
                total += term
                ratio = price / total
                n_used = start + i
                if prev_ratio is not None:
                    last_delta = abs(ratio - prev_ratio)
                    stable = stable + 1 if last_delta <= stab_tol else 0
                prev_ratio = ratio
                last = ratio
                if stable >= window:
                    return last, {"n_used": n_used, "last_delta": last_delta,
                                  "stabilized": True, "note": "stable"}
    return last, {"n_used": n_used, "last_delta": last_delta,
                  "stabilized": False, "note": "n_max"}


# ---------------------------------------------------------------------------
# closed forms


@dataclass(frozen=True)
class FhClosedForms:
    """Geometric closed forms for the exponential rational model on a uniform tenor."""

    f_perpetuity: float  # sum of exp(-alpha i delta), i >= 1
    g_perpetuity: float  # sum of exp(-beta i delta), i >= 1
    swap_rate: float


def fh_exponential_closed_forms(alpha: float, beta: float, delta: float,
                                m: float, t: float) -> FhClosedForms:
    """Long-term swap rate of the exponential rational model, exactly.

    On the uniform tenor anchored at t the weight sums are geometric:
    sum exp(-rate (T_i - t)) = 1/(exp(rate delta) - 1). The swap rate is the
    deflator level over delta times the tenor-summed deflator.
    """
    if not 0.0 < alpha < beta:
        raise DomainError("closed forms require 0 < alpha < beta")
    if delta <= 0.0:
        raise DomainError("closed forms require delta > 0")
    if m <= 0.0:
        raise DomainError("closed forms require m > 0")
    a_inf = 1.0 / math.expm1(alpha * delta)
    b_inf = 1.0 / math.expm1(beta * delta)
    f_t = math.exp(-alpha * t)
    g_t = math.exp(-beta * t)
    rate = (f_t + g_t * m) / (delta * (f_t * a_inf + g_t * b_inf * m))
    return FhClosedForms(a_inf, b_inf, rate)


@dataclass(frozen=True)
class LrClosedForms:
    """Geometric closed forms for the linear-rational model on a uniform tenor."""

    level_perpetuity: float      # sum of exp(-alpha i delta)
    reversion_perpetuity: float  # sum of exp(-(alpha + k) i delta)
    annuity_limit: float         # S_inf, +inf when the sums diverge
    swap_rate: float
    converged: bool


def lr_closed_forms(model: LinearRationalModel, x, t: float, delta: float) -> LrClosedForms:
    """Annuity limit and long-term swap rate of the linear-rational model.

    With alpha > 0 both geometric sums converge by the ratio test and the
    swap rate is 1/S_inf. With alpha = 0 (k = 0 or psi = 0) the sums diverge:
    the annuity limit is infinite and the rate is 0.
    """
    if delta <= 0.0:
        raise DomainError("closed forms require delta > 0")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if not model.contains(x):
        raise DomainError("state x lies outside the box state space")
    alpha = model.alpha
    if alpha < 0.0:
        raise ModelError("derived alpha is negative; model violates its own floor")
    if alpha == 0.0:
        return LrClosedForms(math.inf, math.inf, math.inf, 0.0, False)
    a_inf = 1.0 / math.expm1(alpha * delta)
    b_inf = 1.0 / math.expm1((alpha + model.k) * delta)
    psi = np.asarray(model.psi)
    theta = np.asarray(model.theta)
    y = model.phi + float(np.dot(psi, theta))
    den = model.phi + float(np.dot(psi, x))
    s_inf = delta * (y * a_inf + float(np.dot(psi, x - theta)) * b_inf) / den
    return LrClosedForms(a_inf, b_inf, s_inf, 1.0 / s_inf, True)
