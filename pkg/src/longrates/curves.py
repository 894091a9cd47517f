"""Zero-coupon curve abstraction and finite-horizon rate computations.

All times are plain floats in years. A curve is an evaluator of discount
factors P(t, T) for 0 <= t <= T; evaluation is array-aware so ladders and
tenor sums vectorise. No calendars or day-count conventions.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

__all__ = [
    "Curve",
    "FlatCurve",
    "SyntheticCurve",
    "ExplodingCurve",
    "PowerCurve",
    "TenorGrid",
    "ShortRatePath",
    "spot_yield",
    "spot_simple",
    "short_rate_fd",
    "annuity",
    "ois_par_rate",
    "compounded_overnight",
]

#: Default bump (years) for the one-sided short-rate finite difference.
SHORT_RATE_BUMP = 1e-6


class Curve(ABC):
    """Evaluable discount-factor surface P(t, T).

    Implementations must return strictly positive finite prices for
    0 <= t <= T and satisfy P(T, T) = 1. Arguments broadcast like numpy
    arrays; scalars in give a float out.
    """

    @abstractmethod
    def _price(self, t, T):
        """Raw price evaluation on validated, broadcast arguments."""

    def price(self, t, T):
        t = np.asarray(t, dtype=float)
        T = np.asarray(T, dtype=float)
        if np.any(t < 0.0):
            raise DomainError("curve evaluation requires t >= 0")
        if np.any(t > T):
            raise DomainError("curve evaluation requires t <= T; extrapolation to t > T is not defined")
        out = self._price(t, T)
        if out.ndim == 0:
            return float(out)
        return out


@dataclass(frozen=True)
class FlatCurve(Curve):
    """P(t, T) = exp(-r (T - t)): constant continuously compounded rate."""

    rate: float

    def _price(self, t, T):
        return np.exp(-self.rate * (T - t))


@dataclass(frozen=True)
class SyntheticCurve(Curve):
    """P(t, T) = a + (1 - a) exp(-lam (T - t)) with 0 <= a < 1, lam > 0.

    Discount factors level off at `a`, so the long bond stays strictly
    positive while the tenor-weighted bond sum grows linearly.
    """

    a: float
    lam: float

    def __post_init__(self):
        if not 0.0 <= self.a < 1.0:
            raise DomainError("SyntheticCurve requires 0 <= a < 1")
        if self.lam <= 0.0:
            raise DomainError("SyntheticCurve requires lam > 0")

    def _price(self, t, T):
        return self.a + (1.0 - self.a) * np.exp(-self.lam * (T - t))


@dataclass(frozen=True)
class ExplodingCurve(Curve):
    """P(t, T) = exp(+lam (T - t)), lam > 0: bond prices grow with maturity."""

    lam: float

    def __post_init__(self):
        if self.lam <= 0.0:
            raise DomainError("ExplodingCurve requires lam > 0")

    def _price(self, t, T):
        return np.exp(self.lam * (T - t))


@dataclass(frozen=True)
class PowerCurve(Curve):
    """Bond-index powered family: the i-th tenor bond is priced 1 + (maturity - t)^i.

    The exponent is the tenor *index* (i = T / delta on a uniform grid anchored
    at 0), not a year fraction, so this is a sequence of bonds rather than a
    conventional curve: it deliberately violates P(T, T) = 1 and exists only to
    probe the tail ratio of the n-th bond to the n-term annuity. For
    maturity - t = x > 1 that ratio tends to (x - 1)/x; a widely quoted value
    of 1 for this example drops the geometric tail sum(x^{i-n}) -> 1/(x-1) and
    does not survive direct evaluation.
    """

    maturity: float
    delta: float = 1.0

    def __post_init__(self):
        if self.delta <= 0.0:
            raise DomainError("PowerCurve requires delta > 0")

    def _price(self, t, T):
        n = np.asarray(T, dtype=float) / self.delta
        return 1.0 + np.power(self.maturity - np.asarray(t, dtype=float), n)


@dataclass(frozen=True)
class TenorGrid:
    """Exchange dates T_0 < T_1 < ... with spacing bounded in (c, C).

    Uniform grids (`start`, `delta`) are unbounded: T_i = start + i*delta.
    Explicit grids carry their dates (first entry is T_0) and are finite.
    """

    start: float | None = None
    delta: float | None = None
    dates: tuple[float, ...] | None = None
    c: float = field(default=0.0)
    C: float = field(default=math.inf)

    @classmethod
    def uniform(cls, start: float, delta: float, c: float | None = None, C: float | None = None) -> "TenorGrid":
        if delta <= 0.0:
            raise DomainError("uniform tenor grid requires delta > 0")
        c = 0.5 * delta if c is None else c
        C = 2.0 * delta if C is None else C
        if not c < delta < C:
            raise DomainError("spacing bounds must satisfy c < delta < C")
        return cls(start=float(start), delta=float(delta), c=float(c), C=float(C))

    @classmethod
    def from_dates(cls, dates, c: float | None = None, C: float | None = None) -> "TenorGrid":
        dates = tuple(float(d) for d in dates)
        if len(dates) < 2:
            raise DomainError("an explicit tenor grid needs T_0 and at least one exchange date")
        gaps = np.diff(dates)
        if np.any(gaps <= 0.0):
            raise DomainError("tenor dates must be strictly increasing")
        c = 0.5 * float(gaps.min()) if c is None else c
        C = 2.0 * float(gaps.max()) if C is None else C
        if not (np.all(c < gaps) and np.all(gaps < C)):
            raise DomainError("tenor spacing must satisfy c < T_i - T_{i-1} < C")
        return cls(dates=dates, c=float(c), C=float(C))

    @property
    def is_uniform(self) -> bool:
        return self.dates is None

    @property
    def n_max(self) -> int | None:
        """Number of exchange dates available, or None if unbounded."""
        return None if self.is_uniform else len(self.dates) - 1

    def date(self, i: int) -> float:
        """T_i for i >= 0 (T_0 is the anchor)."""
        if i < 0:
            raise DomainError("tenor index must be >= 0")
        if self.is_uniform:
            return self.start + i * self.delta
        if i > self.n_max:
            raise DomainError(f"tenor grid has only {self.n_max} exchange dates")
        return self.dates[i]

    def dates_upto(self, n: int) -> np.ndarray:
        """Array [T_1, ..., T_n]."""
        if n < 0:
            raise DomainError("n must be >= 0")
        if self.is_uniform:
            return self.start + self.delta * np.arange(1, n + 1, dtype=float)
        if n > self.n_max:
            raise DomainError(f"tenor grid has only {self.n_max} exchange dates")
        return np.asarray(self.dates[1 : n + 1], dtype=float)

    def deltas_upto(self, n: int) -> np.ndarray:
        """Array [delta_1, ..., delta_n] with delta_i = T_i - T_{i-1}."""
        if self.is_uniform:
            return np.full(n, self.delta, dtype=float)
        return np.diff(np.asarray(self.dates[: n + 1], dtype=float))


@dataclass(frozen=True)
class ShortRatePath:
    """Piecewise-constant left-continuous instantaneous rate path.

    `values[i]` applies on the segment (times[i], times[i+1]]; there is one
    value per segment (len(values) == len(times) - 1). The integral over any
    grid-aligned interval is exact, which keeps overnight compounding free of
    quadrature error.
    """

    times: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        times = tuple(float(x) for x in self.times)
        values = tuple(float(x) for x in self.values)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)
        if len(times) < 2:
            raise DomainError("a rate path needs at least two grid times")
        if np.any(np.diff(times) <= 0.0):
            raise DomainError("rate path times must be strictly increasing")
        if len(values) != len(times) - 1:
            raise DomainError("need exactly one rate value per grid segment")
        if not all(math.isfinite(v) for v in values):
            raise DomainError("rate values must be finite")

    def integral(self, a: float, b: float) -> float:
        """Exact integral of the step function over [a, b] within the grid span."""
        if a > b:
            raise DomainError("integral requires a <= b")
        if a < self.times[0] or b > self.times[-1]:
            raise DomainError(
                f"rate path covers [{self.times[0]}, {self.times[-1]}], not [{a}, {b}]"
            )
        total = 0.0
        for i, v in enumerate(self.values):
            lo = max(a, self.times[i])
            hi = min(b, self.times[i + 1])
            if hi > lo:
                total += v * (hi - lo)
        return total


def spot_yield(curve: Curve, t: float, T: float) -> float:
    """Continuously compounded spot rate -log P(t,T) / (T - t); requires t < T."""
    if not t < T:
        raise DomainError("spot_yield requires t < T")
    return -math.log(curve.price(t, T)) / (T - t)


def spot_simple(curve: Curve, t: float, T: float) -> float:
    """Simple (linearly accruing) spot rate (1/P(t,T) - 1) / (T - t); requires t < T."""
    if not t < T:
        raise DomainError("spot_simple requires t < T")
    return (1.0 / curve.price(t, T) - 1.0) / (T - t)


def short_rate_fd(curve: Curve, t: float, h: float = SHORT_RATE_BUMP) -> float:
    """One-sided finite-difference short rate Y(t, t+h).

    The instantaneous rate is a maturity limit of the yield; this estimator
    carries an O(h) bias and is used uniformly for every curve so all models
    go through the same code path. Default h = 1e-6 years.
    """
    if h <= 0.0:
        raise DomainError("short_rate_fd requires h > 0")
    return spot_yield(curve, t, t + h)


def annuity(curve: Curve, t: float, grid: TenorGrid, n: int) -> float:
    """Tenor-weighted bond sum S_n(t) = sum_{i=1..n} delta_i P(t, T_i).

    Non-decreasing in n; strictly positive for n >= 1. Requires t <= T_1.
    """
    if n < 0:
        raise DomainError("annuity requires n >= 0")
    if n == 0:
        return 0.0
    if t > grid.date(1):
        raise DomainError("annuity requires t <= T_1")
    dates = grid.dates_upto(n)
    deltas = grid.deltas_upto(n)
    return float(np.sum(deltas * curve.price(t, dates)))


def ois_par_rate(curve: Curve, t: float, grid: TenorGrid, n: int) -> float:
    """Par rate of an overnight indexed swap with n exchanges: (1 - P(t,T_n)) / S_n(t).

    This is the rolling-OIS convention with the tenor anchored at t (T_0 = t);
    grids anchored elsewhere still evaluate the same formula. The denominator
    is strictly positive, so the rate is always finite.
    """
    if n < 1:
        raise DomainError("ois_par_rate requires n >= 1")
    return (1.0 - curve.price(t, grid.date(n))) / annuity(curve, t, grid, n)


def compounded_overnight(path: ShortRatePath, a: float, b: float) -> float:
    """Compounded overnight rate (exp(int_a^b r ds) - 1) / (b - a)."""
    if not a < b:
        raise DomainError("compounded_overnight requires a < b")
    return (math.exp(path.integral(a, b)) - 1.0) / (b - a)
