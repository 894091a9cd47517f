"""Arbitrage-free term-structure models and the Monte Carlo pricing oracle.

Three model families are implemented, each built on a positive state price
density A: bond prices are conditional expectations P(t,T) = E[A_T | F_t]/A_t.

* Flesaker-Hughston rational: A_t = f(t) + g(t) M_t with f, g positive
  decreasing and M a positive martingale (geometric Brownian here).
* Flesaker-Hughston integral: A_t = int_t^inf phi(s) M(t,s) ds with
  M(t,s) = exp(sigma(s) W_t - sigma(s)^2 t / 2) on a shared Brownian driver.
* Linear-rational: A_t = exp(-alpha t)(phi + psi'X_t) with X a mean-reverting
  factor on a box state space and alpha the smallest constant making the
  short rate non-negative on the box.

Simulation uses exact-distribution steps (log-normal / Gaussian conditional)
with counter-based per-path random substreams, so ensembles are reproducible
independently of worker count. Monte Carlo estimators weight payoffs by
A_T / A_0, i.e. they compute risk-neutral discounted expectations by change
of numeraire; that is the only discounting consistent with the models' own
price definitions.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .curves import Curve, TenorGrid
from .errors import DomainError, ModelError, QuadratureError

__all__ = [
    "ExponentialDecay",
    "TabulatedDecay",
    "GbmMartingale",
    "BrownianDriver",
    "BoxedFactorDriver",
    "PhiExponential",
    "SigmaConstant",
    "SigmaTwoLevel",
    "FHRationalModel",
    "FHIntegralModel",
    "LinearRationalModel",
    "PathEnsemble",
    "McResult",
    "simulate_paths",
    "fh_rational_price",
    "fh_integral_price",
    "lr_alpha",
    "lr_price",
    "state_price_density",
    "mc_price",
    "mc_floating_leg",
    "adaptive_simpson",
]


# ---------------------------------------------------------------------------
# decay-function specs for the rational model


@dataclass(frozen=True)
class ExponentialDecay:
    """f(t) = exp(-rate * t), rate > 0."""

    rate: float

    def __post_init__(self):
        if self.rate <= 0.0:
            raise ModelError("exponential decay requires rate > 0")

    def __call__(self, t):
        return np.exp(-self.rate * np.asarray(t, dtype=float))

    @property
    def tail_rate(self) -> float:
        return self.rate


@dataclass(frozen=True)
class TabulatedDecay:
    """Positive non-increasing values on knots, log-linear in between.

    Beyond the last knot the function continues exponentially at `tail_rate`
    (default: the rate of the last segment); tail_rate > 0 is the supplied
    summability bound that keeps infinite tenor sums finite.
    """

    knots: tuple[float, ...]
    values: tuple[float, ...]
    tail_rate: float | None = None

    def __post_init__(self):
        knots = tuple(float(x) for x in self.knots)
        values = tuple(float(x) for x in self.values)
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "values", values)
        if len(knots) < 2 or len(knots) != len(values):
            raise ModelError("tabulated decay needs matching knots/values, at least two")
        if knots[0] != 0.0:
            raise ModelError("tabulated decay must start at t = 0")
        if np.any(np.diff(knots) <= 0.0):
            raise ModelError("knots must be strictly increasing")
        if min(values) <= 0.0:
            raise ModelError("values must be strictly positive")
        if np.any(np.diff(values) > 0.0):
            raise ModelError("values must be non-increasing")
        if self.tail_rate is None:
            logv = np.log(values)
            rate = (logv[-2] - logv[-1]) / (knots[-1] - knots[-2])
            object.__setattr__(self, "tail_rate", float(rate))
        if self.tail_rate <= 0.0:
            raise ModelError("tail_rate must be > 0 so the tenor sums stay summable")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        logv = np.interp(t, self.knots, np.log(self.values))
        beyond = t > self.knots[-1]
        out = np.exp(logv)
        if np.any(beyond):
            out = np.where(
                beyond,
                self.values[-1] * np.exp(-self.tail_rate * (t - self.knots[-1])),
                out,
            )
        return out


# ---------------------------------------------------------------------------
# driver specs


@dataclass(frozen=True)
class GbmMartingale:
    """Strictly positive martingale M with M_0 = 1 (fixed), simulated exactly:
    M_{t+dt} = M_t exp(sigma sqrt(dt) Z - sigma^2 dt / 2)."""

    sigma: float
    m0: float = 1.0

    def __post_init__(self):
        if self.sigma < 0.0:
            raise ModelError("GbmMartingale requires sigma >= 0")
        if self.m0 != 1.0:
            raise ModelError("the martingale starts at 1 by construction")

    @property
    def dim(self) -> int:
        return 1

    def _simulate(self, seed, path0, n_paths, dts):
        return _backend.gbm_paths(seed, path0, n_paths, dts, self.sigma, self.m0)


@dataclass(frozen=True)
class BrownianDriver:
    """Standard Brownian motion started at 0 (shared driver of the integral model)."""

    @property
    def dim(self) -> int:
        return 1

    def _simulate(self, seed, path0, n_paths, dts):
        return _backend.bm_paths(seed, path0, n_paths, dts)


@dataclass(frozen=True)
class BoxedFactorDriver:
    """Mean-reverting Gaussian factor dX = k(theta - X)dt + dM confined to a box.

    Steps use the exact Ornstein-Uhlenbeck conditional law; increments that
    would exit [lo, hi] are resampled so the state space constraint (and with
    it the short-rate floor) is preserved.
    """

    k: float
    theta: tuple[float, ...]
    sigma: tuple[float, ...]
    x0: tuple[float, ...]
    lo: tuple[float, ...]
    hi: tuple[float, ...]
    max_attempts: int = 100

    @property
    def dim(self) -> int:
        return len(self.theta)

    def _simulate(self, seed, path0, n_paths, dts):
        values, _ = _backend.ou_paths(
            seed, path0, n_paths, dts, self.k,
            np.asarray(self.theta), np.asarray(self.sigma), np.asarray(self.x0),
            np.asarray(self.lo), np.asarray(self.hi), self.max_attempts,
        )
        return values


# ---------------------------------------------------------------------------
# Flesaker-Hughston rational model


@dataclass(frozen=True)
class FHRationalModel:
    """A_t = f(t) + g(t) M_t; bonds P(t,T) = (f(T) + g(T) m) / (f(t) + g(t) m)."""

    f: ExponentialDecay | TabulatedDecay
    g: ExponentialDecay | TabulatedDecay
    driver: GbmMartingale = field(default_factory=lambda: GbmMartingale(sigma=0.2))

    def __post_init__(self):
        if isinstance(self.f, ExponentialDecay) and isinstance(self.g, ExponentialDecay):
            if not 0.0 < self.f.rate < self.g.rate:
                raise ModelError(
                    "exponential specs need 0 < f.rate < g.rate (f must decay slower)"
                )

    @classmethod
    def exponential(cls, alpha: float, beta: float, sigma: float = 0.2) -> "FHRationalModel":
        return cls(f=ExponentialDecay(alpha), g=ExponentialDecay(beta),
                   driver=GbmMartingale(sigma=sigma))

    def bond_price(self, m, t, T):
        m = np.asarray(m, dtype=float)
        if np.any(m <= 0.0):
            raise DomainError("martingale state must be strictly positive")
        t = np.asarray(t, dtype=float)
        T = np.asarray(T, dtype=float)
        if np.any(t > T):
            raise DomainError("bond price requires t <= T")
        out = (self.f(T) + self.g(T) * m) / (self.f(t) + self.g(t) * m)
        return float(out) if out.ndim == 0 else out

    def state_price_density(self, m, t):
        out = self.f(t) + self.g(t) * np.asarray(m, dtype=float)
        return float(out) if np.ndim(out) == 0 else out

    def short_rates(self, m, t, h):
        """Finite-difference short rate Y(t, t+h) at state m, vectorized."""
        return -np.log(self.bond_price(m, t, t + h)) / h

    def curve(self, m: float = 1.0) -> "FHRationalCurve":
        return FHRationalCurve(self, float(m))

    @property
    def initial_state(self) -> float:
        return self.driver.m0


@dataclass(frozen=True)
class FHRationalCurve(Curve):
    """Discount curve of the rational model at a frozen martingale state."""

    model: FHRationalModel
    m: float = 1.0

    def _price(self, t, T):
        return np.asarray(self.model.bond_price(self.m, t, T))


# ---------------------------------------------------------------------------
# Flesaker-Hughston integral model


@dataclass(frozen=True)
class PhiExponential:
    """phi(s) = rate * exp(-rate * s); the analytic tail is exp(-rate * U)."""

    rate: float

    def __post_init__(self):
        if self.rate <= 0.0:
            raise ModelError("phi requires rate > 0")

    def __call__(self, s):
        return self.rate * np.exp(-self.rate * np.asarray(s, dtype=float))

    def tail(self, U):
        """int_U^inf phi(s) ds."""
        return np.exp(-self.rate * np.asarray(U, dtype=float))


@dataclass(frozen=True)
class SigmaConstant:
    """Maturity-independent driver loading."""

    value: float = 0.0

    @property
    def s_tail(self) -> float:
        return 0.0

    @property
    def tail_value(self) -> float:
        return self.value

    @property
    def breakpoints(self) -> tuple[float, ...]:
        return ()

    def __call__(self, s):
        return np.full_like(np.asarray(s, dtype=float), self.value)


@dataclass(frozen=True)
class SigmaTwoLevel:
    """sigma(s) = near for s < s_break, far beyond; bounded with a constant tail."""

    near: float
    far: float
    s_break: float

    @property
    def s_tail(self) -> float:
        return self.s_break

    @property
    def tail_value(self) -> float:
        return self.far

    @property
    def breakpoints(self) -> tuple[float, ...]:
        return (self.s_break,)

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        return np.where(s < self.s_break, self.near, self.far)


def adaptive_simpson(f, a, b, tol, max_depth=48):
    """Adaptive Simpson quadrature of an array-valued integrand on [a, b].

    Refinement is shared across vector components (the error criterion is the
    max abs correction), so integrating over an ensemble of driver states
    costs one node set. Raises QuadratureError with diagnostics when the
    tolerance is unreachable within the depth limit.
    """
    if b < a:
        raise DomainError("adaptive_simpson requires a <= b")
    if b == a:
        return np.zeros_like(np.asarray(f(a), dtype=float))
    m = 0.5 * (a + b)
    fa, fm, fb = (np.asarray(f(x), dtype=float) for x in (a, m, b))
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    def rec(a, m, b, fa, fm, fb, whole, tol, depth):
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = np.asarray(f(lm), dtype=float), np.asarray(f(rm), dtype=float)
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        delta = left + right - whole
        err = float(np.max(np.abs(delta)))
        if err <= 15.0 * tol:
            return left + right + delta / 15.0
        if depth <= 0:
            raise QuadratureError(
                f"adaptive Simpson failed on [{a}, {b}]: residual {err / 15.0:.3e} "
                f"exceeds tolerance {tol:.3e} at max depth",
                interval=(a, b), achieved=err / 15.0, requested=tol,
            )
        return (rec(a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + rec(m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1))

    return rec(a, m, b, fa, fm, fb, whole, tol, max_depth)


@dataclass(frozen=True)
class FHIntegralModel:
    """A_t = int_t^inf phi(s) M(t,s) ds with M(t,s) = exp(sigma(s) W_t - sigma(s)^2 t/2).

    Integrals run adaptive Simpson on [t, t_cut] plus the analytic exponential
    tail beyond t_cut = t + tail_horizon / phi.rate, where sigma is constant.
    The ucp convergence of the partial tenor sums Q_n of A is an assumption of
    this specification, carried as the `assume_q_ucp` flag rather than derived.
    """

    phi: PhiExponential
    sigma: SigmaConstant | SigmaTwoLevel = field(default_factory=SigmaConstant)
    driver: BrownianDriver = field(default_factory=BrownianDriver)
    tail_horizon: float = 60.0
    quad_tol: float = 1e-10
    assume_q_ucp: bool = True

    def _t_cut(self, t: float) -> float:
        return max(t + self.tail_horizon / self.phi.rate, self.sigma.s_tail)

    def _m_factor(self, sigma_values, w, t):
        w = np.asarray(w, dtype=float)
        return np.exp(sigma_values * w - 0.5 * sigma_values**2 * t)

    def deflator_integral(self, w, lower: float, t: float):
        """int_lower^inf phi(s) M(t, s) ds for driver state(s) w at time t.

        Integration splits at the (jump) breakpoints of sigma so the adaptive
        rule only ever sees smooth pieces.
        """
        t_cut = self._t_cut(t)
        tail = self._m_factor(self.sigma.tail_value, w, t) * self.phi.tail(t_cut)
        if lower >= t_cut:
            return self._m_factor(self.sigma.tail_value, w, t) * self.phi.tail(lower)

        def integrand(s):
            return self.phi(s) * self._m_factor(self.sigma(s), w, t)

        jumps = [b for b in self.sigma.breakpoints if lower < b < t_cut]
        cuts = [lower] + sorted(jumps) + [t_cut]
        total = tail
        for a, b in zip(cuts[:-1], cuts[1:]):
            # stop one ulp short of a jump so each piece is smooth up to its edge
            b_eff = float(np.nextafter(b, a)) if b in jumps else b
            total = total + adaptive_simpson(integrand, a, b_eff, self.quad_tol)
        return total

    def bond_price(self, w, t, T):
        if t > T:
            raise DomainError("bond price requires t <= T")
        num = self.deflator_integral(w, T, t)
        den = self.deflator_integral(w, t, t)
        out = num / den
        return float(out) if np.ndim(out) == 0 else out

    def state_price_density(self, w, t):
        out = self.deflator_integral(w, t, t)
        return float(out) if np.ndim(out) == 0 else out

    def short_rates(self, w, t, h):
        t = np.asarray(t, dtype=float)
        if t.ndim == 0:
            return -np.log(self.bond_price(w, float(t), float(t) + h)) / h
        # column-wise: scalar time, vector of driver states per column
        w = np.asarray(w, dtype=float)
        out = np.empty(w.shape if w.ndim == 2 else (t.size,))
        for j, tj in enumerate(t):
            col = w[:, j] if w.ndim == 2 else w[j]
            out[..., j] = -np.log(self.bond_price(col, float(tj), float(tj) + h)) / h
        return out

    def curve(self, w: float = 0.0) -> "FHIntegralCurve":
        return FHIntegralCurve(self, float(w))

    @property
    def initial_state(self) -> float:
        return 0.0


@dataclass(frozen=True)
class FHIntegralCurve(Curve):
    """Discount curve of the integral model at a frozen driver state.

    Ladder evaluations (one t, many maturities) reuse a single segmented
    quadrature accumulated from the cut-off backwards, with per-segment
    tolerances scaled to the local integrand so deep-tail prices keep
    relative accuracy; scattered (t, T) pairs fall back to independent
    integrals.
    """

    model: FHIntegralModel
    w: float = 0.0

    def _price(self, t, T):
        t_b, T_b = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(T, dtype=float))
        t_flat = np.ravel(t_b)
        if t_flat.size > 2 and np.all(t_flat == t_flat[0]):
            return self._price_ladder(float(t_flat[0]), T_b)
        out = np.empty(t_b.shape)
        for idx in np.ndindex(t_b.shape):
            out[idx] = self.model.bond_price(self.w, float(t_b[idx]), float(T_b[idx]))
        return out

    def _price_ladder(self, t: float, T_b: np.ndarray) -> np.ndarray:
        md = self.model
        t_cut = md._t_cut(t)
        tail = float(md._m_factor(md.sigma.tail_value, self.w, t) * md.phi.tail(t_cut))

        def integrand(s):
            return md.phi(s) * md._m_factor(md.sigma(s), self.w, t)

        maturities = np.unique(T_b)
        inside = [float(u) for u in maturities if u < t_cut]
        jumps = {b for b in md.sigma.breakpoints if t < b < t_cut and b not in inside}
        bounds = [t] + sorted(set(inside) | jumps) + [t_cut]
        # right integrals I[j] = int_{bounds[j]}^{t_cut} phi M
        acc = 0.0
        right = {t_cut: tail}
        for a, b in zip(reversed(bounds[:-1]), reversed(bounds[1:])):
            # stop one ulp short of a jump so each piece is smooth up to its edge
            b_eff = float(np.nextafter(b, a)) if b in jumps else b
            scale = max(abs(float(integrand(a))), abs(float(integrand(b_eff)))) * (b_eff - a)
            seg_tol = md.quad_tol * max(scale, 1e-300)
            acc += float(adaptive_simpson(integrand, a, b_eff, seg_tol))
            right[a] = acc + tail
        den = right[t]
        price_at = {u: right[u] / den for u in ([t] + inside)}
        m_tail = float(md._m_factor(md.sigma.tail_value, self.w, t))
        for u in maturities:
            if float(u) >= t_cut:
                price_at[float(u)] = m_tail * float(md.phi.tail(u)) / den
        out = np.empty(T_b.shape)
        for idx in np.ndindex(T_b.shape):
            out[idx] = price_at[float(T_b[idx])]
        return out


# ---------------------------------------------------------------------------
# linear-rational model


@dataclass(frozen=True)
class LinearRationalModel:
    """A_t = exp(-alpha t)(phi + psi'X_t), dX = k(theta - X)dt + dM on a box.

    alpha is derived, never user-set: the supremum over the box of
    k psi'(theta - x) / (phi + psi'x), attained at a corner because the
    objective is monotone per coordinate; corner enumeration is exact.
    """

    k: float
    theta: tuple[float, ...]
    phi: float
    psi: tuple[float, ...]
    lo: tuple[float, ...]
    hi: tuple[float, ...]
    sigma: tuple[float, ...]
    x0: tuple[float, ...] | None = None

    def __post_init__(self):
        for name in ("theta", "psi", "lo", "hi", "sigma"):
            object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))
        if self.k < 0.0:
            raise ModelError("mean-reversion speed k must be >= 0")
        d = len(self.theta)
        if not (len(self.psi) == len(self.lo) == len(self.hi) == len(self.sigma) == d):
            raise ModelError("theta, psi, lo, hi, sigma must share the dimension")
        if any(l >= h for l, h in zip(self.lo, self.hi)):
            raise ModelError("box must satisfy lo < hi per coordinate")
        if self.x0 is None:
            object.__setattr__(self, "x0", self.theta)
        else:
            object.__setattr__(self, "x0", tuple(float(v) for v in self.x0))
        if not self.contains(np.asarray(self.x0)):
            raise DomainError("x0 must lie in the box state space")
        # positivity of phi + psi'x on the whole box reduces to the corners
        for corner in self._corners():
            if self.phi + float(np.dot(self.psi, corner)) <= 0.0:
                raise ModelError(
                    f"phi + psi'x must be positive on the box; violated at corner {corner}"
                )

    def _corners(self):
        d = len(self.theta)
        for mask in range(1 << d):
            yield np.array(
                [self.hi[i] if mask >> i & 1 else self.lo[i] for i in range(d)]
            )

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= np.asarray(self.lo)) and np.all(x <= np.asarray(self.hi)))

    @property
    def alpha(self) -> float:
        best = -math.inf
        psi = np.asarray(self.psi)
        theta = np.asarray(self.theta)
        for corner in self._corners():
            val = self.k * float(np.dot(psi, theta - corner)) / (
                self.phi + float(np.dot(psi, corner))
            )
            best = max(best, val)
        return best

    def bond_price(self, x, t, T):
        x = np.asarray(x, dtype=float)
        if x.ndim == 0:
            x = np.atleast_1d(x)
        if x.ndim == 1 and not self.contains(x):
            raise DomainError("state x lies outside the box state space")
        t = np.asarray(t, dtype=float)
        T = np.asarray(T, dtype=float)
        if np.any(t > T):
            raise DomainError("bond price requires t <= T")
        tau = T - t
        alpha = self.alpha
        psi = np.asarray(self.psi)
        theta = np.asarray(self.theta)
        y = self.phi + float(np.dot(psi, theta))
        psi_dev = np.dot(x - theta, psi)
        den = self.phi + np.dot(x, psi)
        out = (y * np.exp(-alpha * tau) + psi_dev * np.exp(-(alpha + self.k) * tau)) / den
        return float(out) if np.ndim(out) == 0 else out

    def state_price_density(self, x, t):
        x = np.asarray(x, dtype=float)
        if x.ndim == 0:
            x = np.atleast_1d(x)
        out = np.exp(-self.alpha * np.asarray(t, dtype=float)) * (self.phi + np.dot(x, np.asarray(self.psi)))
        return float(out) if np.ndim(out) == 0 else out

    def short_rates(self, x, t, h):
        return -np.log(self.bond_price(x, t, t + h)) / h

    def curve(self, x=None) -> "LinearRationalCurve":
        x = self.x0 if x is None else tuple(float(v) for v in np.atleast_1d(x))
        return LinearRationalCurve(self, x)

    @property
    def driver(self) -> BoxedFactorDriver:
        return BoxedFactorDriver(
            k=self.k, theta=self.theta, sigma=self.sigma,
            x0=self.x0, lo=self.lo, hi=self.hi,
        )

    @property
    def initial_state(self):
        return np.asarray(self.x0)


@dataclass(frozen=True)
class LinearRationalCurve(Curve):
    """Discount curve of the linear-rational model at a frozen factor state."""

    model: LinearRationalModel
    x: tuple[float, ...]

    def _price(self, t, T):
        return np.asarray(self.model.bond_price(np.asarray(self.x), t, T))


# ---------------------------------------------------------------------------
# spec-level operation wrappers


def fh_rational_price(model: FHRationalModel, m: float, t: float, T: float) -> float:
    """Rational-model bond price at martingale state m > 0."""
    return model.bond_price(m, t, T)


def fh_integral_price(model: FHIntegralModel, driver_state: float, t: float, T: float) -> float:
    """Integral-model bond price: ratio of deflator tail integrals."""
    return model.bond_price(driver_state, t, T)


def lr_alpha(model: LinearRationalModel) -> float:
    """Short-rate floor constant: sup over the box of k psi'(theta-x)/(phi+psi'x)."""
    return model.alpha


def lr_price(model: LinearRationalModel, x, t: float, T: float) -> float:
    """Linear-rational bond price at box state x."""
    return model.bond_price(np.asarray(x, dtype=float), t, T)


def state_price_density(model, path_state, t: float):
    """Deflator value A_t for a model at the given path state."""
    return model.state_price_density(path_state, t)


# ---------------------------------------------------------------------------
# path ensembles


@dataclass
class PathEnsemble:
    """Seeded, time-discretized sample paths of a driving process.

    Values materialize lazily from (driver, time_grid, n_paths, seed): the
    counter-based substreams make any block regeneration bit-identical, so
    large ensembles can be streamed through `iter_blocks` without pinning
    n_paths x n_times doubles in memory.
    """

    driver: object
    time_grid: np.ndarray
    n_paths: int
    seed: int
    n_workers: int = 1
    _values: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        grid = np.asarray(self.time_grid, dtype=float)
        if grid.ndim != 1 or grid.size < 2:
            raise DomainError("time grid must be a 1-D array with at least two points")
        if grid[0] != 0.0:
            raise DomainError("time grid must start at 0")
        if np.any(np.diff(grid) <= 0.0):
            raise DomainError("time grid must be strictly increasing")
        if self.n_paths < 1:
            raise DomainError("n_paths must be >= 1")
        self.time_grid = grid

    def _generate(self, path0: int, count: int) -> np.ndarray:
        dts = np.diff(self.time_grid)
        return self.driver._simulate(self.seed, path0, count, dts)

    @property
    def values(self) -> np.ndarray:
        """Full (n_paths, n_times[, d]) array; cached after first access."""
        if self._values is None:
            if self.n_workers <= 1 or self.n_paths < 2 * self.n_workers:
                self._values = self._generate(0, self.n_paths)
            else:
                bounds = np.linspace(0, self.n_paths, self.n_workers + 1, dtype=int)
                with ThreadPoolExecutor(max_workers=self.n_workers) as pool:
                    parts = list(
                        pool.map(lambda se: self._generate(se[0], se[1] - se[0]),
                                 zip(bounds[:-1], bounds[1:]))
                    )
                self._values = np.concatenate(parts, axis=0)
        return self._values

    def iter_blocks(self, block_size: int = 20_000):
        """Yield (path0, values_block) pairs covering all paths in order."""
        if self._values is not None:
            for p0 in range(0, self.n_paths, block_size):
                yield p0, self._values[p0 : p0 + block_size]
            return
        for p0 in range(0, self.n_paths, block_size):
            yield p0, self._generate(p0, min(block_size, self.n_paths - p0))

    def grid_index(self, t: float) -> int:
        idx = int(np.argmin(np.abs(self.time_grid - t)))
        if abs(self.time_grid[idx] - t) > 1e-9:
            raise DomainError(f"time {t} is not on the ensemble grid")
        return idx


def simulate_paths(spec, grid, n_paths: int, seed: int, n_workers: int = 1) -> PathEnsemble:
    """Simulate a driver (or a model's driver) on the grid.

    `spec` may be a driver (GbmMartingale, BrownianDriver, BoxedFactorDriver)
    or a model, in which case its canonical driver is used.
    """
    driver = getattr(spec, "driver", spec)
    if not hasattr(driver, "_simulate"):
        raise ModelError(f"{spec!r} is not a simulatable driver or model")
    return PathEnsemble(driver=driver, time_grid=np.asarray(grid, dtype=float),
                        n_paths=int(n_paths), seed=int(seed), n_workers=int(n_workers))


# ---------------------------------------------------------------------------
# Monte Carlo estimators


@dataclass(frozen=True)
class McResult:
    estimate: float
    std_error: float
    n_paths: int


def _state_at(values: np.ndarray, idx: int):
    """Path states at a grid index: (n,) for scalar drivers, (n, d) for vector ones."""
    return values[:, idx] if values.ndim == 2 else values[:, idx, :]


def mc_price(model, ensemble: PathEnsemble, T: float, block_size: int = 20_000) -> McResult:
    """Sample mean of A_T / A_0 across paths: consistent estimator of P(0, T).

    Per-block sums are aggregated with numpy's pairwise reduction, so totals
    do not depend on how paths are chunked.
    """
    idx = ensemble.grid_index(T)
    a0 = model.state_price_density(model.initial_state, 0.0)
    ratios = []
    for _, block in ensemble.iter_blocks(block_size):
        a_t = model.state_price_density(_state_at(block, idx), float(T))
        ratios.append(np.asarray(a_t, dtype=float) / a0)
    r = np.concatenate(ratios)
    n = r.size
    est = float(np.sum(r)) / n
    se = 0.0 if n < 2 else float(np.std(r, ddof=1)) / math.sqrt(n)
    return McResult(est, se, n)


def mc_floating_leg(model, ensemble: PathEnsemble, grid: TenorGrid, n: int,
                    h: float = 1e-6, block_size: int = 20_000) -> McResult:
    """Monte Carlo value of the floating leg sum_i E[D(T_i) delta_i Lbar(T_{i-1}, T_i)].

    The compounded overnight rate of each period uses the trapezoidal integral
    of the finite-difference short rate along the simulation grid; discounting
    weights each payment by A_{T_i} / A_0 (risk-neutral expectation by change
    of numeraire). By telescoping, the estimate is consistent for
    P(0, T_0) - P(0, T_n).
    """
    if n < 1:
        raise DomainError("mc_floating_leg requires n >= 1")
    tenor_dates = [grid.date(i) for i in range(n + 1)]
    tenor_idx = [ensemble.grid_index(d) for d in tenor_dates]
    times = ensemble.time_grid
    dts = np.diff(times)
    a0 = model.state_price_density(model.initial_state, 0.0)

    values = []
    for _, block in ensemble.iter_blocks(block_size):
        rates = model.short_rates(block, times, h)  # (n_block, n_times)
        # cumulative trapezoid of r along the grid
        seg = 0.5 * (rates[:, :-1] + rates[:, 1:]) * dts
        integral = np.concatenate(
            [np.zeros((seg.shape[0], 1)), np.cumsum(seg, axis=1)], axis=1
        )
        leg = np.zeros(seg.shape[0])
        for i in range(1, n + 1):
            j_prev, j_i = tenor_idx[i - 1], tenor_idx[i]
            growth = np.exp(integral[:, j_i] - integral[:, j_prev]) - 1.0
            a_i = model.state_price_density(_state_at(block, j_i), float(tenor_dates[i]))
            leg += (np.asarray(a_i, dtype=float) / a0) * growth
        values.append(leg)
    v = np.concatenate(values)
    n_obs = v.size
    est = float(np.sum(v)) / n_obs
    se = 0.0 if n_obs < 2 else float(np.std(v, ddof=1)) / math.sqrt(n_obs)
    return McResult(est, se, n_obs)
