"""Regime tables, the curve classifier, and the constant-or-nothing swap argument.

Three consistency tables encode how the class of one long-horizon limit
constrains the others (given the long-bond class):

* yield table    -- a vanishing yield with a finite positive long bond forces
                    swap and simple rates to 0; a positive or exploding yield
                    forces a positive finite swap rate and an exploding simple rate.
* swap table     -- the three-way partition of the (always finite) swap rate:
                    zero, positive, negative, each pinning the bond class and
                    bounding the yield and simple rate.
* simple table   -- a finite simple rate caps the swap rate at 0 (exactly 0
                    when the long bond stays finite); an exploding simple rate
                    forces a positive swap rate.

A failed check names the violated constraint. An Undetermined class in a
row's given slots, an unmatched row, or an Undetermined implied slot yields a
`not_covered` verdict, which is deliberately distinct from failure so that
finite-horizon threshold artifacts never masquerade as structural violations.

The arbitrage construction makes the non-monotonicity of the perpetual swap
rate executable: entering offsetting payer/receiver perpetual swaps at two
dates locks in per-exchange payoffs delta * N * (R_s - R_t) in which every
floating-rate term cancels exactly, whatever the realized overnight path.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .curves import Curve, ExplodingCurve, FlatCurve, PowerCurve, SyntheticCurve, TenorGrid
from .errors import DomainError, ModelError
from .longterm import (
    DEFAULT_HORIZON,
    HorizonConfig,
    LongTermClass,
    LongTermReport,
    long_bond,
    long_term_simple,
    long_term_swap_rate,
    long_term_yield,
)
from .models import (
    FHIntegralModel,
    FHRationalModel,
    LinearRationalModel,
    PhiExponential,
    TabulatedDecay,
)

__all__ = [
    "RegimeRow",
    "TableVerdict",
    "YIELD_TABLE",
    "SWAP_TABLE",
    "SIMPLE_TABLE",
    "classify_curve",
    "table_check",
    "SwapPortfolio",
    "arbitrage_payoffs",
    "reference_corpus",
    "draw_corpus",
    "write_regimes_csv",
]

_Z = LongTermClass.ZERO
_FP = LongTermClass.FINITE_POSITIVE
_FN = LongTermClass.FINITE_NEGATIVE
_PI = LongTermClass.PLUS_INFINITY

#: class sets for inequality conclusions
NONPOSITIVE = frozenset({_Z, _FN})             # "<= 0"
NONNEG_FINITE = frozenset({_Z, _FP})           # "0 <= . < +inf"
NONNEG_ANY = frozenset({_Z, _FP, _PI})         # "0 <= . <= +inf" (vacuous, kept for fidelity)
POSITIVE_ANY = frozenset({_FP, _PI})           # "0 < . <= +inf"
NONNEG_OR_INF = frozenset({_Z, _FP, _PI})      # ">= 0"


@dataclass(frozen=True)
class RegimeRow:
    """One table row: `given` slots identify the row, `implied` slots must hold."""

    name: str
    given: dict[str, frozenset[LongTermClass]]
    implied: dict[str, frozenset[LongTermClass]]


YIELD_TABLE: tuple[RegimeRow, ...] = (
    RegimeRow(
        "yield zero, bond finite positive",
        given={"yield": frozenset({_Z}), "long_bond": frozenset({_FP})},
        implied={"swap": frozenset({_Z}), "simple": frozenset({_Z})},
    ),
    RegimeRow(
        "yield finite positive, bond zero",
        given={"yield": frozenset({_FP}), "long_bond": frozenset({_Z})},
        implied={"swap": frozenset({_FP}), "simple": frozenset({_PI})},
    ),
    RegimeRow(
        "yield exploding, bond zero",
        given={"yield": frozenset({_PI}), "long_bond": frozenset({_Z})},
        implied={"swap": frozenset({_FP}), "simple": frozenset({_PI})},
    ),
)

SWAP_TABLE: tuple[RegimeRow, ...] = (
    RegimeRow(
        "swap zero, bond finite",
        given={"swap": frozenset({_Z}), "long_bond": NONNEG_FINITE},
        implied={"yield": NONPOSITIVE, "simple": NONNEG_ANY},
    ),
    RegimeRow(
        "swap finite positive, bond zero",
        given={"swap": frozenset({_FP}), "long_bond": frozenset({_Z})},
        implied={"yield": NONNEG_OR_INF, "simple": POSITIVE_ANY},
    ),
    RegimeRow(
        "swap finite negative, bond exploding",
        given={"swap": frozenset({_FN}), "long_bond": frozenset({_PI})},
        implied={"yield": NONPOSITIVE, "simple": frozenset({_Z})},
    ),
)

SIMPLE_TABLE: tuple[RegimeRow, ...] = (
    RegimeRow(
        "simple finite, bond finite",
        given={"simple": NONNEG_FINITE, "long_bond": NONNEG_FINITE},
        implied={"yield": NONPOSITIVE, "swap": frozenset({_Z})},
    ),
    RegimeRow(
        "simple finite, bond exploding",
        given={"simple": NONNEG_FINITE, "long_bond": frozenset({_PI})},
        implied={"yield": NONPOSITIVE, "swap": NONPOSITIVE},
    ),
    RegimeRow(
        "simple exploding, bond zero",
        given={"simple": frozenset({_PI}), "long_bond": frozenset({_Z})},
        implied={"yield": NONNEG_OR_INF, "swap": frozenset({_FP})},
    ),
)

TABLES = {"yield": YIELD_TABLE, "swap": SWAP_TABLE, "simple": SIMPLE_TABLE}


def classify_curve(curve: Curve, config: HorizonConfig = DEFAULT_HORIZON,
                   t: float = 0.0, grid: TenorGrid | None = None) -> LongTermReport:
    """Assemble the four-limit report for a curve with one shared horizon config."""
    grid = grid if grid is not None else TenorGrid.uniform(t, 1.0)
    return LongTermReport(
        ell=long_term_yield(curve, t, None, config),
        long_bond=long_bond(curve, t, None, config),
        swap=long_term_swap_rate(curve, t, grid, config.sum_tol, config.n_max, config),
        simple=long_term_simple(curve, t, None, config),
        horizon_used=config.horizons[-1],
    )


@dataclass(frozen=True)
class TableVerdict:
    table: str
    row: str | None
    status: str  # "pass" | "fail" | "not_covered"
    violation: str | None = None

    def render(self) -> str:
        if self.status == "fail":
            return f"fail:{self.violation}"
        return self.status


def _report_classes(report: LongTermReport) -> dict[str, LongTermClass]:
    return {
        "yield": report.ell.cls,
        "swap": report.swap.cls,
        "simple": report.simple.cls,
        "long_bond": report.long_bond.cls,
    }


def table_check(report: LongTermReport) -> list[TableVerdict]:
    """Find each table's matching row and verify its implied constraint sets."""
    classes = _report_classes(report)
    verdicts = []
    for table_name, rows in TABLES.items():
        if any(classes[k] is LongTermClass.UNDETERMINED for k in rows[0].given):
            verdicts.append(TableVerdict(table_name, None, "not_covered",
                                         "given slot undetermined"))
            continue
        match = next(
            (row for row in rows if all(classes[k] in row.given[k] for k in row.given)),
            None,
        )
        if match is None:
            verdicts.append(TableVerdict(table_name, None, "not_covered", "no matching row"))
            continue
        violated = None
        unverifiable = False
        for key, allowed in match.implied.items():
            got = classes[key]
            if got is LongTermClass.UNDETERMINED:
                unverifiable = True
            elif got not in allowed:
                wanted = "|".join(sorted(c.value for c in allowed))
                violated = f"{key} must be {wanted}, got {got.value}"
                break
        if violated is not None:
            verdicts.append(TableVerdict(table_name, match.name, "fail", violated))
        elif unverifiable:
            verdicts.append(TableVerdict(table_name, match.name, "not_covered",
                                         "implied slot undetermined"))
        else:
            verdicts.append(TableVerdict(table_name, match.name, "pass"))
    return verdicts


# ---------------------------------------------------------------------------
# the two-date perpetual swap construction


@dataclass(frozen=True)
class SwapPortfolio:
    """Offsetting perpetual swaps entered at t and s > t on a shared tenor.

    orientation 'payer_then_receiver' pays fixed rate_t from t and receives
    fixed rate_s from s; 'receiver_then_payer' is the mirrored pair used when
    the earlier rate dominates.
    """

    t: float
    s: float
    rate_t: float
    rate_s: float
    delta: float
    notional: float
    m: int
    orientation: str = "payer_then_receiver"

    def __post_init__(self):
        if not self.t < self.s:
            raise DomainError("entry times must satisfy t < s")
        if self.delta <= 0.0 or self.notional <= 0.0:
            raise DomainError("delta and notional must be positive")
        if self.m < 1:
            raise DomainError("need at least one exchange")
        if self.orientation not in ("payer_then_receiver", "receiver_then_payer"):
            raise DomainError("unknown orientation")


def arbitrage_payoffs(portfolio: SwapPortfolio, floating_rates=None, seed: int = 0,
                      tol: float = 1e-12) -> np.ndarray:
    """Per-exchange payoffs of the offsetting swap pair.

    Each exchange pays (Lbar - rate_t) delta N on one leg and (rate_s - Lbar)
    delta N on the other, so the floating rate cancels and every payoff equals
    +/- delta N (rate_s - rate_t) regardless of the realized overnight path.
    The cancellation is recomputed leg-by-leg against an injected (or seeded
    arbitrary) floating path and enforced to `tol` times the notional scale.
    """
    p = portfolio
    if floating_rates is None:
        rng = np.random.default_rng(seed)
        floating_rates = rng.uniform(-0.05, 0.15, size=p.m)
    lbar = np.asarray(floating_rates, dtype=float)
    if lbar.shape != (p.m,):
        raise DomainError(f"need exactly {p.m} floating rates")
    scale = p.delta * p.notional
    if p.orientation == "payer_then_receiver":
        leg_early = (lbar - p.rate_t) * scale
        leg_late = (p.rate_s - lbar) * scale
        direct = scale * (p.rate_s - p.rate_t)
    else:
        leg_early = (p.rate_t - lbar) * scale
        leg_late = (lbar - p.rate_s) * scale
        direct = scale * (p.rate_t - p.rate_s)
    payoffs = leg_early + leg_late
    drift = float(np.max(np.abs(payoffs - direct)))
    if drift > tol * max(1.0, abs(scale)):
        raise ModelError(f"floating legs failed to cancel: residual {drift:.3e}")
    return payoffs


# ---------------------------------------------------------------------------
# curve corpus


def _tabulated_pair(rate_f: float, rate_g: float, jitter: float = 0.0, rng=None):
    knots = (0.0, 2.0, 5.0, 10.0, 20.0)
    if rng is not None and jitter > 0.0:
        bumps_f = np.concatenate([[0.0], np.cumsum(rng.uniform(0.0, jitter, len(knots) - 1))])
        bumps_g = np.concatenate([[0.0], np.cumsum(rng.uniform(0.0, jitter, len(knots) - 1))])
    else:
        bumps_f = bumps_g = np.zeros(len(knots))
    f_vals = tuple(math.exp(-rate_f * k - b) for k, b in zip(knots, bumps_f))
    g_vals = tuple(math.exp(-rate_g * k - b) for k, b in zip(knots, bumps_g))
    return (TabulatedDecay(knots, f_vals, tail_rate=rate_f),
            TabulatedDecay(knots, g_vals, tail_rate=rate_g))


def reference_corpus() -> dict[str, tuple[dict, Curve]]:
    """The eight built-in curve families at their canonical parameters."""
    f_tab, g_tab = _tabulated_pair(0.02, 0.05)
    return {
        "flat": ({"rate": 0.05}, FlatCurve(0.05)),
        "synthetic": ({"a": 0.5, "lam": 1.0}, SyntheticCurve(0.5, 1.0)),
        "exploding": ({"lam": 0.1}, ExplodingCurve(0.1)),
        "power": ({"maturity": 2.0}, PowerCurve(2.0)),
        "fh_exponential": (
            {"alpha": 0.02, "beta": 0.05, "m": 1.0},
            FHRationalModel.exponential(0.02, 0.05).curve(1.0),
        ),
        "fh_tabulated": (
            {"rate_f": 0.02, "rate_g": 0.05, "m": 1.0},
            FHRationalModel(f=f_tab, g=g_tab).curve(1.0),
        ),
        "fh_integral": (
            {"alpha": 0.03},
            FHIntegralModel(phi=PhiExponential(0.03)).curve(0.0),
        ),
        "linear_rational": (
            {"k": 0.1, "theta": 0.5, "phi": 1.0, "psi": 1.0, "x": 0.5},
            LinearRationalModel(k=0.1, theta=[0.5], phi=1.0, psi=[1.0],
                                lo=[0.0], hi=[1.0], sigma=[0.05]).curve([0.5]),
        ),
    }


def draw_corpus(n_per_family: int, seed: int = 0) -> list[tuple[str, dict, Curve]]:
    """Admissible random parameter draws for every family (seeded, reproducible).

    Ranges keep each family inside the horizon ladder's resolving power
    (decay rates >= 0.01/yr, box states away from positivity boundaries) so
    classifications stay determinate.
    """
    rng = np.random.default_rng(seed)
    out: list[tuple[str, dict, Curve]] = []
    for _ in range(n_per_family):
        r = float(rng.uniform(0.01, 0.08))
        out.append(("flat", {"rate": r}, FlatCurve(r)))

        a = float(rng.uniform(0.05, 0.9))
        lam = float(rng.uniform(0.2, 2.0))
        out.append(("synthetic", {"a": a, "lam": lam}, SyntheticCurve(a, lam)))

        lam_x = float(rng.uniform(0.01, 0.15))
        out.append(("exploding", {"lam": lam_x}, ExplodingCurve(lam_x)))

        mat = float(rng.uniform(1.5, 3.0))
        out.append(("power", {"maturity": mat}, PowerCurve(mat)))

        alpha = float(rng.uniform(0.01, 0.05))
        beta = alpha + float(rng.uniform(0.005, 0.05))
        m = float(rng.uniform(0.25, 4.0))
        out.append((
            "fh_exponential", {"alpha": alpha, "beta": beta, "m": m},
            FHRationalModel.exponential(alpha, beta).curve(m),
        ))

        rate_f = float(rng.uniform(0.01, 0.04))
        rate_g = rate_f + float(rng.uniform(0.01, 0.04))
        f_tab, g_tab = _tabulated_pair(rate_f, rate_g, jitter=0.05, rng=rng)
        mt = float(rng.uniform(0.5, 2.0))
        out.append((
            "fh_tabulated", {"rate_f": rate_f, "rate_g": rate_g, "m": mt},
            FHRationalModel(f=f_tab, g=g_tab).curve(mt),
        ))

        alpha_i = float(rng.uniform(0.01, 0.06))
        out.append((
            "fh_integral", {"alpha": alpha_i},
            FHIntegralModel(phi=PhiExponential(alpha_i)).curve(0.0),
        ))

        k = float(rng.uniform(0.08, 0.5))
        theta = float(rng.uniform(0.25, 0.8))
        psi = float(rng.uniform(0.5, 2.0))
        x = float(rng.uniform(0.1, 0.9))
        model = LinearRationalModel(k=k, theta=[theta], phi=1.0, psi=[psi],
                                    lo=[0.0], hi=[1.0], sigma=[0.05])
        out.append((
            "linear_rational",
            {"k": k, "theta": theta, "phi": 1.0, "psi": psi, "x": x},
            model.curve([x]),
        ))
    return out


def write_regimes_csv(rows, path) -> None:
    """CSV rows: family, params, the four classes, and one verdict per table."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([
            "family", "params", "ell_class", "bond_class", "swap_class",
            "simple_class", "table1", "table2", "table3",
        ])
        for family, params, report, verdicts in rows:
            by_name = {v.table: v for v in verdicts}
            writer.writerow([
                family,
                ";".join(f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}"
                         for k, v in params.items()),
                report.ell.cls.value,
                report.long_bond.cls.value,
                report.swap.cls.value,
                report.simple.cls.value,
                by_name["yield"].render(),
                by_name["swap"].render(),
                by_name["simple"].render(),
            ])
