"""Curve abstraction and finite-horizon rate operations."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from longrates import (
    Curve,
    DomainError,
    FlatCurve,
    ShortRatePath,
    SyntheticCurve,
    TenorGrid,
    annuity,
    compounded_overnight,
    ois_par_rate,
    short_rate_fd,
    spot_simple,
    spot_yield,
)


class FrozenPriceCurve(Curve):
    """Test helper returning a fixed discount factor everywhere off the diagonal."""

    def __init__(self, price):
        self._p = price

    def _price(self, t, T):
        t, T = np.broadcast_arrays(np.asarray(t, float), np.asarray(T, float))
        return np.where(T > t, self._p, 1.0)


# --- structural invariants ------------------------------------------------


def test_price_unit_at_maturity_and_positive(base_curves, rng):
    for name, curve in base_curves.items():
        ts = rng.uniform(0.0, 30.0, size=200)
        assert np.max(np.abs(np.asarray(curve.price(ts, ts)) - 1.0)) <= 1e-14, name
        Ts = ts + rng.uniform(0.0, 50.0, size=200)
        p = np.asarray(curve.price(ts, Ts))
        assert np.all(p > 0.0) and np.all(np.isfinite(p)), name


def test_price_domain_errors(base_curves):
    curve = base_curves["flat"]
    with pytest.raises(DomainError):
        curve.price(2.0, 1.0)
    with pytest.raises(DomainError):
        curve.price(-0.5, 1.0)


# --- spot yield -----------------------------------------------------------


def test_spot_yield_flat_identity():
    assert spot_yield(FlatCurve(0.02), 0.0, 5.0) == pytest.approx(0.02, abs=1e-15)


def test_spot_yield_fh_long_maturity(fh_curve):
    # oracle: direct evaluation of the deflator-ratio bond formula and the log
    expected = -math.log((math.exp(-2.0) + math.exp(-5.0)) / 2.0) / 100.0
    assert expected == pytest.approx(0.026445598289862027, abs=1e-15)
    assert spot_yield(fh_curve, 0.0, 100.0) == pytest.approx(expected, rel=1e-13)


@settings(max_examples=200, deadline=None)
@given(
    rate=st.floats(-0.05, 0.15),
    t=st.floats(0.0, 50.0),
    dt=st.floats(1e-3, 80.0),
)
def test_spot_yield_round_trip(rate, t, dt):
    curve = FlatCurve(rate)
    y = spot_yield(curve, t, t + dt)
    assert math.exp(-dt * y) == pytest.approx(curve.price(t, t + dt), rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(a=st.floats(0.0, 0.95), lam=st.floats(0.05, 3.0), dt=st.floats(1e-3, 60.0))
def test_spot_yield_round_trip_synthetic(a, lam, dt):
    curve = SyntheticCurve(a, lam)
    y = spot_yield(curve, 1.0, 1.0 + dt)
    assert math.exp(-dt * y) == pytest.approx(curve.price(1.0, 1.0 + dt), rel=1e-12)


def test_spot_yield_requires_t_lt_T(fh_curve):
    with pytest.raises(DomainError):
        spot_yield(fh_curve, 3.0, 3.0)


# --- simple rate ----------------------------------------------------------


def test_spot_simple_unit_bond():
    assert spot_simple(FlatCurve(0.0), 0.0, 7.0) == 0.0


def test_spot_simple_flat():
    # oracle: (e^{0.5} - 1) / 10
    assert spot_simple(FlatCurve(0.05), 0.0, 10.0) == pytest.approx(
        0.06487212707001282, abs=1e-15
    )


def test_spot_simple_fixed_price():
    # oracle: (1/0.9 - 1) / 2
    assert spot_simple(FrozenPriceCurve(0.9), 0.0, 2.0) == pytest.approx(
        0.05555555555555558, abs=1e-14
    )


def test_spot_simple_lower_bound(base_curves):
    for curve in base_curves.values():
        for t, T in [(0.0, 3.0), (1.0, 11.0), (2.5, 60.0)]:
            assert spot_simple(curve, t, T) > -1.0 / (T - t)


# --- short rate -----------------------------------------------------------


@pytest.mark.parametrize("h", [1e-4, 1e-6, 1e-8])
def test_short_rate_flat(h):
    assert short_rate_fd(FlatCurve(0.037), 2.0, h) == pytest.approx(0.037, abs=1e-7)


def test_short_rate_fh(fh_curve):
    # analytic maturity-derivative of the deflator ratio: (0.02 + 0.05)/2 at t=0
    assert short_rate_fd(fh_curve, 0.0) == pytest.approx(0.035, abs=1e-8)


def test_short_rate_lr_at_level(lr_model):
    assert short_rate_fd(lr_model.curve([0.5]), 0.0) == pytest.approx(
        lr_model.alpha, abs=1e-8
    )


def test_short_rate_requires_positive_bump(fh_curve):
    with pytest.raises(DomainError):
        short_rate_fd(fh_curve, 0.0, h=0.0)


# --- annuity --------------------------------------------------------------


def test_annuity_empty(unit_grid):
    assert annuity(FlatCurve(0.05), 0.0, unit_grid, 0) == 0.0


def test_annuity_flat_two_terms(unit_grid):
    # oracle: e^{-0.05} + e^{-0.10}
    assert annuity(FlatCurve(0.05), 0.0, unit_grid, 2) == pytest.approx(
        1.8560668425366735, abs=1e-14
    )


def test_annuity_fh_approaches_limit(fh_curve, unit_grid):
    # oracle: geometric sums 1/(e^alpha - 1) + 1/(e^beta - 1), halved
    limit = 0.5 * (1.0 / math.expm1(0.02) + 1.0 / math.expm1(0.05))
    assert limit == pytest.approx(34.502916574310774, abs=1e-12)
    assert annuity(fh_curve, 0.0, unit_grid, 2500) == pytest.approx(limit, abs=1e-10)


def test_annuity_monotone_in_n(base_curves, unit_grid):
    for curve in base_curves.values():
        values = [annuity(curve, 0.0, unit_grid, n) for n in range(0, 40, 5)]
        assert all(b > a for a, b in zip(values, values[1:]))


def test_annuity_respects_first_date(unit_grid):
    with pytest.raises(DomainError):
        annuity(FlatCurve(0.05), 1.5, unit_grid, 3)


# --- OIS par rate ---------------------------------------------------------


def test_ois_single_period_equals_simple(base_curves, unit_grid):
    for curve in base_curves.values():
        assert ois_par_rate(curve, 0.0, unit_grid, 1) == pytest.approx(
            spot_simple(curve, 0.0, 1.0), rel=1e-13
        )


def test_ois_flat_telescopes(unit_grid):
    # oracle: telescoping collapses the par rate to (e^{r delta} - 1)/delta
    expected = math.expm1(0.05)
    for n in range(1, 201):
        assert abs(ois_par_rate(FlatCurve(0.05), 0.0, unit_grid, n) - expected) <= 1e-12


def test_ois_exploding_limit(unit_grid):
    # oracle: the geometric sum makes the rate n-independent at e^{-lam} - 1
    from longrates import ExplodingCurve

    expected = math.exp(-0.1) - 1.0
    assert expected == pytest.approx(-0.09516258196404048, abs=1e-15)
    for n in (1, 10, 400):
        assert ois_par_rate(ExplodingCurve(0.1), 0.0, unit_grid, n) == pytest.approx(
            expected, abs=1e-11
        )


def test_ois_requires_positive_n(unit_grid):
    with pytest.raises(DomainError):
        ois_par_rate(FlatCurve(0.05), 0.0, unit_grid, 0)


# --- compounded overnight rate ---------------------------------------------


def test_compounded_overnight_zero_rate():
    path = ShortRatePath((0.0, 1.0), (0.0,))
    assert compounded_overnight(path, 0.0, 1.0) == 0.0


def test_compounded_overnight_constant():
    path = ShortRatePath((0.0, 0.5, 1.0), (0.05, 0.05))
    assert compounded_overnight(path, 0.0, 1.0) == pytest.approx(
        0.05127109637602412, abs=1e-15
    )


def test_compounded_overnight_piecewise():
    # oracle: exact integral 0.02*0.5 + 0.04*0.5 = 0.03
    path = ShortRatePath((0.0, 0.5, 1.0), (0.02, 0.04))
    assert compounded_overnight(path, 0.0, 1.0) == pytest.approx(
        0.030454533953516938, abs=1e-15
    )


def test_compounded_overnight_partial_interval():
    path = ShortRatePath((0.0, 0.5, 1.0), (0.02, 0.04))
    # integral over [0.25, 0.75] = 0.02*0.25 + 0.04*0.25 = 0.015
    assert compounded_overnight(path, 0.25, 0.75) == pytest.approx(
        math.expm1(0.015) / 0.5, rel=1e-14
    )


def test_compounded_overnight_coverage():
    path = ShortRatePath((0.0, 1.0), (0.05,))
    with pytest.raises(DomainError):
        compounded_overnight(path, 0.0, 1.5)
    with pytest.raises(DomainError):
        compounded_overnight(path, 0.5, 0.5)


def test_short_rate_path_validation():
    with pytest.raises(DomainError):
        ShortRatePath((0.0, 0.0), (0.05,))
    with pytest.raises(DomainError):
        ShortRatePath((0.0, 1.0), (0.05, 0.01))
    with pytest.raises(DomainError):
        ShortRatePath((0.0, 1.0), (math.inf,))


# --- tenor grid -----------------------------------------------------------


def test_tenor_grid_uniform():
    grid = TenorGrid.uniform(0.0, 0.5)
    assert grid.date(0) == 0.0
    assert grid.date(4) == 2.0
    assert grid.n_max is None
    np.testing.assert_allclose(grid.dates_upto(3), [0.5, 1.0, 1.5])
    np.testing.assert_allclose(grid.deltas_upto(3), [0.5, 0.5, 0.5])


def test_tenor_grid_explicit():
    grid = TenorGrid.from_dates([0.0, 1.0, 2.5, 3.5])
    assert grid.n_max == 3
    np.testing.assert_allclose(grid.deltas_upto(3), [1.0, 1.5, 1.0])
    with pytest.raises(DomainError):
        grid.date(4)


def test_tenor_grid_validation():
    with pytest.raises(DomainError):
        TenorGrid.uniform(0.0, 0.0)
    with pytest.raises(DomainError):
        TenorGrid.from_dates([0.0, 1.0, 1.0])
    with pytest.raises(DomainError):
        TenorGrid.from_dates([0.0, 1.0, 2.0], c=1.5, C=3.0)
