import numpy as np
import pytest

from longrates import (
    ExplodingCurve,
    FHIntegralModel,
    FHRationalModel,
    FlatCurve,
    LinearRationalModel,
    PhiExponential,
    PowerCurve,
    SyntheticCurve,
    TenorGrid,
)


@pytest.fixture(scope="session")
def fh_model():
    return FHRationalModel.exponential(0.02, 0.05, sigma=0.2)


@pytest.fixture(scope="session")
def fh_curve(fh_model):
    return fh_model.curve(1.0)


@pytest.fixture(scope="session")
def fhi_model():
    return FHIntegralModel(phi=PhiExponential(0.03))


@pytest.fixture(scope="session")
def lr_model():
    return LinearRationalModel(
        k=0.1, theta=[0.5], phi=1.0, psi=[1.0], lo=[0.0], hi=[1.0], sigma=[0.05]
    )


@pytest.fixture(scope="session")
def unit_grid():
    return TenorGrid.uniform(0.0, 1.0)


@pytest.fixture(scope="session")
def base_curves(fh_curve, fhi_model, lr_model):
    """Well-behaved curves satisfying the maturity-unit identity (PowerCurve excluded)."""
    return {
        "flat": FlatCurve(0.05),
        "synthetic": SyntheticCurve(0.5, 1.0),
        "exploding": ExplodingCurve(0.1),
        "fh": fh_curve,
        "fh_integral": fhi_model.curve(0.0),
        "linear_rational": lr_model.curve([0.5]),
    }


@pytest.fixture(scope="session")
def power_curve():
    return PowerCurve(2.0)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240901)
