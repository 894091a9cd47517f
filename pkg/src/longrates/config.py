"""Experiment configuration: schema validation, model/curve construction, hashing.

Configurations are single JSON documents validated against the shipped schema
(config_schema.json) before any computation; unknown keys are rejected and
violations name the offending field. The canonical sha256 of the document is
embedded in every output for reproducibility.
"""

from __future__ import annotations

import hashlib
import json
from importlib import resources

import jsonschema

from .curves import Curve, ExplodingCurve, FlatCurve, PowerCurve, SyntheticCurve, TenorGrid
from .errors import ConfigError
from .longterm import HorizonConfig
from .models import (
    FHIntegralModel,
    FHRationalModel,
    GbmMartingale,
    LinearRationalModel,
    PhiExponential,
    SigmaConstant,
    SigmaTwoLevel,
    TabulatedDecay,
)

__all__ = [
    "load_config",
    "validate_config",
    "config_hash",
    "build_model",
    "build_curve",
    "build_grid",
    "build_horizon_config",
]

_SCHEMA = json.loads(
    resources.files("longrates").joinpath("config_schema.json").read_text()
)

_FAMILY_FIELDS = {
    "flat": {"rate"},
    "synthetic": {"a", "lam"},
    "exploding": {"lam"},
    "power": {"maturity", "delta"},
    "fh_exponential": {"alpha", "beta", "sigma", "m"},
    "fh_tabulated": {"knots", "f_values", "g_values", "f_tail_rate", "g_tail_rate",
                     "sigma", "m"},
    "fh_integral": {"alpha", "sigma", "sigma_far", "sigma_break", "w"},
    "linear_rational": {"k", "theta", "phi", "psi", "lo", "hi", "sigma_vec", "x0", "x"},
}

_FAMILY_REQUIRED = {
    "flat": {"rate"},
    "synthetic": {"a", "lam"},
    "exploding": {"lam"},
    "power": {"maturity"},
    "fh_exponential": {"alpha", "beta"},
    "fh_tabulated": {"knots", "f_values", "g_values"},
    "fh_integral": {"alpha"},
    "linear_rational": {"k", "theta", "phi", "psi", "lo", "hi", "sigma_vec"},
}


def validate_config(cfg: dict) -> dict:
    """Schema-validate a configuration dict; returns it unchanged on success."""
    validator = jsonschema.Draft202012Validator(_SCHEMA)
    errors = sorted(validator.iter_errors(cfg), key=lambda e: len(e.absolute_path))
    if errors:
        err = errors[-1]
        field = "/".join(str(p) for p in err.absolute_path) or "<root>"
        raise ConfigError(f"config field '{field}': {err.message}", field=field)
    model = cfg["model"]
    family = model["family"]
    allowed = _FAMILY_FIELDS[family] | {"family"}
    extra = set(model) - allowed
    if extra:
        field = f"model/{sorted(extra)[0]}"
        raise ConfigError(
            f"config field '{field}': not a parameter of family '{family}'", field=field
        )
    missing = _FAMILY_REQUIRED[family] - set(model)
    if missing:
        field = f"model/{sorted(missing)[0]}"
        raise ConfigError(
            f"config field '{field}': required for family '{family}'", field=field
        )
    return cfg


def load_config(path) -> dict:
    """Read and validate a JSON configuration file."""
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}", field="<document>") from exc
    return validate_config(cfg)


def config_hash(cfg: dict) -> str:
    """sha256 of the canonical (sorted, compact) JSON rendering."""
    canon = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def build_model(model_cfg: dict):
    """Instantiate the model (or curve, for the curve-only families)."""
    family = model_cfg["family"]
    if family == "flat":
        return FlatCurve(model_cfg["rate"])
    if family == "synthetic":
        return SyntheticCurve(model_cfg["a"], model_cfg["lam"])
    if family == "exploding":
        return ExplodingCurve(model_cfg["lam"])
    if family == "power":
        return PowerCurve(model_cfg["maturity"], model_cfg.get("delta", 1.0))
    if family == "fh_exponential":
        return FHRationalModel.exponential(
            model_cfg["alpha"], model_cfg["beta"], model_cfg.get("sigma", 0.2)
        )
    if family == "fh_tabulated":
        f = TabulatedDecay(tuple(model_cfg["knots"]), tuple(model_cfg["f_values"]),
                           model_cfg.get("f_tail_rate"))
        g = TabulatedDecay(tuple(model_cfg["knots"]), tuple(model_cfg["g_values"]),
                           model_cfg.get("g_tail_rate"))
        return FHRationalModel(f=f, g=g,
                               driver=GbmMartingale(sigma=model_cfg.get("sigma", 0.2)))
    if family == "fh_integral":
        if "sigma_far" in model_cfg or "sigma_break" in model_cfg:
            if not {"sigma", "sigma_far", "sigma_break"} <= set(model_cfg):
                raise ConfigError(
                    "config field 'model/sigma_break': two-level sigma needs "
                    "sigma, sigma_far and sigma_break", field="model/sigma_break")
            sig = SigmaTwoLevel(model_cfg["sigma"], model_cfg["sigma_far"],
                                model_cfg["sigma_break"])
        else:
            sig = SigmaConstant(model_cfg.get("sigma", 0.0))
        return FHIntegralModel(phi=PhiExponential(model_cfg["alpha"]), sigma=sig)
    if family == "linear_rational":
        return LinearRationalModel(
            k=model_cfg["k"], theta=model_cfg["theta"], phi=model_cfg["phi"],
            psi=model_cfg["psi"], lo=model_cfg["lo"], hi=model_cfg["hi"],
            sigma=model_cfg["sigma_vec"], x0=model_cfg.get("x0"),
        )
    raise ConfigError(f"unknown model family '{family}'", field="model/family")


def build_curve(model_cfg: dict) -> Curve:
    """Curve view of the configured model at its configured (or initial) state."""
    obj = build_model(model_cfg)
    if isinstance(obj, Curve):
        return obj
    family = model_cfg["family"]
    if family in ("fh_exponential", "fh_tabulated"):
        return obj.curve(model_cfg.get("m", 1.0))
    if family == "fh_integral":
        return obj.curve(model_cfg.get("w", 0.0))
    if family == "linear_rational":
        return obj.curve(model_cfg.get("x"))
    raise ConfigError(f"family '{family}' has no curve view", field="model/family")


def build_grid(cfg: dict, t: float = 0.0) -> TenorGrid:
    grid_cfg = cfg.get("grid", {})
    if "dates" in grid_cfg:
        return TenorGrid.from_dates(grid_cfg["dates"])
    return TenorGrid.uniform(t, grid_cfg.get("delta", 1.0))


def build_horizon_config(cfg: dict) -> HorizonConfig:
    tol = cfg.get("tolerances", {})
    kwargs = {}
    if "horizons" in cfg:
        kwargs["horizons"] = tuple(cfg["horizons"])
    if "sum_tol" in tol:
        kwargs["sum_tol"] = tol["sum_tol"]
    if "class_tol" in tol:
        kwargs["class_tol"] = tol["class_tol"]
    if "extrap_tol" in tol:
        kwargs["extrap_tol"] = tol["extrap_tol"]
    if "grid" in cfg and "n_max" in cfg["grid"]:
        kwargs["n_max"] = cfg["grid"]["n_max"]
    return HorizonConfig(**kwargs)
