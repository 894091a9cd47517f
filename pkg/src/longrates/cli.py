"""Command-line front end: experiment orchestration and CSV emission.

Every output file starts with a timestamp comment (excluded from
reproducibility comparisons) followed by a comment embedding the config hash
and seed; re-running a command with the same config and seed reproduces the
CSV body byte for byte. Numbers render with 17 significant digits.

Exit codes: 0 success; 2 configuration/schema violation (field-level message
on stderr); 3 a result classified Undetermined (diagnostic on stderr);
1 anything else.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys
from datetime import datetime, timezone

import numpy as np

from .config import (
    build_curve,
    build_grid,
    build_horizon_config,
    build_model,
    config_hash,
    load_config,
)
from .curves import Curve, spot_simple, spot_yield, ois_par_rate
from .errors import ConfigError, DomainError, ModelError, QuadratureError
from .longterm import (
    LongTermClass,
    fh_exponential_closed_forms,
    lr_closed_forms,
)
from .models import mc_floating_leg, mc_price, simulate_paths
from .regimes import SwapPortfolio, arbitrage_payoffs, classify_curve, draw_corpus, table_check
from .ucp import fh_annuity_ensembles, fh_annuity_n_star, ucp_convergence_prob

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CONFIG = 2
EXIT_UNDETERMINED = 3

_G = "{:.17g}".format


def _out_path(args, cfg: dict, command: str) -> str:
    if args.out:
        return args.out
    out_cfg = cfg.get("output", {})
    directory = out_cfg.get("dir") or os.environ.get("LONGRATES_OUT", ".")
    prefix = out_cfg.get("prefix", "")
    os.makedirs(directory, exist_ok=True)
    return os.path.join(directory, f"{prefix}{command}.csv")


def _write_csv(path: str, cfg: dict, seed, header, rows, comments=()):
    digest = config_hash(cfg)
    with open(path, "w", newline="") as fh:
        fh.write(f"# generated_at={datetime.now(timezone.utc).isoformat()}\n")
        fh.write(f"# config_sha256={digest} seed={seed}\n")
        for line in comments:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    return path


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return _G(value)
    return str(value)


def _mc_block(cfg: dict) -> dict:
    mc = cfg.get("mc", {})
    return {
        "n_paths": mc.get("n_paths", 100_000),
        "seed": mc.get("seed", 12345),
        "time_step": mc.get("time_step", 1.0 / 250.0),
        "n_workers": mc.get("n_workers", 1),
    }


def cmd_price(args) -> int:
    cfg = load_config(args.config)
    curve = build_curve(cfg["model"])
    if args.maturity < args.t:
        raise DomainError("price requires t <= T")
    value = curve.price(args.t, args.maturity)
    print(_G(float(value)))
    if args.out:
        _write_csv(args.out, cfg, "-", ["t", "T", "price"],
                   [[_G(args.t), _G(args.maturity), _G(float(value))]])
    return EXIT_OK


def cmd_rates(args) -> int:
    cfg = load_config(args.config)
    curve = build_curve(cfg["model"])
    grid = build_grid(cfg)
    n_top = args.n or (grid.n_max or 30)
    rows = []
    for n in range(1, n_top + 1):
        T = grid.date(n)
        rows.append([
            n, _G(T),
            _G(spot_yield(curve, 0.0, T)),
            _G(spot_simple(curve, 0.0, T)),
            _G(ois_par_rate(curve, 0.0, grid, n)),
        ])
    path = _write_csv(_out_path(args, cfg, "rates"), cfg, "-",
                      ["n", "maturity", "yield", "simple", "ois_par"], rows)
    print(f"wrote {path}")
    return EXIT_OK


def cmd_longterm(args) -> int:
    cfg = load_config(args.config)
    curve = build_curve(cfg["model"])
    grid = build_grid(cfg)
    horizon = build_horizon_config(cfg)
    report = classify_curve(curve, horizon, t=0.0, grid=grid)
    closed = _closed_form_swap_rate(cfg["model"])
    rows = []
    for name, cv in (("ell", report.ell), ("long_bond", report.long_bond),
                     ("swap", report.swap), ("simple", report.simple)):
        ref = closed if name == "swap" else None
        diff = (abs(cv.value - ref) if (ref is not None and cv.value is not None) else None)
        rows.append([name, _fmt(cv.value), cv.cls.value, _fmt(ref), _fmt(diff)])
    path = _write_csv(_out_path(args, cfg, "longterm"), cfg, "-",
                      ["quantity", "value", "class", "closed_form", "abs_diff"], rows)
    print(f"wrote {path}")
    undetermined = [
        name for name, cv in (("ell", report.ell), ("long_bond", report.long_bond),
                              ("swap", report.swap), ("simple", report.simple))
        if cv.cls is LongTermClass.UNDETERMINED
    ]
    if undetermined:
        print(f"undetermined quantities: {', '.join(undetermined)} "
              f"(horizon ladder or tenor budget too small)", file=sys.stderr)
        return EXIT_UNDETERMINED
    return EXIT_OK


def _closed_form_swap_rate(model_cfg: dict):
    family = model_cfg["family"]
    if family == "flat":
        return math.expm1(model_cfg["rate"])  # unit tenor telescoping
    if family == "fh_exponential":
        return fh_exponential_closed_forms(
            model_cfg["alpha"], model_cfg["beta"], 1.0, model_cfg.get("m", 1.0), 0.0
        ).swap_rate
    if family == "linear_rational":
        model = build_model(model_cfg)
        x = model_cfg.get("x") or model.x0
        forms = lr_closed_forms(model, x, 0.0, 1.0)
        return forms.swap_rate if forms.converged else 0.0
    return None


def cmd_mc_check(args) -> int:
    cfg = load_config(args.config)
    family = cfg["model"]["family"]
    if family not in ("fh_exponential", "fh_tabulated", "fh_integral", "linear_rational"):
        raise ConfigError(
            f"config field 'model/family': '{family}' is not simulatable", field="model/family")
    model = build_model(cfg["model"])
    mc = _mc_block(cfg)
    grid_cfg = build_grid(cfg)
    n_leg = args.leg_n
    horizon = grid_cfg.date(n_leg)
    # align the simulation grid so every tenor date lands on it
    delta = grid_cfg.date(1) - grid_cfg.date(0)
    per_period = max(1, round(delta / mc["time_step"]))
    n_steps = per_period * n_leg
    sim_grid = np.linspace(0.0, horizon, n_steps + 1)
    ensemble = simulate_paths(model, sim_grid, mc["n_paths"], mc["seed"], mc["n_workers"])

    state0 = model.initial_state
    rows = []
    T_price = args.T if args.T is not None else grid_cfg.date(1)
    price_res = mc_price(model, ensemble, T_price)
    price_target = model.bond_price(state0, 0.0, T_price)
    z1 = (0.0 if price_res.std_error == 0.0
          else (price_res.estimate - price_target) / price_res.std_error)
    rows.append(["price", _G(T_price), _G(price_res.estimate), _G(price_res.std_error),
                 _G(price_target), _G(z1), str(abs(z1) <= 3.0)])
    leg_res = mc_floating_leg(model, ensemble, grid_cfg, n_leg)
    leg_target = (model.bond_price(state0, 0.0, grid_cfg.date(0))
                  - model.bond_price(state0, 0.0, grid_cfg.date(n_leg)))
    z2 = 0.0 if leg_res.std_error == 0.0 else (leg_res.estimate - leg_target) / leg_res.std_error
    rows.append(["floating_leg", _G(horizon), _G(leg_res.estimate), _G(leg_res.std_error),
                 _G(leg_target), _G(z2), str(abs(z2) <= 3.0)])
    path = _write_csv(_out_path(args, cfg, "mc-check"), cfg, mc["seed"],
                      ["check", "T", "estimate", "std_error", "target", "z", "within_3se"],
                      rows)
    print(f"wrote {path}")
    if not (abs(z1) <= 3.0 and abs(z2) <= 3.0):
        print("mc-check outside 3 standard errors", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK


def cmd_ucp(args) -> int:
    cfg = load_config(args.config)
    if cfg["model"]["family"] != "fh_exponential":
        raise ConfigError("config field 'model/family': the ucp lab runs on the "
                          "fh_exponential family", field="model/family")
    model = build_model(cfg["model"])
    ucp_cfg = cfg.get("ucp", {})
    delta = cfg.get("grid", {}).get("delta", 1.0)
    epsilon = ucp_cfg.get("epsilon", 1e-3)
    t_horizon = ucp_cfg.get("t_horizon", 1.0)
    grid_step = ucp_cfg.get("grid_step", 1.0 / 50.0)
    n_paths = ucp_cfg.get("n_paths", 10_000)
    seed = ucp_cfg.get("seed", 2024)
    n_star = fh_annuity_n_star(model, delta, epsilon, t_horizon)
    n_list = ucp_cfg.get("n_list") or sorted({1, 2, 5, 10, 20, 50, 100, 200, 350, 500,
                                              n_star, n_star + 50})
    ensembles, target, _ = fh_annuity_ensembles(
        model, delta, n_list, t_horizon, grid_step, n_paths, seed)
    rows = []
    for n in sorted(ensembles):
        est = ucp_convergence_prob(ensembles[n], target, epsilon, t_horizon, n)
        rows.append([est.n, _G(est.threshold), _G(est.probability),
                     _G(est.ci_low), _G(est.ci_high), est.n_samples])
    path = _write_csv(_out_path(args, cfg, "ucp"), cfg, seed,
                      ["n", "epsilon_or_M", "probability", "ci_low", "ci_high", "n_samples"],
                      rows, comments=[f"n_star={n_star}"])
    print(f"wrote {path}")
    return EXIT_OK


def cmd_regimes(args) -> int:
    cfg = load_config(args.config) if args.config else {"model": {"family": "flat", "rate": 0.05}}
    reg_cfg = cfg.get("regimes", {})
    n_per_family = reg_cfg.get("n_per_family", 10)
    seed = reg_cfg.get("seed", 7)
    horizon = build_horizon_config(cfg)
    rows = []
    failures = 0
    for family, params, curve in draw_corpus(n_per_family, seed):
        report = classify_curve(curve, horizon)
        verdicts = table_check(report)
        failures += sum(1 for v in verdicts if v.status == "fail")
        by_name = {v.table: v for v in verdicts}
        rows.append([
            family,
            ";".join(f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}"
                     for k, v in params.items()),
            report.ell.cls.value, report.long_bond.cls.value,
            report.swap.cls.value, report.simple.cls.value,
            by_name["yield"].render(), by_name["swap"].render(), by_name["simple"].render(),
        ])
    path = _write_csv(_out_path(args, cfg, "regimes"), cfg, seed,
                      ["family", "params", "ell_class", "bond_class", "swap_class",
                       "simple_class", "table1", "table2", "table3"], rows)
    print(f"wrote {path}")
    if failures:
        print(f"{failures} table violations", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK


def cmd_arbitrage(args) -> int:
    portfolio = SwapPortfolio(
        t=args.t, s=args.s, rate_t=args.rt, rate_s=args.rs,
        delta=args.delta, notional=args.notional, m=args.m,
        orientation=args.orientation,
    )
    payoffs = arbitrage_payoffs(portfolio, seed=args.seed)
    for p in payoffs:
        print(_G(float(p)))
    if args.out:
        cfg = {"arbitrage": {"t": args.t, "s": args.s, "rt": args.rt, "rs": args.rs,
                             "delta": args.delta, "notional": args.notional, "m": args.m,
                             "orientation": args.orientation}}
        _write_csv(args.out, cfg, args.seed, ["i", "payoff"],
                   [[i + 1, _G(float(p))] for i, p in enumerate(payoffs)])
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="longrates",
        description="term-structure analytics: rates, long-horizon limits, "
                    "Monte Carlo checks, convergence lab",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, needs_config=True):
        p = sub.add_parser(name)
        if needs_config:
            p.add_argument("--config", required=(name != "regimes"),
                           help="JSON experiment configuration")
        p.add_argument("--out", help="output CSV path (default from config/output or $LONGRATES_OUT)")
        p.set_defaults(fn=fn)
        return p

    p = add("price", cmd_price)
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--maturity", "--T", dest="maturity", type=float, required=True)

    p = add("rates", cmd_rates)
    p.add_argument("--n", type=int, default=None, help="number of tenor dates (default 30)")

    add("longterm", cmd_longterm)

    p = add("mc-check", cmd_mc_check)
    p.add_argument("--T", type=float, default=None, help="price check maturity (default T_1)")
    p.add_argument("--leg-n", type=int, default=4, help="floating-leg exchanges")

    add("ucp", cmd_ucp)
    add("regimes", cmd_regimes)

    p = add("arbitrage", cmd_arbitrage, needs_config=False)
    p.add_argument("--rt", type=float, required=True, help="perpetual swap rate at entry t")
    p.add_argument("--rs", type=float, required=True, help="perpetual swap rate at entry s")
    p.add_argument("--delta", type=float, default=1.0)
    p.add_argument("--notional", type=float, default=100.0)
    p.add_argument("--m", type=int, default=10)
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--s", type=float, default=0.5)
    p.add_argument("--orientation", default="payer_then_receiver",
                   choices=["payer_then_receiver", "receiver_then_payer"])
    p.add_argument("--seed", type=int, default=0)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DomainError, ModelError, QuadratureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
