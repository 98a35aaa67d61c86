"""Command-line interface: scenario generation, estimation/rate evaluation,
rate-region tracing, figure reproduction, and the validation suite.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from mimocoex.estimation import nmse_curve
from mimocoex.harness import (
    ExperimentSpec,
    _write_csv,
    _ratepoint_rows,
    rates_table,
    run_experiment,
    validation_report,
)
from mimocoex.pilots import make_random_assignment_book, make_wbe_book
from mimocoex.powerctl import (
    max_human_rate,
    sci_data_powers,
    sci_pilot_powers,
    trace_rate_region,
)
from mimocoex.rates import OPA, SC1, SC2, SC3, SchemeConfig, asymptotic_sinr_machine
from mimocoex.scenario import SystemParams, load_scenario, place_devices, save_scenario

_BOOK_MAP = {"wbe": "wbe", "rpa": "random", "random": "random"}


def _add_param_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--m", type=int, default=100, help="BS antennas")
    p.add_argument("--n", type=int, default=100, help="coherence interval length")
    p.add_argument("--k-h", type=int, default=5, help="number of humans")
    p.add_argument("--k-m", type=int, default=45, help="number of machines")
    p.add_argument("--cell-radius", type=float, default=250.0)
    p.add_argument("--d-min", type=float, default=20.0)
    p.add_argument("--noise-power", type=float, default=2e-13)
    p.add_argument("--q-max", type=float, default=1.0)
    p.add_argument("--p-max", type=float, default=1.0)


def _params_from(args) -> SystemParams:
    return SystemParams(
        M=args.m, N=args.n, K_h=args.k_h, K_m=args.k_m,
        cell_radius_m=args.cell_radius, d_min_m=args.d_min,
        noise_power_w=args.noise_power, q_max_w=args.q_max, p_max_w=args.p_max,
        rng_seed=args.seed,
    )


def _scenario_from(args):
    if getattr(args, "config", None):
        return load_scenario(args.config)
    return place_devices(_params_from(args))


def _parse_grid(text: str) -> list[float]:
    if ":" in text:
        start, stop, step = (float(x) for x in text.split(":"))
        return list(np.arange(start, stop + step / 2, step))
    return [float(x) for x in text.split(",")]


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="mimocoex",
        description="Uplink simulator for joint human/machine massive MIMO multiplexing",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("generate-scenario", help="drop devices and write a scenario file")
    _add_param_flags(p_gen)
    p_gen.add_argument("--seed", type=int, default=1)
    p_gen.add_argument("--out", default="scenario.json")

    p_nmse = sub.add_parser("nmse", help="Monte-Carlo channel-estimation error vs SNR")
    p_nmse.add_argument("--k-m", type=int, default=20)
    p_nmse.add_argument("--n-p", type=int, default=10)
    p_nmse.add_argument("--m", type=int, default=50)
    p_nmse.add_argument("--book", choices=sorted(_BOOK_MAP), default="wbe")
    p_nmse.add_argument("--estimator", choices=("ls", "lmmse"), default="lmmse")
    p_nmse.add_argument("--snr", default="-10:40:5", help="dB grid, start:stop:step or list")
    p_nmse.add_argument("--trials", type=int, default=10_000)
    p_nmse.add_argument("--seed", type=int, default=1)
    p_nmse.add_argument("--out", default="nmse.csv")

    p_rates = sub.add_parser("rates", help="closed-form per-device SINR/rate table")
    _add_param_flags(p_rates)
    p_rates.add_argument("--config", help="scenario file (overrides parameter flags)")
    p_rates.add_argument("--scheme", choices=(SC1, SC2, SC3), default=SC2)
    p_rates.add_argument("--receiver", choices=("mrc", "zf"), default="mrc")
    p_rates.add_argument("--book", choices=sorted(_BOOK_MAP), default="wbe")
    p_rates.add_argument("--n-p-h", type=int, default=None)
    p_rates.add_argument("--n-p-m", type=int, default=10)
    p_rates.add_argument("--alpha", type=float, default=0.5)
    p_rates.add_argument("--data-power", choices=("sci", "max"), default="sci")
    p_rates.add_argument("--seed", type=int, default=1)
    p_rates.add_argument("--out", default="rates.csv")

    p_region = sub.add_parser("rate-region", help="trace a max-min rate-region frontier")
    _add_param_flags(p_region)
    p_region.add_argument("--config", help="scenario file (overrides parameter flags)")
    p_region.add_argument("--scheme", choices=(SC1, SC2, SC3, OPA), default=SC2)
    p_region.add_argument("--receiver", choices=("mrc", "zf"), default="mrc")
    p_region.add_argument("--book", choices=sorted(_BOOK_MAP), default="wbe")
    p_region.add_argument("--points", type=int, default=10)
    p_region.add_argument("--r-h-max", type=float, default=None)
    p_region.add_argument("--n-p-m-step", type=int, default=4)
    p_region.add_argument("--group-size", type=int, default=9)
    p_region.add_argument("--seed", type=int, default=1)
    p_region.add_argument("--out", default="rate_region.csv")

    p_asym = sub.add_parser("asymptotic", help="machine SINR limits for growing antenna count")
    _add_param_flags(p_asym)
    p_asym.add_argument("--config", help="scenario file (overrides parameter flags)")
    p_asym.add_argument("--book", choices=sorted(_BOOK_MAP), default="wbe")
    p_asym.add_argument("--n-p-m", type=int, default=10)
    p_asym.add_argument("--seed", type=int, default=1)
    p_asym.add_argument("--out", default="asymptotic.csv")

    p_fig = sub.add_parser("figure", help="reproduce one figure's data files")
    p_fig.add_argument("id", choices=[f"fig{i}" for i in range(1, 8)])
    p_fig.add_argument("--trials", type=int, default=10_000)
    p_fig.add_argument("--seed", type=int, default=1)
    p_fig.add_argument("--out", default="mimocoex_out")
    p_fig.add_argument("--points", type=int, default=10)
    p_fig.add_argument("--n-p-m-step", type=int, default=4)

    p_val = sub.add_parser("validate", help="run the invariant/acceptance report")
    p_val.add_argument("--full", action="store_true", help="full-strength Monte-Carlo sizes")
    p_val.add_argument("--seed", type=int, default=7)

    args = parser.parse_args(argv)

    if args.command == "generate-scenario":
        scenario = place_devices(_params_from(args))
        save_scenario(scenario, args.out)
        print(f"wrote {args.out} ({scenario.params.K} devices)")
        return 0

    if args.command == "nmse":
        rows = nmse_curve(args.k_m, args.n_p, args.m, _BOOK_MAP[args.book],
                          args.estimator, _parse_grid(args.snr), args.trials, args.seed)
        _write_csv(Path(args.out), rows, {
            "command": "nmse", "seed": args.seed,
            "snr_definition": "per pilot symbol, q*beta/sigma^2 with beta=1",
        })
        print(f"wrote {args.out} ({len(rows)} rows)")
        return 0

    if args.command == "rates":
        scenario = _scenario_from(args)
        params = scenario.params
        n_p_h = args.n_p_h if args.n_p_h is not None else params.K_h
        scheme = SchemeConfig(scheme=args.scheme, N=params.N, n_p_h=n_p_h,
                              n_p_m=args.n_p_m, alpha=args.alpha, receiver=args.receiver)
        kind = _BOOK_MAP[args.book]
        book = make_wbe_book(args.n_p_m, params.K_m) if kind == "wbe" \
            else make_random_assignment_book(args.n_p_m, params.K_m, args.seed)
        q = sci_pilot_powers(scenario)
        p = sci_data_powers(scenario) if args.data_power == "sci" \
            else np.full(params.K, params.p_max_w)
        rows = rates_table(scenario, scheme, book, q, p)
        _write_csv(Path(args.out), rows, {
            "command": "rates", "seed": args.seed, "book": kind,
            "data_power": args.data_power,
            "pilot_power": "SCI machines, max humans",
        })
        print(f"wrote {args.out} ({len(rows)} rows)")
        return 0

    if args.command == "rate-region":
        scenario = _scenario_from(args)
        params = scenario.params
        kind = _BOOK_MAP[args.book]
        scheme = SchemeConfig(
            scheme=args.scheme, N=params.N, n_p_h=params.K_h, n_p_m=1,
            receiver=args.receiver,
            group_size=args.group_size if args.scheme == OPA else None,
        )
        q = sci_pilot_powers(scenario)
        r_h_max = args.r_h_max
        if r_h_max is None:
            r_h_max = 0.95 * max_human_rate(scenario, scheme, q)
        grid = np.linspace(0.0, r_h_max, args.points)
        hi = min(params.K_m, params.N - params.K_h - 1)
        npm_grid = sorted(set(list(range(1, hi + 1, args.n_p_m_step)) + [hi]))
        points = trace_rate_region(scenario, scheme, q, grid, book_kind=kind,
                                   n_p_m_grid=npm_grid)
        rows = _ratepoint_rows(points, kind, params.M)
        _write_csv(Path(args.out), rows, {
            "command": "rate-region", "seed": args.seed, "book": kind,
            "n_p_m_grid": npm_grid,
            "pilot_powers": "SCI for machines, max for humans (fixed)",
            "data_powers": "max-min optimized",
            "sc3_rate_inversion": "both-phases conservative",
        })
        print(f"wrote {args.out} ({len(rows)} rows)")
        return 0

    if args.command == "asymptotic":
        scenario = _scenario_from(args)
        params = scenario.params
        kind = _BOOK_MAP[args.book]
        book = make_wbe_book(args.n_p_m, params.K_m) if kind == "wbe" \
            else make_random_assignment_book(args.n_p_m, params.K_m, args.seed)
        q = sci_pilot_powers(scenario)
        p = sci_data_powers(scenario)
        rows = []
        for scheme_name in (SC1, SC2, SC3):
            cfg = SchemeConfig(scheme=scheme_name, N=params.N, n_p_h=params.K_h,
                               n_p_m=args.n_p_m)
            for dev in range(params.K_h, params.K):
                rows.append({
                    "scheme": scheme_name, "device_id": dev, "N_p_m": args.n_p_m,
                    "book": kind,
                    "sinr_limit": asymptotic_sinr_machine(dev, scenario, cfg, book, q, p),
                })
        _write_csv(Path(args.out), rows, {"command": "asymptotic", "seed": args.seed,
                                          "powers": "SCI pilot and data"})
        print(f"wrote {args.out} ({len(rows)} rows)")
        return 0

    if args.command == "figure":
        spec = ExperimentSpec(figure=args.id, trials=args.trials, seed=args.seed,
                              out_dir=args.out,
                              options={"points": args.points,
                                       "n_p_m_step": args.n_p_m_step})
        paths = run_experiment(spec)
        for path in paths:
            print(f"wrote {path}")
        return 0

    if args.command == "validate":
        report, ok = validation_report(fast=not args.full, seed=args.seed)
        print(report)
        return 0 if ok else 1

    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
