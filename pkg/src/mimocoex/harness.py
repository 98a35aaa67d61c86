"""Experiment runner: binds scenarios, schemes, books, and solvers into
reproducible figure-generation jobs with seeded RNG and CSV + metadata output.

Outputs are data files only (CSV plus a JSON sidecar carrying the complete
parameter set); plotting is left to external tooling. Reruns of the same spec
produce bitwise-identical files.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from mimocoex import __version__
from mimocoex.estimation import nmse_curve
from mimocoex.pilots import (
    gram_stats,
    make_orthogonal_book,
    make_random_assignment_book,
    make_wbe_book,
    min_power_vector,
    closed_form_power,
    error_floor,
    welch_lower_bound,
    InfeasibleError,
    PilotBook,
)
from mimocoex.powerctl import (
    RatePoint,
    _CommonTargetBisector,
    _default_n_p_m_grid,
    _sinr_upper_bound,
    max_human_rate,
    maxmin_feasible,
    sci_pilot_powers,
    sci_data_powers,
    trace_opa_region,
    trace_rate_region,
    verify_targets,
)
from mimocoex.rates import (
    MRC,
    OPA,
    SC1,
    SC2,
    SC3,
    ZF,
    SchemeConfig,
    SinrEngine,
    asymptotic_sinr_machine,
    mc_sinr_all,
    sinr_mrc,
    sinr_zf_human,
)
from mimocoex.scenario import HUMAN, Scenario, SystemParams, place_devices

BOOK_KINDS = ("wbe", "random")


@dataclass(frozen=True)
class ExperimentSpec:
    """One reproducible figure-generation job."""

    figure: str                       # fig1..fig7 | custom
    params: SystemParams = SystemParams()
    scenario_file: str | None = None  # replay an explicit device table
    trials: int = 10_000
    out_dir: str = "mimocoex_out"
    seed: int = 1
    options: dict = field(default_factory=dict)


def _write_csv(path: Path, rows: list[dict], meta: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    if not rows:
        raise ValueError(f"no rows to write for {path}")
    fields = list(rows[0].keys())
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
    sidecar = dict(meta)
    sidecar["version"] = __version__
    sidecar["columns"] = fields
    Path(str(path) + ".meta.json").write_text(json.dumps(sidecar, indent=2, sort_keys=True) + "\n")


def _get_scenario(spec: ExperimentSpec, params: SystemParams) -> Scenario:
    if spec.scenario_file:
        from mimocoex.scenario import load_scenario

        return load_scenario(spec.scenario_file)
    return place_devices(params)


def rates_table(scenario: Scenario, scheme: SchemeConfig, book: PilotBook | None,
                q: np.ndarray, p: np.ndarray) -> list[dict]:
    """Per-device closed-form SINR breakdown rows (one row per SINR phase)."""
    params = scenario.params
    rows = []
    for dev in range(params.K):
        if scheme.receiver == ZF and scenario.is_human(dev):
            bd = sinr_zf_human(dev, scenario, scheme, q, p)
        else:
            bd = sinr_mrc(dev, scenario, scheme, book, q, p)
        for phase, term in enumerate(bd.terms):
            rows.append({
                "scheme": scheme.scheme,
                "receiver": bd.receiver,
                "device_id": dev,
                "class": bd.device_class,
                "M": params.M,
                "N": scheme.N,
                "N_p_h": scheme.n_p_h,
                "N_p_m": scheme.n_p_m,
                "alpha": scheme.alpha if scheme.scheme == SC1 else "",
                "phase": phase,
                "gamma": bd.gamma,
                "prelog": term.prelog,
                "sinr_linear": term.sinr,
                "rate_bpshz": bd.rate_bpshz,
                "signal": term.signal,
                "intra_interference": term.intra_interference,
                "cross_interference": term.cross_interference,
                "coherent_intra": term.coherent_intra,
                "coherent_cross": term.coherent_cross,
                "noise": term.noise,
            })
    return rows


def _ratepoint_rows(points: list[RatePoint], book_kind: str, m: int) -> list[dict]:
    return [{
        "scheme": pt.scheme,
        "receiver": pt.receiver,
        "book": book_kind,
        "M": m,
        "R_h_target": pt.r_h_target,
        "R_m": pt.r_m,
        "feasible": int(pt.feasible),
        "N_p_m_opt": pt.n_p_m if pt.n_p_m is not None else "",
        "alpha_opt": pt.alpha if pt.alpha is not None else "",
        "solver_iterations": pt.iterations,
    } for pt in points]


def _machine_min_rate(scenario: Scenario, scheme: SchemeConfig, book: PilotBook,
                      q: np.ndarray, p: np.ndarray) -> float:
    engine = SinrEngine(scenario, scheme, book, q)
    sinr = engine.sinr(p)[0, scenario.params.K_h:]
    prelog = scheme.prelogs("machine")[0]
    return prelog * float(np.min(np.log2(1.0 + sinr)))


def _fig1(spec: ExperimentSpec) -> tuple[list[dict], dict]:
    opts = spec.options
    k_m = opts.get("k_m", 20)
    n_p = opts.get("n_p", 10)
    m = opts.get("m", 50)
    snr_grid = opts.get("snr_db_grid", list(range(-10, 45, 5)))
    rows = []
    for estimator in ("lmmse", "ls"):
        for book_kind in BOOK_KINDS:
            rows += nmse_curve(k_m, n_p, m, book_kind, estimator, snr_grid,
                               spec.trials, spec.seed)
    meta = {"figure": "fig1", "K_m": k_m, "N_p": n_p, "M": m, "trials": spec.trials,
            "seed": spec.seed, "snr_definition": "per pilot symbol, q*beta/sigma^2 with beta=1",
            "powers": "equal q across devices set by the SNR axis"}
    return rows, meta


def _fig2(spec: ExperimentSpec) -> tuple[list[dict], dict]:
    opts = spec.options
    m = opts.get("m", 500)
    n = opts.get("n", 250)
    k_m_cases = opts.get("k_m_cases", (45, 90))
    rows = []
    base = spec.params
    for k_m in k_m_cases:
        params = replace(base, M=m, N=n, K_h=0, K_m=k_m, rng_seed=spec.seed)
        scenario = place_devices(params)
        q = sci_pilot_powers(scenario)
        p = sci_data_powers(scenario)
        for book_kind in BOOK_KINDS:
            for n_p_m in range(1, k_m + 1):
                cfg = SchemeConfig(scheme=SC1, N=n, n_p_h=0, n_p_m=n_p_m, alpha=0.0)
                book = make_wbe_book(n_p_m, k_m) if book_kind == "wbe" \
                    else make_random_assignment_book(n_p_m, k_m, spec.seed)
                engine = SinrEngine(scenario, cfg, book, q)
                sinr = engine.sinr(p)[0]
                prelog = cfg.prelogs("machine")[0]
                rates = prelog * np.log2(1.0 + sinr)
                rows.append({
                    "K_m": k_m, "book": book_kind, "N_p_m": n_p_m, "M": m, "N": n,
                    "rate_min": float(np.min(rates)),
                    "rate_mean": float(np.mean(rates)),
                })
    meta = {"figure": "fig2", "M": m, "N": n, "K_m_cases": list(k_m_cases),
            "seed": spec.seed, "scheme": "sc1 machines-only (alpha=0)",
            "powers": "SCI pilot and data powers", "rate": "closed-form MRC machine rate"}
    return rows, meta


def _fig3(spec: ExperimentSpec) -> tuple[list[dict], dict]:
    opts = spec.options
    n = opts.get("n", 100)
    m_grid = opts.get("m_grid", (10, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10000))
    alpha = opts.get("alpha", 0.5)
    base = replace(spec.params, N=n, rng_seed=spec.seed)
    rows = []
    for book_kind in BOOK_KINDS:
        for scheme_name in (SC1, SC2, SC3):
            # asymptotic rate limit: optimize the pilot length in the limit
            asym_best = 0.0
            for m in m_grid:
                params = replace(base, M=m)
                scenario = place_devices(params)
                q = sci_pilot_powers(scenario)
                p = sci_data_powers(scenario)
                best_rate, best_npm = 0.0, 1
                for n_p_m in range(1, min(params.K_m, n - params.K_h - 1) + 1):
                    cfg = SchemeConfig(scheme=scheme_name, N=n, n_p_h=params.K_h,
                                       n_p_m=n_p_m, alpha=alpha)
                    book = make_wbe_book(n_p_m, params.K_m) if book_kind == "wbe" \
                        else make_random_assignment_book(n_p_m, params.K_m, spec.seed)
                    r = _machine_min_rate(scenario, cfg, book, q, p)
                    if r > best_rate:
                        best_rate, best_npm = r, n_p_m
                    if m == m_grid[-1]:
                        prelog = cfg.prelogs("machine")[0]
                        g_inf = min(
                            asymptotic_sinr_machine(dev, scenario, cfg, book, q, p)
                            for dev in range(params.K_h, params.K)
                        )
                        asym_best = max(asym_best, prelog * math.log2(1.0 + g_inf))
                rows.append({
                    "scheme": scheme_name, "book": book_kind, "M": m,
                    "rate_min": best_rate, "N_p_m_opt": best_npm,
                    "asymptotic_rate": "",
                })
            rows.append({
                "scheme": scheme_name, "book": book_kind, "M": "inf",
                "rate_min": "", "N_p_m_opt": "", "asymptotic_rate": asym_best,
            })
    meta = {"figure": "fig3", "N": n, "M_grid": list(m_grid), "alpha_sc1": alpha,
            "seed": spec.seed, "powers": "SCI pilot and data powers",
            "rate": "min closed-form machine rate, pilot length grid-optimized per M"}
    return rows, meta


def _region_grid(scenario: Scenario, scheme: SchemeConfig, q: np.ndarray,
                 points: int, r_h_max: float | None) -> np.ndarray:
    if r_h_max is None:
        r_h_max = 0.95 * max_human_rate(scenario, scheme, q)
    return np.linspace(0.0, r_h_max, points)


def _fig_regions(spec: ExperimentSpec, m: int, combos: list[tuple[str, str, str]],
                 figure: str, group_size: int | None = None) -> tuple[list[dict], dict]:
    opts = spec.options
    n = opts.get("n", 100)
    points = opts.get("points", 10)
    npm_step = opts.get("n_p_m_step", 4)
    params = replace(spec.params, M=m, N=n, rng_seed=spec.seed)
    scenario = place_devices(params)
    q = sci_pilot_powers(scenario)
    rows = []
    for scheme_name, book_kind, receiver in combos:
        cfg = SchemeConfig(scheme=scheme_name, N=n, n_p_h=params.K_h, n_p_m=1,
                           receiver=receiver, group_size=group_size)
        grid = _region_grid(scenario, cfg, q, points, opts.get("r_h_max"))
        if scheme_name == OPA:
            pts = trace_opa_region(scenario, q, grid, group_size, n_p_h=params.K_h,
                                   receiver=receiver)
        else:
            hi = min(params.K_m, n - params.K_h - 1)
            npm_grid = sorted(set(list(range(1, hi + 1, npm_step)) + [hi]))
            pts = trace_rate_region(scenario, cfg, q, grid, book_kind=book_kind,
                                    n_p_m_grid=npm_grid)
        rows += _ratepoint_rows(pts, book_kind, m)
    meta = {"figure": figure, "M": m, "N": n, "seed": spec.seed, "points": points,
            "n_p_m_step": npm_step, "group_size": group_size,
            "pilot_powers": "SCI for machines, max for humans (fixed)",
            "data_powers": "max-min optimized",
            "sc3_rate_inversion": "both-phases conservative",
            "placement": "fixed per figure (one seed)"}
    return rows, meta


def run_experiment(spec: ExperimentSpec) -> list[Path]:
    """Run one figure job; returns the list of written files."""
    out_dir = Path(spec.out_dir)
    if spec.figure == "fig1":
        rows, meta = _fig1(spec)
    elif spec.figure == "fig2":
        rows, meta = _fig2(spec)
    elif spec.figure == "fig3":
        rows, meta = _fig3(spec)
    elif spec.figure == "fig4":
        combos = [(s, b, MRC) for s in (SC1, SC2, SC3) for b in BOOK_KINDS]
        rows, meta = _fig_regions(spec, spec.options.get("m", 100), combos, "fig4")
    elif spec.figure == "fig5":
        rows, meta = [], {}
        all_rows = []
        for m in spec.options.get("m_grid", (50, 100, 200, 400)):
            combos = [(s, "wbe", MRC) for s in (SC1, SC2, SC3)]
            r, meta = _fig_regions(spec, m, combos, "fig5")
            all_rows += r
        rows = all_rows
        meta["M_grid"] = list(spec.options.get("m_grid", (50, 100, 200, 400)))
    elif spec.figure == "fig6":
        m = spec.options.get("m", 200)
        combos = [(SC2, "wbe", MRC), (SC3, "wbe", MRC), (OPA, "wbe", MRC)]
        rows, meta = _fig_regions(spec, m, combos, "fig6",
                                  group_size=spec.options.get("group_size", 9))
    elif spec.figure == "fig7":
        m = spec.options.get("m", 200)
        combos = [(s, "wbe", r) for s in (SC1, SC2, SC3) for r in (MRC, ZF)]
        rows, meta = _fig_regions(spec, m, combos, "fig7")
    else:
        raise ValueError(f"unknown figure id {spec.figure!r}")
    meta["master_seed"] = spec.seed
    path = out_dir / f"{spec.figure}.csv"
    _write_csv(path, rows, meta)
    return [path, Path(str(path) + ".meta.json")]


# ---------------------------------------------------------------------------
# validation report
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    measured: float
    bound: float
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: measured={self.measured:.6g} bound={self.bound:.6g} {self.detail}"


def check_welch_equality(book: PilotBook, k_m: int, n_p: int) -> list[CheckResult]:
    """Welch-sum, row-sum, and spectral-radius equalities of one WBE-style book."""
    stats = gram_stats(book)
    target = k_m**2 / n_p
    rel_welch = abs(stats.welch_sum - target) / target
    rel_rows = float(np.max(np.abs(stats.row_sums - k_m / n_p))) / (k_m / n_p)
    rel_rho = abs(stats.spectral_radius - k_m / n_p) / (k_m / n_p)
    tag = f"(N_p={n_p}, K_m={k_m})"
    return [
        CheckResult(f"welch-sum {tag}", rel_welch < 1e-9, rel_welch, 1e-9),
        CheckResult(f"welch-row-sums {tag}", rel_rows < 1e-9, rel_rows, 1e-9),
        CheckResult(f"welch-spectral-radius {tag}", rel_rho < 1e-8, rel_rho, 1e-8),
    ]


def validate(fast: bool = True, seed: int = 7) -> list[CheckResult]:
    """Run the invariant suite and return one result per check.

    ``fast`` shrinks Monte-Carlo sizes so the report finishes in seconds; the
    full-strength equivalents live in the acceptance test module.
    """
    rng = np.random.default_rng(seed)
    checks: list[CheckResult] = []

    for n_p, k_m in ((5, 45), (10, 20), (10, 45), (20, 45)):
        checks += check_welch_equality(make_wbe_book(n_p, k_m), k_m, n_p)

    g = gram_stats(make_wbe_book(20, 20))
    dev = float(np.max(np.abs(g.phi_bar - np.eye(20))))
    checks.append(CheckResult("wbe-orthogonal-limit", dev < 1e-10, dev, 1e-10))

    trials = 1500 if fast else 10_000
    for estimator, floor in (("lmmse", 0.5), ("ls", 1.0)):
        row = nmse_curve(20, 10, 50, "wbe", estimator, [40.0], trials, seed)[0]
        rel = abs(row["nmse"] - floor) / floor
        checks.append(CheckResult(f"error-floor-{estimator}", rel < 0.03, rel, 0.03,
                                  f"nmse={row['nmse']:.4f} floor={floor}"))

    worst = 0.0
    consistent = True
    for _ in range(25 if fast else 100):
        n_p = int(rng.integers(2, 21))
        k_m = int(rng.integers(n_p, 41))
        betas = 10.0 ** rng.uniform(-12, -7, size=k_m)
        estimator = "ls" if rng.random() < 0.5 else "lmmse"
        stats = gram_stats(make_wbe_book(n_p, k_m))
        if estimator == "ls":
            boundary = k_m / n_p - 1.0
            e = boundary * (1.0 + rng.uniform(0.02, 2.0)) if boundary > 0 else rng.uniform(0.1, 2.0)
        else:
            boundary = (k_m - n_p) / k_m
            e = boundary + (1.0 - boundary) * rng.uniform(0.02, 0.9)
        q1 = min_power_vector(stats, betas, e, 2e-13, n_p, estimator)
        q2 = closed_form_power(betas, e, 2e-13, n_p, k_m, estimator)
        worst = max(worst, float(np.max(np.abs(q1 - q2) / q2)))
        e_bad = boundary * 0.5 if boundary > 0 else None
        if e_bad and estimator == "ls":
            try:
                min_power_vector(stats, betas, e_bad, 2e-13, n_p, estimator)
                consistent = False
            except InfeasibleError:
                pass
            try:
                closed_form_power(betas, e_bad, 2e-13, n_p, k_m, estimator)
                consistent = False
            except InfeasibleError:
                pass
    checks.append(CheckResult("power-formula-identity", worst < 1e-8, worst, 1e-8))
    checks.append(CheckResult("power-infeasible-consistency", consistent,
                              0.0 if consistent else 1.0, 0.5))

    # closed form vs MC oracle on a small deployment
    params = SystemParams(M=32, N=60, K_h=2, K_m=6, rng_seed=3)
    scenario = place_devices(params)
    q = sci_pilot_powers(scenario)
    p = np.full(params.K, params.p_max_w)
    mc_trials = 3000 if fast else 10_000
    worst = 0.0
    for scheme_name in (SC1, SC2, SC3):
        cfg = SchemeConfig(scheme=scheme_name, N=params.N, n_p_h=params.K_h, n_p_m=4)
        book = make_wbe_book(4, params.K_m)
        engine = SinrEngine(scenario, cfg, book, q)
        closed = engine.sinr(p)
        mc = mc_sinr_all(scenario, cfg, book, q, p, mc_trials, seed)
        worst = max(worst, float(np.max(np.abs(mc - closed) / closed)))
    tol = 0.06 if fast else 0.03
    checks.append(CheckResult("closed-form-vs-mc", worst < tol, worst, tol,
                              f"trials={mc_trials}, all schemes, all devices"))

    # asymptotics
    params_inf = SystemParams(M=100_000, N=100, K_h=5, K_m=45, rng_seed=3)
    scn_inf = place_devices(params_inf)
    q_inf = sci_pilot_powers(scn_inf)
    p_inf = sci_data_powers(scn_inf)
    book = make_wbe_book(10, 45)
    worst = 0.0
    sc12_gap = 0.0
    for scheme_name in (SC1, SC2, SC3):
        cfg = SchemeConfig(scheme=scheme_name, N=100, n_p_h=5, n_p_m=10)
        engine = SinrEngine(scn_inf, cfg, book, q_inf)
        g_closed = engine.sinr(p_inf)[0, 5:]
        g_inf = np.array([asymptotic_sinr_machine(d, scn_inf, cfg, book, q_inf, p_inf)
                          for d in range(5, 50)])
        worst = max(worst, float(np.max(np.abs(g_closed - g_inf) / g_inf)))
    g1 = np.array([asymptotic_sinr_machine(d, scn_inf,
                                           SchemeConfig(scheme=SC1, N=100, n_p_h=5, n_p_m=10),
                                           book, q_inf, p_inf) for d in range(5, 50)])
    g2 = np.array([asymptotic_sinr_machine(d, scn_inf,
                                           SchemeConfig(scheme=SC2, N=100, n_p_h=5, n_p_m=10),
                                           book, q_inf, p_inf) for d in range(5, 50)])
    sc12_gap = float(np.max(np.abs(g1 - g2) / g1))
    checks.append(CheckResult("asymptotic-limit-1pct", worst < 0.01, worst, 0.01))
    checks.append(CheckResult("asymptotic-sc1-sc2-identical", sc12_gap < 1e-12, sc12_gap, 1e-12))

    # ZF substitution identity
    params_z = SystemParams(M=64, N=80, K_h=4, K_m=12, rng_seed=5)
    scn_z = place_devices(params_z)
    q_z = sci_pilot_powers(scn_z)
    worst = 0.0
    for scheme_name in (SC1, SC2, SC3):
        cfg = SchemeConfig(scheme=scheme_name, N=80, n_p_h=4, n_p_m=6)
        book = make_wbe_book(6, 12)
        p_z = rng.uniform(0.05, 1.0, size=params_z.K)
        for dev in range(params_z.K_h):
            mrc_bd = sinr_mrc(dev, scn_z, cfg, book, q_z, p_z)
            zf_bd = sinr_zf_human(dev, scn_z, cfg, q_z, p_z)
            for t_m, t_z in zip(mrc_bd.terms, zf_bd.terms):
                damped = sum(p_z[j] * scn_z.betas[j]
                             * (1.0 - sinr_mrc(j, scn_z, cfg, book, q_z, p_z).gamma)
                             for j in range(params_z.K_h))
                expect = (params_z.M - params_z.K_h) / params_z.M * t_m.signal / (
                    damped + t_m.cross_interference + t_m.noise) * (
                    damped + t_z.cross_interference + t_z.noise)
                rel = abs(t_z.sinr - (params_z.M - params_z.K_h) / params_z.M
                          * t_m.signal / (damped + t_m.cross_interference + t_m.noise))
                worst = max(worst, rel / max(t_z.sinr, 1e-300))
    checks.append(CheckResult("zf-substitution-identity", worst < 1e-12, worst, 1e-12))

    # scheme reductions
    params_r = SystemParams(M=40, N=60, K_h=0, K_m=8, rng_seed=9)
    scn_r = place_devices(params_r)
    book_r = make_wbe_book(4, 8)
    q_r = sci_pilot_powers(scn_r)
    p_r = sci_data_powers(scn_r)
    g_sc1 = SinrEngine(scn_r, SchemeConfig(scheme=SC1, N=60, n_p_h=0, n_p_m=4, alpha=0.0),
                       book_r, q_r).sinr(p_r)
    g_sc2 = SinrEngine(scn_r, SchemeConfig(scheme=SC2, N=60, n_p_h=0, n_p_m=4),
                       book_r, q_r).sinr(p_r)
    red1 = float(np.max(np.abs(g_sc1 - g_sc2) / g_sc1))
    params_r3 = SystemParams(M=40, N=60, K_h=3, K_m=8, rng_seed=9)
    scn_r3 = place_devices(params_r3)
    q_r3 = sci_pilot_powers(scn_r3)
    p_r3 = sci_data_powers(scn_r3)
    p_r3[:3] = 0.0
    cfg_sc3 = SchemeConfig(scheme=SC3, N=60, n_p_h=3, n_p_m=4)
    cfg_sc1 = SchemeConfig(scheme=SC1, N=60, n_p_h=3, n_p_m=4, alpha=0.0)
    g3 = SinrEngine(scn_r3, cfg_sc3, book_r, q_r3).sinr(p_r3)[0, 3:]
    g1m = SinrEngine(scn_r3, cfg_sc1, book_r, q_r3).sinr(p_r3)[0, 3:]
    red2 = float(np.max(np.abs(g3 - g1m) / g1m))
    checks.append(CheckResult("reduction-sc2-to-sc1", red1 < 1e-12, red1, 1e-12))
    checks.append(CheckResult("reduction-sc3-to-sc1", red2 < 1e-12, red2, 1e-12))

    # RPA expectation
    draws = 20_000 if fast else 100_000
    n_p = 10
    hits = 0
    for i in range(draws):
        b = make_random_assignment_book(n_p, 2, seed=i)
        hits += int(abs(np.vdot(b.sequences[0], b.sequences[1])) ** 2 > 0.5)
    p_hat = hits / draws
    sigma = math.sqrt((1 / n_p) * (1 - 1 / n_p) / draws)
    dev_sigma = abs(p_hat - 1 / n_p) / sigma
    checks.append(CheckResult("rpa-collision-expectation", dev_sigma < 3.0, dev_sigma, 3.0,
                              f"mean={p_hat:.5f} target={1 / n_p}"))

    # solver contracts on a small case
    params_s = SystemParams(M=48, N=60, K_h=2, K_m=8, rng_seed=11)
    scn_s = place_devices(params_s)
    q_s = sci_pilot_powers(scn_s)
    cfg_s = SchemeConfig(scheme=SC2, N=60, n_p_h=2, n_p_m=4)
    book_s = make_wbe_book(4, 8)
    trace: list[np.ndarray] = []
    targets = np.full(params_s.K, 0.4)
    res = maxmin_feasible(targets, scn_s, cfg_s, book_s, q_s, trace=trace)
    mono = all(np.all(b >= a - 1e-15) for a, b in zip(trace, trace[1:]))
    checks.append(CheckResult("solver-monotone-iterates", mono and res.feasible,
                              0.0 if mono else 1.0, 0.5))
    engine_s = SinrEngine(scn_s, cfg_s, book_s, q_s)
    dev_t = verify_targets(engine_s, res.p, targets)
    checks.append(CheckResult("solver-target-verification", dev_t < 1e-6, dev_t, 1e-6))
    bis = _CommonTargetBisector(engine_s, np.zeros((2, params_s.K)),
                                np.arange(params_s.K) >= params_s.K_h, params_s.p_max_w)
    t_star, _, _ = bis.solve(_sinr_upper_bound(engine_s, np.arange(params_s.K) >= params_s.K_h,
                                               params_s.p_max_w))
    up = bis.probe(t_star * (1.0 + 1e-5), None)
    down = bis.probe(t_star, None)
    checks.append(CheckResult("solver-bisection-bracketing",
                              down.feasible and not up.feasible,
                              0.0 if down.feasible and not up.feasible else 1.0, 0.5,
                              f"t*={t_star:.6g}"))

    # frontier ordering on a small deployment
    params_f = SystemParams(M=64, N=40, K_h=2, K_m=10, rng_seed=13)
    scn_f = place_devices(params_f)
    q_f = sci_pilot_powers(scn_f)
    cfg_f = SchemeConfig(scheme=SC2, N=40, n_p_h=2, n_p_m=1)
    grid = _region_grid(scn_f, cfg_f, q_f, 4, None)
    npm_grid = [2, 4, 6, 8, 10]
    wbe_pts = trace_rate_region(scn_f, cfg_f, q_f, grid, book_kind="wbe", n_p_m_grid=npm_grid)
    rpa_pts = trace_rate_region(scn_f, cfg_f, q_f, grid, book_kind="random", n_p_m_grid=npm_grid)
    margin = float(min(w.r_m - r.r_m for w, r in zip(wbe_pts, rpa_pts)))
    checks.append(CheckResult("frontier-wbe-beats-rpa", margin >= -1e-9, margin, 0.0,
                              "min over grid of R_m(WBE) - R_m(RPA)"))
    return checks


def validation_report(fast: bool = True, seed: int = 7) -> tuple[str, bool]:
    checks = validate(fast=fast, seed=seed)
    lines = [c.line() for c in checks]
    ok = all(c.passed for c in checks)
    lines.append(f"{'ALL CHECKS PASSED' if ok else 'FAILURES PRESENT'} "
                 f"({sum(c.passed for c in checks)}/{len(checks)})")
    return "\n".join(lines), ok
