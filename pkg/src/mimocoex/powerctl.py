"""Pilot power control, max-min data-power feasibility, and rate-region tracing.

Pilot powers follow statistical channel inversion (machines) and full power
(humans) and stay fixed; data powers are optimized. Feasibility of a SINR
target vector is decided by the standard interference-function iteration
p <- t * I(p) / c started from zero, which increases monotonically toward the
minimal power solution whenever one exists.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from mimocoex.pilots import (
    PilotBook,
    make_orthogonal_book,
    make_random_assignment_book,
    make_wbe_book,
)
from mimocoex.rates import HUMAN, MRC, OPA, SC1, SC2, SC3, SchemeConfig, SinrEngine
from mimocoex.scenario import Device, Scenario, SystemParams

WBE_KIND = "wbe"
RPA_KIND = "random"


@dataclass(frozen=True)
class FeasibilityResult:
    feasible: bool
    p: np.ndarray
    iterations: int
    converged: bool


@dataclass(frozen=True)
class RatePoint:
    """One point of a traced (human rate, machine rate) frontier."""

    r_h_target: float
    r_m: float
    scheme: str
    receiver: str
    feasible: bool
    n_p_m: int | None = None
    alpha: float | None = None
    p: np.ndarray | None = None
    iterations: int = 0


def sci_pilot_powers(scenario: Scenario) -> np.ndarray:
    """Pilot powers: humans at full power, machines channel-inverted.

    Machines use q_k = q_max * beta_min / beta_k, equalizing the received mean
    pilot power across machines at the cell-edge level.
    """
    params = scenario.params
    betas = scenario.betas
    q = np.full(params.K, params.q_max_w)
    q[params.K_h:] = params.q_max_w * scenario.beta_min / betas[params.K_h:]
    return q


def sci_data_powers(scenario: Scenario) -> np.ndarray:
    """Channel-inverted data powers for every device (used by figure sweeps)."""
    return scenario.params.p_max_w * scenario.beta_min / scenario.betas


def _iterate_feasible(
    engine: SinrEngine,
    targets: np.ndarray,
    p_cap: float,
    p_start: np.ndarray | None,
    step_tol: float,
    max_iter: int,
    trace: list | None,
    refine: bool = True,
) -> FeasibilityResult:
    """Interference-function fixed point from below, with sound acceleration.

    The plain iteration p <- t I(p)/c increases monotonically toward the
    minimal power solution. Two shortcuts keep near-boundary probes cheap and
    are both exact for a monotone map: if some x <= cap satisfies T(x) <= x,
    the minimal fixed point lies below x (feasible); if the per-component
    update-ratio minimum stays above one, no reachable fixed point exists
    (Collatz-Wielandt bound on the update's Jacobian, infeasible). The
    candidate x comes from geometric extrapolation of the step sequence. When
    a ``trace`` list is supplied the acceleration is disabled so the recorded
    sequence is the textbook monotone iteration.
    """
    k = engine.kh + engine.km
    t = np.broadcast_to(np.asarray(targets, dtype=float), (2, k))
    if np.any(t < 0.0):
        raise ValueError("SINR targets must be non-negative")
    if np.any(np.isinf(t)):
        return FeasibilityResult(False, np.full(k, np.inf), 0, False)
    c = engine.signal_coef()

    def apply(v: np.ndarray) -> np.ndarray:
        return np.max(t * engine.denominators(v), axis=0) / c

    p = np.zeros(k) if p_start is None else np.asarray(p_start, dtype=float).copy()
    if p_start is not None:
        # a warm start is only safe below its own image (keeps the monotone path)
        if np.any(apply(p) < p * (1.0 - 1e-12)):
            p = np.zeros(k)
    if trace is not None:
        trace.append(p.copy())
    accelerate = trace is None
    prev_delta = None
    cap_hi = p_cap * (1.0 + 1e-12)
    for it in range(1, max_iter + 1):
        p_new = apply(p)
        if trace is not None:
            trace.append(p_new.copy())
        if np.any(p_new > cap_hi):
            # iterates stay below the minimal fixed point, so exceeding the cap
            # already proves infeasibility
            return FeasibilityResult(False, p_new, it, False)
        delta = p_new - p
        step = np.max(np.abs(delta) / np.maximum(p_new, 1e-300))
        if step < step_tol:
            return FeasibilityResult(True, p_new, it, True)
        if accelerate and prev_delta is not None and it % 8 == 0:
            mask = prev_delta > 0.0
            if np.any(mask):
                ratios = delta[mask] / prev_delta[mask]
                r_min, r_max = float(np.min(ratios)), float(np.max(ratios))
                if r_min > 1.0 + 1e-9 and it >= 32:
                    return FeasibilityResult(False, p_new, it, False)
                if r_max < 1.0:
                    x = p_new + delta * (r_max / (1.0 - r_max)) * 1.05
                    if np.all(x <= cap_hi):
                        tx = apply(x)
                        if np.all(tx <= x * (1.0 + 1e-12)):
                            if not refine:
                                return FeasibilityResult(True, p_new, it, True)
                            return _descend(apply, tx, it, max_iter)
        prev_delta = delta
        p = p_new
    return FeasibilityResult(False, p, max_iter, False)


def _descend(apply, u: np.ndarray, it: int, max_iter: int) -> FeasibilityResult:
    """Polish a proven-feasible point: iterate downward to the enclosed fixed
    point (T(u) <= u keeps every later iterate feasible and decreasing)."""
    for jt in range(1, max_iter + 1):
        u_new = apply(u)
        step = np.max(np.abs(u_new - u) / np.maximum(u_new, 1e-300))
        u = u_new
        if step < 1e-12:
            break
    return FeasibilityResult(True, u, it + jt, True)


def maxmin_feasible(
    targets: np.ndarray,
    scenario: Scenario,
    scheme: SchemeConfig,
    book: PilotBook | None,
    q: np.ndarray,
    receiver: str | None = None,
    p_start: np.ndarray | None = None,
    step_tol: float = 1e-10,
    max_iter: int = 10_000,
    trace: list | None = None,
    refine: bool = True,
) -> FeasibilityResult:
    """Decide whether per-device SINR targets are jointly reachable under the cap.

    ``targets`` has shape (K,) or (2, K) for per-phase targets (sc3 humans).
    Runs the interference-function fixed point from p = 0 (or a monotone-safe
    warm start); feasible iff it converges with every power below the cap.
    ``trace``, when a list, collects the iterates for inspection.
    """
    engine = SinrEngine(scenario, scheme, book, q, receiver=receiver)
    return _iterate_feasible(engine, targets, scenario.params.p_max_w, p_start,
                             step_tol, max_iter, trace, refine=refine)


def verify_targets(engine: SinrEngine, p: np.ndarray, targets: np.ndarray) -> float:
    """Max relative deviation of the binding-phase SINR from its target.

    At the minimal fixed point each device's worst phase meets its target with
    equality, so this should sit at solver precision for feasible solves.
    """
    k = engine.kh + engine.km
    t = np.broadcast_to(np.asarray(targets, dtype=float), (2, k))
    sinr = engine.sinr(p)
    binding = np.min(sinr, axis=0)
    target = np.max(t, axis=0)
    active = target > 0.0
    if not np.any(active):
        return 0.0
    return float(np.max(np.abs(binding[active] - target[active]) / target[active]))


class _LinearFeasibility:
    """Exact minimal-power feasibility for denominators affine in p (sc1/sc2).

    With D(p) = D0 + L p the fixed point of p = diag(t/c)(D0 + L p) is the
    solution of (I - A) p = b with A = diag(t/c) L, b = diag(t/c) D0. For a
    non-negative A and positive b the solution is non-negative iff the active
    subnetwork has spectral radius below one (Collatz-Wielandt), so the sign
    of the solve decides feasibility exactly; the cap check finishes the job.
    """

    def __init__(self, engine: SinrEngine):
        k = engine.kh + engine.km
        self.k = k
        self.c = engine.signal_coef()
        d_zero = engine.denominators(np.zeros(k))
        if not np.allclose(d_zero[0], d_zero[1], rtol=0, atol=0):
            raise ValueError("phase-split denominators are not affine-compatible")
        self.d0 = d_zero[0]
        cols = np.empty((k, k))
        e = np.zeros(k)
        for j in range(k):
            e[j] = 1.0
            cols[:, j] = engine.denominators(e)[0] - self.d0
            e[j] = 0.0
        self.lin = cols

    def solve(self, targets: np.ndarray, p_cap: float) -> FeasibilityResult:
        g = targets / self.c
        a = self.lin * g[:, None]
        b = self.d0 * g
        try:
            x = np.linalg.solve(np.eye(self.k) - a, b)
        except np.linalg.LinAlgError:
            return FeasibilityResult(False, np.full(self.k, np.inf), 1, False)
        scale = float(np.max(np.abs(x))) if x.size else 0.0
        if np.any(x < -1e-9 * scale):
            return FeasibilityResult(False, x, 1, False)
        x = np.maximum(x, 0.0)
        ok = bool(np.all(x <= p_cap * (1.0 + 1e-12)))
        return FeasibilityResult(ok, x, 1, ok)


def _is_affine_scheme(engine: SinrEngine) -> bool:
    return engine.scheme.scheme in (SC1, SC2)


class _CommonTargetBisector:
    """Log-domain bisection on a common SINR target for one device subset.

    Feasibility of the common target t (applied to the masked devices, with
    the other targets held fixed) is monotone decreasing in t, so bisection
    brackets the boundary; 40 iterations over a 15-decade window leave a
    relative gap far below 1e-5. Probes use the exact affine solve where the
    scheme allows it and the monotone interference-function iteration
    otherwise (sc3), warm-started from the last feasible power vector.
    """

    def __init__(self, engine: SinrEngine, base_targets: np.ndarray, mask: np.ndarray,
                 p_cap: float, step_tol: float = 1e-10, max_iter: int = 10_000):
        k = engine.kh + engine.km
        self.engine = engine
        self.base = np.broadcast_to(np.asarray(base_targets, dtype=float), (2, k)).copy()
        self.mask = np.asarray(mask, dtype=bool)
        self.p_cap = p_cap
        self.step_tol = step_tol
        self.max_iter = max_iter
        self.iterations = 0
        self.linear: _LinearFeasibility | None = None
        if _is_affine_scheme(engine) and np.allclose(self.base[0], self.base[1],
                                                     rtol=0, atol=0):
            self.linear = _LinearFeasibility(engine)

    def probe(self, t: float, p_start: np.ndarray | None,
              refine: bool = False) -> FeasibilityResult:
        targets = self.base.copy()
        targets[:, self.mask] = t
        if self.linear is not None:
            res = self.linear.solve(targets[0], self.p_cap)
        else:
            res = _iterate_feasible(self.engine, targets, self.p_cap, p_start,
                                    self.step_tol, self.max_iter, None, refine=refine)
        self.iterations += res.iterations
        return res

    def solve(self, t_hi: float, iters: int = 40) -> tuple[float, np.ndarray | None, bool]:
        """Returns (t_best, p_best, base_feasible); p_best solves t_best exactly."""
        base = self.probe(0.0, None, refine=True)
        if not base.feasible:
            return 0.0, None, False
        if not np.any(self.mask):
            return 0.0, base.p, True
        t_floor = t_hi * 1e-15
        res = self.probe(t_floor, base.p)
        if not res.feasible:
            # boundary below the log window; linear refinement near zero
            lo, hi, p_lo = 0.0, t_floor, base.p
            for _ in range(iters):
                mid = 0.5 * (lo + hi)
                r = self.probe(mid, p_lo)
                if r.feasible:
                    lo, p_lo = mid, r.p
                else:
                    hi = mid
            t_best = lo
        else:
            lo, hi, p_lo = math.log(t_floor), math.log(t_hi), res.p
            for _ in range(iters):
                mid = 0.5 * (lo + hi)
                r = self.probe(math.exp(mid), p_lo)
                if r.feasible:
                    lo, p_lo = mid, r.p
                else:
                    hi = mid
            t_best = math.exp(lo)
        final = self.probe(t_best, p_lo, refine=True)
        if final.feasible:
            p_lo = final.p
        return t_best, p_lo, True


def _sinr_upper_bound(engine: SinrEngine, mask: np.ndarray, p_cap: float) -> float:
    """Interference-free SINR bound at full power for the masked devices."""
    betas = engine.scenario.betas[mask]
    if betas.size == 0:
        return 1.0
    return engine.M * p_cap * float(np.max(betas)) / engine.noise


def _human_sinr_targets(scheme: SchemeConfig, r_h: float) -> np.ndarray:
    """Per-phase SINR targets giving every human at least the rate r_h.

    sc3 uses the conservative single-log-equivalent inversion: both phases
    must reach the target derived from the total prelog, which is sufficient
    for the two-log rate expression.
    """
    if r_h <= 0.0:
        return np.zeros(2)
    total = sum(scheme.prelogs(HUMAN))
    if total <= 0.0:
        return np.full(2, np.inf)
    return np.full(2, 2.0 ** (r_h / total) - 1.0)


def _machine_rate(scheme: SchemeConfig, t_m: float) -> float:
    return scheme.prelogs("machine")[0] * math.log2(1.0 + t_m)


def _make_machine_book(kind: str, n_p_m: int, k_m: int, seed: int) -> PilotBook:
    if kind == WBE_KIND:
        return make_wbe_book(n_p_m, k_m)
    if kind == RPA_KIND:
        return make_random_assignment_book(n_p_m, k_m, seed)
    if kind == "orthogonal":
        return make_orthogonal_book(n_p_m, k_m)
    raise ValueError(f"unknown machine book kind {kind!r}")


def _default_n_p_m_grid(scenario: Scenario, scheme: SchemeConfig, kind: str) -> list[int]:
    hi = scenario.params.N - scheme.n_p_h - 1
    if kind == WBE_KIND:
        hi = min(hi, scenario.params.K_m)
    return list(range(1, max(hi, 1) + 1))


def _solve_machine_point(
    scenario: Scenario,
    cfg: SchemeConfig,
    engine: SinrEngine,
    r_h: float,
    bisect_iters: int,
) -> RatePoint:
    params = scenario.params
    base = np.zeros((2, params.K))
    base[:, : params.K_h] = _human_sinr_targets(cfg, r_h)[:, None]
    mask = np.zeros(params.K, dtype=bool)
    mask[params.K_h:] = True
    bis = _CommonTargetBisector(engine, base, mask, params.p_max_w)
    t_hi = _sinr_upper_bound(engine, mask, params.p_max_w)
    t_m, p_opt, human_ok = bis.solve(t_hi, iters=bisect_iters)
    if not human_ok:
        return RatePoint(r_h, 0.0, cfg.scheme, engine.receiver, False,
                         n_p_m=cfg.n_p_m, alpha=cfg.alpha, iterations=bis.iterations)
    return RatePoint(r_h, _machine_rate(cfg, t_m), cfg.scheme, engine.receiver, True,
                     n_p_m=cfg.n_p_m, alpha=cfg.alpha, p=p_opt, iterations=bis.iterations)


def maxmin_machine_rate(
    r_h_target: float,
    scenario: Scenario,
    scheme: SchemeConfig,
    q: np.ndarray,
    book_kind: str = WBE_KIND,
    n_p_m_grid: list[int] | None = None,
    book_seed: int = 0,
    bisect_iters: int = 40,
) -> RatePoint:
    """Best max-min machine rate subject to every human reaching r_h_target.

    Converts the human rate target to per-phase SINR targets, bisects on a
    common machine SINR target, and grid-searches the machine pilot length.
    """
    if r_h_target < 0.0:
        raise ValueError("human rate target must be non-negative")
    if n_p_m_grid is None:
        n_p_m_grid = _default_n_p_m_grid(scenario, scheme, book_kind)
    best: RatePoint | None = None
    for n_p_m in n_p_m_grid:
        cfg = replace(scheme, n_p_m=n_p_m)
        book = _make_machine_book(book_kind, n_p_m, scenario.params.K_m, book_seed)
        engine = SinrEngine(scenario, cfg, book, q)
        point = _solve_machine_point(scenario, cfg, engine, float(r_h_target), bisect_iters)
        if best is None or _better(point, best):
            best = point
    assert best is not None
    return best


def _better(a: RatePoint, b: RatePoint) -> bool:
    if a.feasible != b.feasible:
        return a.feasible
    return a.r_m > b.r_m


def _sc1_trace(
    scenario: Scenario,
    scheme: SchemeConfig,
    q: np.ndarray,
    r_h_grid: np.ndarray,
    book_kind: str,
    n_p_m_grid: list[int],
    alpha_grid: np.ndarray,
    book_seed: int,
    bisect_iters: int,
) -> list[RatePoint]:
    """sc1 frontier: classes live in disjoint CIs, so the per-CI max-min SINRs
    are computed once and the alpha sweep only rescales the prelogs."""
    params = scenario.params
    total_iter = 0

    # humans-only per-CI capacity (alpha = 1)
    r_h_per_ci = math.inf
    if params.K_h:
        cfg_h = replace(scheme, alpha=1.0, n_p_m=n_p_m_grid[0])
        book0 = _make_machine_book(book_kind, n_p_m_grid[0], params.K_m, book_seed) \
            if params.K_m else None
        engine = SinrEngine(scenario, cfg_h, book0, q)
        mask = np.zeros(params.K, dtype=bool)
        mask[: params.K_h] = True
        bis = _CommonTargetBisector(engine, np.zeros((2, params.K)), mask, params.p_max_w)
        t_h_max, _, _ = bis.solve(_sinr_upper_bound(engine, mask, params.p_max_w),
                                  iters=bisect_iters)
        total_iter += bis.iterations
        r_h_per_ci = (params.N - scheme.n_p_h) / params.N * math.log2(1.0 + t_h_max)

    # machines-only per-CI rate, optimized over the pilot length (alpha = 0)
    best_rate_m, best_npm = 0.0, n_p_m_grid[0]
    if params.K_m:
        mask = np.zeros(params.K, dtype=bool)
        mask[params.K_h:] = True
        for n_p_m in n_p_m_grid:
            cfg = replace(scheme, alpha=0.0, n_p_m=n_p_m)
            book = _make_machine_book(book_kind, n_p_m, params.K_m, book_seed)
            engine = SinrEngine(scenario, cfg, book, q)
            bis = _CommonTargetBisector(engine, np.zeros((2, params.K)), mask, params.p_max_w)
            t_m, _, _ = bis.solve(_sinr_upper_bound(engine, mask, params.p_max_w),
                                  iters=bisect_iters)
            total_iter += bis.iterations
            a = (params.N - n_p_m) / params.N * math.log2(1.0 + t_m)
            if a > best_rate_m:
                best_rate_m, best_npm = a, n_p_m

    points = []
    for r_h in r_h_grid:
        r_h = float(r_h)
        ok = [a for a in alpha_grid
              if r_h <= 0.0 or (a > 0.0 and a * r_h_per_ci >= r_h * (1.0 - 1e-12))]
        if not ok:
            points.append(RatePoint(r_h, 0.0, SC1, scheme.receiver, False,
                                    n_p_m=best_npm, iterations=total_iter))
            continue
        alpha = float(min(ok))
        r_m = (1.0 - alpha) * best_rate_m
        cfg = replace(scheme, alpha=alpha, n_p_m=best_npm)
        book = _make_machine_book(book_kind, best_npm, params.K_m, book_seed) \
            if params.K_m else None
        targets = np.zeros((2, params.K))
        targets[:, : params.K_h] = _human_sinr_targets(cfg, r_h)[:, None]
        if params.K_m and r_m > 0.0 and alpha < 1.0:
            prelog_m = (1.0 - alpha) * (params.N - best_npm) / params.N
            targets[:, params.K_h:] = 2.0 ** (r_m / prelog_m) - 1.0
        res = maxmin_feasible(targets, scenario, cfg, book, q)
        total_iter += res.iterations
        points.append(RatePoint(r_h, r_m, SC1, scheme.receiver, res.feasible,
                                n_p_m=best_npm, alpha=alpha, p=res.p,
                                iterations=total_iter))
    return points


def trace_rate_region(
    scenario: Scenario,
    scheme: SchemeConfig,
    q: np.ndarray,
    r_h_grid: np.ndarray,
    book_kind: str = WBE_KIND,
    n_p_m_grid: list[int] | None = None,
    alpha_grid: np.ndarray | None = None,
    book_seed: int = 0,
    bisect_iters: int = 40,
) -> list[RatePoint]:
    """One RatePoint per human-rate target; sc1 additionally optimizes alpha."""
    if scheme.scheme == OPA:
        if scheme.group_size is None:
            raise ValueError("opa tracing needs group_size")
        return trace_opa_region(scenario, q, r_h_grid, scheme.group_size,
                                n_p_h=scheme.n_p_h, receiver=scheme.receiver,
                                bisect_iters=bisect_iters)
    if n_p_m_grid is None:
        n_p_m_grid = _default_n_p_m_grid(scenario, scheme, book_kind)
    if scheme.scheme == SC1:
        if alpha_grid is None:
            alpha_grid = np.linspace(0.0, 1.0, 101)
        return _sc1_trace(scenario, scheme, q, np.asarray(r_h_grid, dtype=float),
                          book_kind, n_p_m_grid, np.asarray(alpha_grid, dtype=float),
                          book_seed, bisect_iters)

    params = scenario.params
    # per-pilot-length engines are target-independent: build once, sweep targets
    cases = []
    for n_p_m in n_p_m_grid:
        cfg = replace(scheme, n_p_m=n_p_m)
        book = _make_machine_book(book_kind, n_p_m, params.K_m, book_seed)
        cases.append((cfg, SinrEngine(scenario, cfg, book, q)))
    points = []
    for r_h in np.asarray(r_h_grid, dtype=float):
        best: RatePoint | None = None
        for cfg, engine in cases:
            point = _solve_machine_point(scenario, cfg, engine, float(r_h), bisect_iters)
            if best is None or _better(point, best):
                best = point
        points.append(best)
    return points


def _group_scenario(scenario: Scenario, member_ids: np.ndarray) -> Scenario:
    """Sub-deployment with all humans plus one machine group (one OPA CI)."""
    params = scenario.params
    keep = list(range(params.K_h)) + list(member_ids)
    devices = tuple(scenario.devices[i] for i in keep)
    sub_params = SystemParams(
        M=params.M, N=params.N, K_h=params.K_h, K_m=len(member_ids),
        cell_radius_m=params.cell_radius_m, d_min_m=params.d_min_m,
        noise_power_w=params.noise_power_w, q_max_w=params.q_max_w,
        p_max_w=params.p_max_w, rng_seed=params.rng_seed,
    )
    return Scenario(params=sub_params, devices=devices)


def trace_opa_region(
    scenario: Scenario,
    q: np.ndarray,
    r_h_grid: np.ndarray,
    group_size: int,
    n_p_h: int | None = None,
    receiver: str = MRC,
    bisect_iters: int = 40,
) -> list[RatePoint]:
    """Orthogonal pilot allocation baseline: machine groups round-robin over CIs.

    Each CI carries all humans plus one group of at most ``group_size``
    machines holding orthogonal pilots (an sc2-structured interval); a
    machine's rate is its single-CI rate divided by the number of groups.
    Humans must reach the rate target in every CI; their data powers are
    solved per CI and the reported human power is the largest across CIs.
    Scheduling overhead is ignored.
    """
    params = scenario.params
    n_p_h = params.K_h if n_p_h is None else n_p_h
    if group_size < 1 or group_size > params.N - n_p_h - 1:
        raise ValueError("group does not fit in the coherence interval")
    machine_ids = np.arange(params.K_h, params.K)
    groups = [machine_ids[i: i + group_size] for i in range(0, params.K_m, group_size)]
    n_groups = max(len(groups), 1)
    prelog = (params.N - n_p_h - group_size) / params.N

    subs = []
    for g in groups:
        sub = _group_scenario(scenario, g)
        cfg = SchemeConfig(scheme=SC2, N=params.N, n_p_h=n_p_h, n_p_m=group_size,
                           receiver=receiver)
        book = make_orthogonal_book(group_size, len(g))
        q_sub = np.concatenate([q[: params.K_h], q[g]])
        subs.append((g, SinrEngine(sub, cfg, book, q_sub, receiver=receiver)))

    points = []
    for r_h in np.asarray(r_h_grid, dtype=float):
        r_h = float(r_h)
        t_h = (2.0 ** (r_h / prelog) - 1.0) if r_h > 0.0 else 0.0
        total_iter = 0

        def probe(t_m: float, warm, refine: bool = False) -> list[np.ndarray] | None:
            nonlocal total_iter
            out = []
            for idx, (g, engine) in enumerate(subs):
                k_sub = params.K_h + len(g)
                t = np.zeros((2, k_sub))
                t[:, : params.K_h] = t_h
                t[:, params.K_h:] = t_m
                res = _iterate_feasible(engine, t, params.p_max_w,
                                        warm[idx] if warm else None, 1e-10, 10_000,
                                        None, refine=refine)
                total_iter += res.iterations
                if not res.feasible:
                    return None
                out.append(res.p)
            return out

        base = probe(0.0, None, refine=True)
        if base is None:
            points.append(RatePoint(r_h, 0.0, OPA, receiver, False,
                                    n_p_m=group_size, iterations=total_iter))
            continue
        t_hi = params.M * params.p_max_w * float(np.max(scenario.betas)) / params.noise_power_w
        t_best, p_best = 0.0, base
        lo_probe = probe(t_hi * 1e-15, base)
        if lo_probe is not None:
            lo, hi, p_best = math.log(t_hi * 1e-15), math.log(t_hi), lo_probe
            for _ in range(bisect_iters):
                mid = 0.5 * (lo + hi)
                r = probe(math.exp(mid), p_best)
                if r is not None:
                    lo, p_best = mid, r
                else:
                    hi = mid
            t_best = math.exp(lo)
            final = probe(t_best, p_best, refine=True)
            if final is not None:
                p_best = final
        r_m = prelog / n_groups * math.log2(1.0 + t_best)
        p_full = np.zeros(params.K)
        for (g, _), p_sub in zip(subs, p_best):
            p_full[: params.K_h] = np.maximum(p_full[: params.K_h], p_sub[: params.K_h])
            p_full[g] = p_sub[params.K_h:]
        points.append(RatePoint(r_h, r_m, OPA, receiver, True,
                                n_p_m=group_size, p=p_full, iterations=total_iter))
    return points


def max_human_rate(
    scenario: Scenario,
    scheme: SchemeConfig,
    q: np.ndarray,
    book_seed: int = 0,
    bisect_iters: int = 40,
) -> float:
    """Largest max-min human rate with machines silent (anchors rate grids)."""
    params = scenario.params
    if params.K_h == 0:
        return 0.0
    if scheme.scheme == OPA:
        cfg = SchemeConfig(scheme=SC2, N=params.N, n_p_h=scheme.n_p_h,
                           n_p_m=scheme.group_size or 1, receiver=scheme.receiver)
    elif scheme.scheme == SC1:
        cfg = replace(scheme, alpha=1.0)
    else:
        cfg = scheme
    book = _make_machine_book("orthogonal" if scheme.scheme == OPA else WBE_KIND,
                              cfg.n_p_m, params.K_m, book_seed) if params.K_m else None
    if scheme.scheme == OPA and params.K_m:
        book = make_orthogonal_book(cfg.n_p_m, min(params.K_m, cfg.n_p_m))
        # with machines silent only the human block matters; use a group-sized
        # sub-deployment so the engine dimensions line up
        sub_ids = np.arange(params.K_h, params.K_h + min(params.K_m, cfg.n_p_m))
        scenario = _group_scenario(scenario, sub_ids)
        q = np.concatenate([q[: params.K_h], q[sub_ids]])
        params = scenario.params
    engine = SinrEngine(scenario, cfg, book, q, receiver=cfg.receiver)
    mask = np.zeros(params.K, dtype=bool)
    mask[: params.K_h] = True
    bis = _CommonTargetBisector(engine, np.zeros((2, params.K)), mask, params.p_max_w)
    t_h, _, _ = bis.solve(_sinr_upper_bound(engine, mask, params.p_max_w),
                          iters=bisect_iters)
    return float(sum(cfg.prelogs(HUMAN)) * math.log2(1.0 + t_h))
