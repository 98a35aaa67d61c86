"""Closed-form effective SINRs and ergodic rates for the three sharing schemes.

Humans always hold orthogonal pilots and can be combined with MRC or ZF;
machines hold non-orthogonal pilots (WBE or random) and always use MRC. The
closed forms here are validated against :func:`mc_use_and_forget_sinr`, which
simulates training, estimation, combining, and data reception.

Scheme conventions (device ordering: humans first, machines after):

* ``sc1`` - humans and machines in disjoint coherence intervals; ``alpha`` is
  the CI fraction given to humans.
* ``sc2`` - one shared training window of length ``n_p_h + n_p_m``; human
  pilots span an orthogonal block, machine sequences live in the complement.
* ``sc3`` - humans train first (``n_p_h``), then transmit data while machines
  train (``n_p_m``); humans see two SINR phases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from mimocoex.pilots import PilotBook, make_random_assignment_book
from mimocoex.scenario import HUMAN, MACHINE, Scenario

SC1 = "sc1"
SC2 = "sc2"
SC3 = "sc3"
OPA = "opa"
MRC = "mrc"
ZF = "zf"

_SCHEMES = (SC1, SC2, SC3, OPA)


@dataclass(frozen=True)
class SchemeConfig:
    """Resource-sharing scheme plus the coherence-interval split it implies."""

    scheme: str
    N: int                      # coherence interval length (samples)
    n_p_h: int                  # human pilot length
    n_p_m: int                  # machine pilot length
    alpha: float = 0.5          # sc1 only: fraction of CIs given to humans
    receiver: str = MRC         # mrc | zf (humans only; machines always use MRC)
    group_size: int | None = None  # opa only: machines per coherence interval

    def __post_init__(self) -> None:
        if self.scheme not in _SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.receiver not in (MRC, ZF):
            raise ValueError(f"unknown receiver {self.receiver!r}")
        if self.n_p_h < 0 or self.n_p_m < 1:
            raise ValueError("pilot lengths must be non-negative / positive")
        if self.scheme == SC1:
            if not (self.n_p_h <= self.N and self.n_p_m <= self.N):
                raise ValueError("sc1 needs n_p_h <= N and n_p_m <= N")
            if not 0.0 <= self.alpha <= 1.0:
                raise ValueError("alpha must lie in [0, 1]")
        elif self.scheme in (SC2, SC3):
            if self.n_p_h + self.n_p_m > self.N:
                raise ValueError(f"{self.scheme} needs n_p_h + n_p_m <= N")
        elif self.scheme == OPA:
            if self.group_size is None or self.group_size < 1:
                raise ValueError("opa needs a positive group_size")
            if self.group_size > self.N - self.n_p_h - 1:
                raise ValueError("opa group does not fit in the coherence interval")

    @property
    def human_pilot_len(self) -> int:
        """Despreading gain window for human pilots."""
        return self.n_p_h + self.n_p_m if self.scheme == SC2 else self.n_p_h

    @property
    def machine_pilot_len(self) -> int:
        """Despreading gain window for machine pilots."""
        return self.n_p_h + self.n_p_m if self.scheme == SC2 else self.n_p_m

    def prelogs(self, cls: str) -> tuple[float, ...]:
        """Rate prefactors, one entry per SINR phase of the device class."""
        n = self.N
        if self.scheme == SC1:
            if cls == HUMAN:
                return (self.alpha * (n - self.n_p_h) / n,)
            return ((1.0 - self.alpha) * (n - self.n_p_m) / n,)
        if self.scheme == SC2:
            return ((n - self.n_p_h - self.n_p_m) / n,)
        if self.scheme == SC3:
            if cls == HUMAN:
                return (self.n_p_m / n, (n - self.n_p_h - self.n_p_m) / n)
            return ((n - self.n_p_h - self.n_p_m) / n,)
        raise ValueError("per-CI prelogs of OPA are built by the region tracer")


@dataclass(frozen=True)
class SinrTerm:
    """One SINR phase: coherent-gain numerator and the denominator split."""

    prelog: float
    signal: float
    intra_interference: float    # non-coherent, same device class
    cross_interference: float    # non-coherent, other class
    coherent_intra: float        # pilot-contamination term, same class (scales with M)
    coherent_cross: float        # sc3 human-data contamination of machines
    noise: float

    @property
    def sinr(self) -> float:
        denom = (self.intra_interference + self.cross_interference
                 + self.coherent_intra + self.coherent_cross + self.noise)
        return self.signal / denom


@dataclass(frozen=True)
class SinrBreakdown:
    """Per-device effective SINR(s) with the term-level decomposition."""

    device_id: int
    device_class: str
    scheme: str
    receiver: str
    gamma: float                 # gamma_k for humans, gamma_bar_k for machines
    terms: tuple[SinrTerm, ...]

    @property
    def sinrs(self) -> tuple[float, ...]:
        return tuple(t.sinr for t in self.terms)

    @property
    def sinr(self) -> float:
        """Single effective SINR; only defined for one-phase devices."""
        if len(self.terms) != 1:
            raise ValueError("device has multiple SINR phases; use .sinrs")
        return self.terms[0].sinr

    @property
    def rate_bpshz(self) -> float:
        return sum(t.prelog * math.log2(1.0 + t.sinr) for t in self.terms)


def human_gamma(n_p: int, beta, q, noise_power: float):
    """Mean-square of one LMMSE estimate component under orthogonal pilots."""
    s = n_p * np.asarray(beta) * np.asarray(q)
    return s / (s + noise_power)


def gamma_bar(
    book: PilotBook,
    betas_m: np.ndarray,
    q_m: np.ndarray,
    noise_power: float,
    n_p_eff: int,
    overlap_load: float = 0.0,
) -> np.ndarray:
    """Pilot-expectation harmonic gamma for every machine.

    ``overlap_load`` is the total human data power received during machine
    training (sum of p*beta over humans; nonzero only under sc3).
    """
    mu = np.asarray(betas_m, dtype=float) * np.asarray(q_m, dtype=float)
    denom = n_p_eff * (book.expected_cross_corr_sq @ mu) + overlap_load + noise_power
    return n_p_eff * mu / denom


def _human_breakdown(scenario: Scenario, scheme: SchemeConfig, q: np.ndarray,
                     p: np.ndarray, device_id: int, receiver: str) -> SinrBreakdown:
    params = scenario.params
    kh = params.K_h
    betas = scenario.betas
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    gamma_all = human_gamma(scheme.human_pilot_len, betas[:kh], q[:kh], params.noise_power_w)
    gamma = float(gamma_all[device_id])
    if receiver == ZF:
        if params.M <= kh:
            raise ValueError("ZF for humans needs M > K_h")
        m_eff = params.M - kh
        intra = float(np.sum(p[:kh] * betas[:kh] * (1.0 - gamma_all)))
    else:
        m_eff = params.M
        intra = float(np.sum(p[:kh] * betas[:kh]))
    s_m = float(np.sum(p[kh:] * betas[kh:]))
    pilot_load_m = float(np.sum(q[kh:] * betas[kh:]))
    if scheme.scheme == SC1:
        cross_phases = (0.0,)
    elif scheme.scheme == SC2:
        cross_phases = (s_m,)
    elif scheme.scheme == SC3:
        cross_phases = (pilot_load_m, s_m)
    else:
        raise ValueError("human SINR defined for sc1/sc2/sc3")
    prelogs = scheme.prelogs(HUMAN)
    terms = tuple(
        SinrTerm(
            prelog=prelogs[i],
            signal=m_eff * gamma * betas[device_id] * p[device_id],
            intra_interference=intra,
            cross_interference=cross_phases[i],
            coherent_intra=0.0,
            coherent_cross=0.0,
            noise=params.noise_power_w,
        )
        for i in range(len(prelogs))
    )
    return SinrBreakdown(device_id=device_id, device_class=HUMAN, scheme=scheme.scheme,
                         receiver=receiver, gamma=gamma, terms=terms)


class SinrEngine:
    """Vectorized closed-form SINR evaluation for all devices of one config.

    Pilot powers are fixed at construction; :meth:`denominators` and
    :meth:`sinr` are functions of the data powers only, which is what the
    max-min power solver iterates on. ``book`` is the machine codebook
    (``scheme.n_p_m`` columns); it may be None when the scenario has no
    machines.
    """

    def __init__(self, scenario: Scenario, scheme: SchemeConfig, book: PilotBook | None,
                 q: np.ndarray, receiver: str | None = None):
        if scheme.scheme not in (SC1, SC2, SC3):
            raise ValueError("SINR engine covers sc1/sc2/sc3; decompose opa into per-CI configs")
        params = scenario.params
        if scheme.n_p_h < params.K_h:
            raise ValueError("orthogonal human pilots need n_p_h >= K_h")
        if params.K_m:
            if book is None or book.K != params.K_m:
                raise ValueError("book must hold one sequence per machine")
            if book.length != scheme.n_p_m:
                raise ValueError(f"book length {book.length} != scheme n_p_m {scheme.n_p_m}")
        self.scenario = scenario
        self.scheme = scheme
        self.book = book
        self.receiver = scheme.receiver if receiver is None else receiver
        if self.receiver == ZF and params.M <= params.K_h:
            raise ValueError("ZF for humans needs M > K_h")
        self.q = np.asarray(q, dtype=float)
        self.kh = params.K_h
        self.km = params.K_m
        self.M = params.M
        self.noise = params.noise_power_w
        betas = scenario.betas
        self.betas = betas
        self.beta_h = betas[: self.kh]
        self.beta_m = betas[self.kh:]
        self.q_h = self.q[: self.kh]
        self.q_m = self.q[self.kh:]
        self.gamma_h = human_gamma(scheme.human_pilot_len, self.beta_h, self.q_h, self.noise)
        self.n_m = scheme.machine_pilot_len
        self.pilot_load_m = float(np.sum(self.q_m * self.beta_m))
        if self.km:
            mu = self.beta_m * self.q_m
            self.exp_cross = book.expected_cross_corr_sq
            self._gbar_static = self.n_m * (self.exp_cross @ mu) + self.noise
            self._gbar_num = self.n_m * mu
            cross_off = self.exp_cross - np.eye(self.km)
            x = self.q_m * self.beta_m**2
            # coh[a, b] = M E[a,b] q_b beta_b^2 / (q_a beta_a), zero diagonal
            self._coh = self.M * cross_off * x[None, :] / mu[:, None]

    def _split(self, p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        p = np.asarray(p, dtype=float)
        return p[: self.kh], p[self.kh:]

    def gamma_bar_of(self, p: np.ndarray) -> np.ndarray:
        p_h, _ = self._split(p)
        overlap = float(np.sum(p_h * self.beta_h)) if self.scheme.scheme == SC3 else 0.0
        return self._gbar_num / (self._gbar_static + overlap)

    def signal_coef(self) -> np.ndarray:
        """c such that the coherent-gain numerator of device k is c[k] * p[k]."""
        c = np.empty(self.kh + self.km)
        m_eff = self.M - self.kh if self.receiver == ZF else self.M
        c[: self.kh] = m_eff * self.gamma_h * self.beta_h
        c[self.kh:] = self.M * self.beta_m
        return c

    def denominators(self, p: np.ndarray) -> np.ndarray:
        """Per-phase SINR denominators, shape (2, K); phase rows coincide except
        for sc3 humans (row 0 = machine-training phase, row 1 = shared data)."""
        p_h, p_m = self._split(p)
        s_h = float(np.sum(p_h * self.beta_h))
        s_m = float(np.sum(p_m * self.beta_m))
        scheme = self.scheme.scheme
        d = np.empty((2, self.kh + self.km))

        if self.receiver == ZF:
            human_load = float(np.sum(p_h * self.beta_h * (1.0 - self.gamma_h)))
        else:
            human_load = s_h
        if scheme == SC1:
            d_h1 = d_h2 = human_load + self.noise
        elif scheme == SC2:
            d_h1 = d_h2 = human_load + s_m + self.noise
        else:
            d_h1 = human_load + self.pilot_load_m + self.noise
            d_h2 = human_load + s_m + self.noise
        d[0, : self.kh] = d_h1
        d[1, : self.kh] = d_h2

        if self.km:
            gbar = self.gamma_bar_of(p)
            noncoh = s_m + self.noise if scheme == SC1 else s_m + s_h + self.noise
            d_m = noncoh / gbar + self._coh @ p_m
            if scheme == SC3:
                d_m = d_m + (self.M / (self.n_m * self.q_m * self.beta_m)) * float(
                    np.sum(p_h**2 * self.beta_h**2)
                )
            d[0, self.kh:] = d_m
            d[1, self.kh:] = d_m
        return d

    def sinr(self, p: np.ndarray) -> np.ndarray:
        """Per-phase effective SINRs, shape (2, K)."""
        p = np.asarray(p, dtype=float)
        return self.signal_coef()[None, :] * p[None, :] / self.denominators(p)


def sinr_mrc(device_id: int, scenario: Scenario, scheme: SchemeConfig, book: PilotBook | None,
             q: np.ndarray, p: np.ndarray) -> SinrBreakdown:
    """Closed-form effective SINR under maximum ratio combining."""
    if scenario.is_human(device_id):
        return _human_breakdown(scenario, scheme, q, p, device_id, MRC)
    engine = SinrEngine(scenario, scheme, book, q, receiver=MRC)
    p = np.asarray(p, dtype=float)
    a = device_id - engine.kh
    p_h, p_m = engine._split(p)
    gbar = float(engine.gamma_bar_of(p)[a])
    s_m = float(np.sum(p_m * engine.beta_m))
    s_h = float(np.sum(p_h * engine.beta_h))
    cross = 0.0 if scheme.scheme == SC1 else s_h / gbar
    coh_cross = 0.0
    if scheme.scheme == SC3:
        coh_cross = engine.M * float(np.sum(p_h**2 * engine.beta_h**2)) / (
            engine.n_m * engine.q_m[a] * engine.beta_m[a]
        )
    term = SinrTerm(
        prelog=scheme.prelogs(MACHINE)[0],
        signal=engine.M * engine.beta_m[a] * p_m[a],
        intra_interference=s_m / gbar,
        cross_interference=cross,
        coherent_intra=float(engine._coh[a] @ p_m),
        coherent_cross=coh_cross,
        noise=engine.noise / gbar,
    )
    return SinrBreakdown(device_id=device_id, device_class=MACHINE, scheme=scheme.scheme,
                         receiver=MRC, gamma=gbar, terms=(term,))


def sinr_zf_human(device_id: int, scenario: Scenario, scheme: SchemeConfig,
                  q: np.ndarray, p: np.ndarray) -> SinrBreakdown:
    """Closed-form effective SINR of a human under zero-forcing combining.

    Obtained from the MRC expression by replacing M with M - K_h in the
    coherent gain and beta with beta (1 - gamma) in the human interference
    sum; machine terms and noise are unchanged.
    """
    if not scenario.is_human(device_id):
        raise ValueError("ZF combining is defined for humans only")
    return _human_breakdown(scenario, scheme, q, p, device_id, ZF)


def rate(breakdown: SinrBreakdown) -> float:
    """Ergodic achievable rate in bits/s/Hz from a SINR breakdown."""
    for t in breakdown.terms:
        if t.prelog <= 0.0:
            raise ValueError(f"non-positive prelog {t.prelog} leaves no data samples")
    return breakdown.rate_bpshz


def asymptotic_sinr_machine(device_id: int, scenario: Scenario, scheme: SchemeConfig,
                            book: PilotBook, q: np.ndarray, p: np.ndarray) -> float:
    """Machine SINR limit as the antenna count grows without bound.

    sc1 and sc2 share one limit (coherent machine interference only); sc3 adds
    the human-data contamination term. Returns inf when the device sees no
    coherent interference at all.
    """
    if scenario.is_human(device_id):
        raise ValueError("asymptotic SINR is defined for machines (human SINRs diverge)")
    if scheme.scheme not in (SC1, SC2, SC3):
        raise ValueError("asymptotic limit defined for sc1/sc2/sc3")
    kh = scenario.params.K_h
    a = device_id - kh
    betas = scenario.betas
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    beta_m, q_m, p_m = betas[kh:], q[kh:], p[kh:]
    cross = book.expected_cross_corr_sq[a].copy()
    cross[a] = 0.0
    denom = float(np.sum(p_m * q_m * beta_m**2 * cross)) / (q_m[a] * beta_m[a])
    if scheme.scheme == SC3:
        denom += float(np.sum(p[:kh] ** 2 * betas[:kh] ** 2)) / (
            scheme.n_p_m * q_m[a] * beta_m[a]
        )
    if denom == 0.0:
        return math.inf
    return beta_m[a] * p_m[a] / denom


# ---------------------------------------------------------------------------
# Monte-Carlo use-and-forget oracle
# ---------------------------------------------------------------------------


def _draw_cn(rng: np.random.Generator, shape: tuple[int, ...], var: float = 1.0) -> np.ndarray:
    return np.sqrt(var / 2.0) * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


class _McAccumulator:
    """Running means of the use-and-forget expectations for a device group."""

    def __init__(self, n: int):
        self.c = np.zeros(n, dtype=complex)    # E[y s*]
        self.c2 = np.zeros(n)                  # E|coherent part|^2
        self.w = np.zeros(n)                   # E|y|^2 - |coherent part|^2
        self.count = 0

    def add(self, c: np.ndarray, w: np.ndarray) -> None:
        self.c += c
        self.c2 += np.abs(c) ** 2
        self.w += w
        self.count += 1

    def sinr(self) -> np.ndarray:
        a = self.c / self.count
        num = np.abs(a) ** 2
        denom = (self.w + self.c2) / self.count - num   # E|y|^2 - |E[y s*]|^2
        return num / denom


def _combine_stats(v: np.ndarray, g_scaled: np.ndarray, noise_power: float,
                   extra: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Symbol-averaged use-and-forget statistics for one data slot.

    ``v``: (M, n) combiners for the n measured devices; ``g_scaled``: (M, j)
    channels of all data transmitters scaled by sqrt(p), with measured device
    i in column i. Returns the own-signal coefficient and the conditional
    interference-plus-noise power; ``extra`` adds a deterministic per-device
    interference power (machine pilots hitting sc3 humans).
    """
    a = v.conj().T @ g_scaled
    c = np.diag(a)
    w = np.sum(np.abs(a) ** 2, axis=1) - np.abs(c) ** 2
    w = w + noise_power * np.sum(np.abs(v) ** 2, axis=0)
    if extra is not None:
        w = w + extra
    return c, w


def _literal_stats(v: np.ndarray, g_scaled: np.ndarray, noise_power: float,
                   rng: np.random.Generator,
                   pilot_slot: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """One literal data slot: draw the symbols and receiver noise explicitly."""
    m, j = g_scaled.shape
    s = _draw_cn(rng, (j,))
    x = g_scaled @ s + _draw_cn(rng, (m,), noise_power)
    if pilot_slot is not None:
        x = x + pilot_slot
    y = v.conj().T @ x
    n = v.shape[1]
    c = y * np.conj(s[:n])
    return c, np.abs(y) ** 2 - np.abs(c) ** 2


def _data_stats(v, g_scaled, noise, rng, condition_symbols, extra=None, pilot_slot=None):
    if condition_symbols:
        return _combine_stats(v, g_scaled, noise, extra=extra)
    return _literal_stats(v, g_scaled, noise, rng, pilot_slot=pilot_slot)


def _lmmse_combiners(y_d: np.ndarray, n_p: int, mu: np.ndarray,
                     denom: np.ndarray, m: int) -> np.ndarray:
    """MRC combiners v = h_hat / (gamma sqrt(M)) from despread observations."""
    gamma = n_p * mu / denom
    h_hat = y_d * (np.sqrt(n_p * mu) / denom)[None, :]
    return h_hat / (gamma[None, :] * np.sqrt(m))


def _embed(phi: np.ndarray, offset: int, n_p: int) -> np.ndarray:
    out = np.zeros((phi.shape[0], n_p), dtype=complex)
    out[:, offset: offset + phi.shape[1]] = phi
    return out


def mc_sinr_all(
    scenario: Scenario,
    scheme: SchemeConfig,
    book: PilotBook,
    q: np.ndarray,
    p: np.ndarray,
    trials: int,
    seed: int,
    condition_symbols: bool = True,
) -> np.ndarray:
    """Use-and-forget SINR estimates for every device, shape (2, K).

    Simulates per trial: small-scale fading, scheme-appropriate training
    (including the sc3 human-data overlap), LMMSE estimation, MRC combining,
    and the data phase. Rows 0 and 1 coincide except for sc3 humans, whose two
    rows are the machine-training and shared-data phases.

    With ``condition_symbols`` the expectations over data symbols and receiver
    noise are taken in closed form per trial while channel and estimation
    randomness stay empirical; this is what makes tight tolerances reachable
    at moderate trial counts. Random-assignment books are redrawn each trial.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    if scheme.scheme not in (SC1, SC2, SC3):
        raise ValueError("MC oracle covers sc1/sc2/sc3")
    params = scenario.params
    if scheme.n_p_h < params.K_h:
        raise ValueError("orthogonal human pilots need n_p_h >= K_h")
    if book.K != params.K_m or book.length != scheme.n_p_m:
        raise ValueError("book must hold one length-n_p_m sequence per machine")
    m_ant, kh, km = params.M, params.K_h, params.K_m
    noise = params.noise_power_w
    betas = scenario.betas
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    mu_h = betas[:kh] * q[:kh]
    mu_m = betas[kh:] * q[kh:]
    sqrt_p = np.sqrt(p)
    rng = np.random.default_rng(seed)

    redraw = book.kind == "random"
    phi_m = book.sequences
    gram_m = np.abs(phi_m @ phi_m.conj().T) ** 2
    nph, npm = scheme.n_p_h, scheme.n_p_m

    acc_h1, acc_h2, acc_m = _McAccumulator(kh), _McAccumulator(kh), _McAccumulator(km)

    def train(g_h, g_m, z_h, z_main, s_over, phi_m, gram_m):
        """LMMSE combiners from one training realization with given noise blocks."""
        v_h = v_m = None
        if scheme.scheme == SC2:
            np_tot = nph + npm
            emb = _embed(phi_m, nph, np_tot)
            y = z_main.copy()
            if kh:
                y[:, :kh] += np.sqrt(np_tot) * g_h * np.sqrt(q[:kh])[None, :]
            y = y + np.sqrt(np_tot) * (g_m * np.sqrt(q[kh:])[None, :]) @ emb.conj()
            if kh:
                v_h = _lmmse_combiners(y[:, :kh], np_tot, mu_h, np_tot * mu_h + noise, m_ant)
            v_m = _lmmse_combiners(y @ emb.T, np_tot, mu_m,
                                   np_tot * (gram_m @ mu_m) + noise, m_ant)
            return v_h, v_m
        if kh:
            y = z_h.copy()
            y[:, :kh] += np.sqrt(nph) * g_h * np.sqrt(q[:kh])[None, :]
            v_h = _lmmse_combiners(y[:, :kh], nph, mu_h, nph * mu_h + noise, m_ant)
        y = z_main + np.sqrt(npm) * (g_m * np.sqrt(q[kh:])[None, :]) @ phi_m.conj()
        overlap = 0.0
        if scheme.scheme == SC3 and kh:
            y = y + g_h @ np.conj(sqrt_p[:kh, None] * s_over)
            overlap = float(np.sum(p[:kh] * betas[:kh]))
        v_m = _lmmse_combiners(y @ phi_m.T, npm, mu_m,
                               npm * (gram_m @ mu_m) + overlap + noise, m_ant)
        return v_h, v_m

    np_main = nph + npm if scheme.scheme == SC2 else npm
    for _ in range(trials):
        h_all = _draw_cn(rng, (m_ant, kh + km))
        g_all = h_all * np.sqrt(betas)[None, :]
        g_h, g_m = g_all[:, :kh], g_all[:, kh:]

        if redraw:
            sub = make_random_assignment_book(npm, km, seed=int(rng.integers(2**63)))
            phi_m = sub.sequences
            gram_m = np.abs(phi_m @ phi_m.conj().T) ** 2

        z_h = _draw_cn(rng, (m_ant, nph), noise) if (kh and scheme.scheme != SC2) else None
        z_main = _draw_cn(rng, (m_ant, np_main), noise)
        s_over = _draw_cn(rng, (kh, npm)) if (scheme.scheme == SC3 and kh) else None

        # training noise enters the combiners linearly, so pairing each draw
        # with its negation cancels the odd-order noise contributions exactly
        # (antithetic variates; only valid when the data phase is conditioned)
        signs = (1.0, -1.0) if condition_symbols else (1.0,)
        g_p_h = g_h * sqrt_p[None, :kh]
        g_p_m = g_m * sqrt_p[None, kh:]
        pilot_mat = None
        if scheme.scheme == SC3 and kh:
            pilot_mat = np.sqrt(npm) * (g_m * np.sqrt(q[kh:])[None, :]) @ phi_m.conj()
        for sign in signs:
            v_h, v_m = train(g_h, g_m,
                             None if z_h is None else sign * z_h,
                             sign * z_main,
                             None if s_over is None else sign * s_over,
                             phi_m, gram_m)
            if scheme.scheme == SC1:
                if kh:
                    c, w = _data_stats(v_h, g_p_h, noise, rng, condition_symbols)
                    acc_h1.add(c, w)
                    acc_h2.add(c, w)
                if km:
                    c, w = _data_stats(v_m, g_p_m, noise, rng, condition_symbols)
                    acc_m.add(c, w)
                continue
            if scheme.scheme == SC3 and kh:
                # humans measured while machines transmit pilots
                if condition_symbols:
                    proj = v_h.conj().T @ pilot_mat
                    extra = np.sum(np.abs(proj) ** 2, axis=1) / npm
                    c, w = _combine_stats(v_h, g_p_h, noise, extra=extra)
                else:
                    slot = int(rng.integers(npm))
                    c, w = _literal_stats(v_h, g_p_h, noise, rng, pilot_slot=pilot_mat[:, slot])
                acc_h1.add(c, w)
            # shared data phase: everyone transmits
            if kh:
                c, w = _data_stats(v_h, np.concatenate([g_p_h, g_p_m], axis=1),
                                   noise, rng, condition_symbols)
                if scheme.scheme == SC2:
                    acc_h1.add(c, w)
                acc_h2.add(c, w)
            c, w = _data_stats(v_m, np.concatenate([g_p_m, g_p_h], axis=1),
                               noise, rng, condition_symbols)
            acc_m.add(c, w)

    out = np.empty((2, kh + km))
    if kh:
        out[0, :kh] = acc_h1.sinr()
        out[1, :kh] = acc_h2.sinr()
    if km:
        out[0, kh:] = acc_m.sinr()
        out[1, kh:] = out[0, kh:]
    return out


def mc_use_and_forget_sinr(
    device_id: int,
    scenario: Scenario,
    scheme: SchemeConfig,
    book: PilotBook,
    q: np.ndarray,
    p: np.ndarray,
    trials: int,
    seed: int,
    condition_symbols: bool = True,
) -> np.ndarray:
    """Monte-Carlo SINR estimate(s) for one device (one entry per SINR phase)."""
    all_sinr = mc_sinr_all(scenario, scheme, book, q, p, trials, seed, condition_symbols)
    if scheme.scheme == SC3 and scenario.is_human(device_id):
        return all_sinr[:, device_id]
    return all_sinr[0:1, device_id]
