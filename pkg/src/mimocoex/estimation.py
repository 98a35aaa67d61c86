"""Training-signal synthesis, de-spreading, and LS/LMMSE channel estimation.

The received training block is Y = sqrt(N_p) sum_k sqrt(q_k) g_k phi_k^H + Z
over the devices that train in the window; under sc3 the humans' data symbols
overlap the machines' training and act as extra (non-Gaussian) noise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from mimocoex.pilots import PilotBook, make_random_assignment_book, make_wbe_book
from mimocoex.rates import SC3, SchemeConfig
from mimocoex.scenario import Scenario

LS = "ls"
LMMSE = "lmmse"

MACHINES = "machines"
HUMANS = "humans"
ALL = "all"


def draw_fading(m: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """i.i.d. CN(0, 1) small-scale fading matrix, shape (M, K)."""
    return (rng.standard_normal((m, k)) + 1j * rng.standard_normal((m, k))) / np.sqrt(2.0)


@dataclass(frozen=True)
class TrainingObservation:
    """One synthesized training block plus its ground truth and context."""

    Y: np.ndarray                 # (M, N_p) received block
    H: np.ndarray                 # (M, K) true small-scale fading, all devices
    trained_ids: np.ndarray       # global indices of the devices that trained
    overlap_ids: np.ndarray       # global indices transmitting data in the window
    book: PilotBook
    noise_power: float


@dataclass(frozen=True)
class ChannelEstimate:
    """Estimate of one device's M-vector channel with its analytic error."""

    h_hat: np.ndarray
    estimator: str                # ls | lmmse
    gamma: float | None           # LMMSE per-component mean square, None for LS
    error_ms: float               # analytic per-component mean-square error


def synthesize_training(
    scenario: Scenario,
    book: PilotBook,
    q: np.ndarray,
    scheme: SchemeConfig,
    p: np.ndarray | None = None,
    seed: int = 0,
    trained: str = MACHINES,
) -> TrainingObservation:
    """Received training block for one scheme window.

    ``trained`` selects who transmits pilots (book rows must line up with that
    set in scenario order). Passing data powers ``p`` adds the sc3 overlap:
    humans transmit unit-power Gaussian symbols scaled by sqrt(p) while the
    machines train. Deterministic given ``seed``; the fading for all K devices
    is drawn first, then the noise block, then any overlap symbols, so that
    degenerate configurations reduce bitwise to their simpler scheme.
    """
    params = scenario.params
    if trained == MACHINES:
        ids = np.arange(params.K_h, params.K)
    elif trained == HUMANS:
        ids = np.arange(params.K_h)
    elif trained == ALL:
        ids = np.arange(params.K)
    else:
        raise ValueError(f"unknown trained set {trained!r}")
    if book.K != len(ids):
        raise ValueError(f"book has {book.K} sequences for {len(ids)} training devices")
    if p is not None and scheme.scheme != SC3:
        raise ValueError("data overlap during training only occurs under sc3")
    q = np.asarray(q, dtype=float)
    if np.any(q[ids] > params.q_max_w * (1.0 + 1e-12)):
        raise ValueError("pilot powers exceed the cap")

    rng = np.random.default_rng(seed)
    h = draw_fading(params.M, params.K, rng)
    z = np.sqrt(params.noise_power_w / 2.0) * (
        rng.standard_normal((params.M, book.length))
        + 1j * rng.standard_normal((params.M, book.length))
    )
    betas = scenario.betas
    g = h * np.sqrt(betas)[None, :]
    amp = np.sqrt(book.length * q[ids])
    y = (g[:, ids] * amp[None, :]) @ book.sequences.conj() + z

    overlap_ids = np.array([], dtype=int)
    if p is not None:
        p = np.asarray(p, dtype=float)
        if np.any(p > params.p_max_w * (1.0 + 1e-12)):
            raise ValueError("data powers exceed the cap")
        overlap_ids = np.arange(params.K_h)
        s = (rng.standard_normal((params.K_h, book.length))
             + 1j * rng.standard_normal((params.K_h, book.length))) / np.sqrt(2.0)
        x = np.sqrt(p[overlap_ids])[:, None] * s
        y = y + g[:, overlap_ids] @ np.conj(x)
    return TrainingObservation(Y=y, H=h, trained_ids=ids, overlap_ids=overlap_ids,
                               book=book, noise_power=params.noise_power_w)


def despread(y: np.ndarray, phi_k: np.ndarray) -> np.ndarray:
    """Project the received block onto one pilot sequence: y_k = Y phi_k."""
    return y @ phi_k


def estimate_ls(
    y_k: np.ndarray,
    k: int,
    book: PilotBook,
    betas: np.ndarray,
    q: np.ndarray,
    noise_power: float,
) -> ChannelEstimate:
    """Least-squares estimate from a despread observation.

    ``betas`` and ``q`` line up with the book rows; ``k`` is the row index of
    the estimated device. The analytic error uses the realized codebook Gram.
    """
    betas = np.asarray(betas, dtype=float)
    q = np.asarray(q, dtype=float)
    if q[k] <= 0.0:
        raise ValueError("LS estimation needs a positive pilot power")
    n_p = book.length
    scale = np.sqrt(n_p * betas[k] * q[k])
    cross = np.abs(book.sequences @ book.sequences[k].conj()) ** 2
    cross[k] = 0.0
    err = (n_p * float(np.sum(betas * q * cross)) + noise_power) / (n_p * betas[k] * q[k])
    return ChannelEstimate(h_hat=y_k / scale, estimator=LS, gamma=None, error_ms=err)


def estimate_lmmse(
    y_k: np.ndarray,
    k: int,
    book: PilotBook,
    betas: np.ndarray,
    q: np.ndarray,
    noise_power: float,
    overlap_load: float = 0.0,
) -> ChannelEstimate:
    """LMMSE estimate from a despread observation.

    ``overlap_load`` is the received human data power during machine training
    (sum of p*beta over humans, sc3 only); it enters the scaling denominator,
    where the estimator is linear-MMSE but no longer the true MMSE.
    """
    betas = np.asarray(betas, dtype=float)
    q = np.asarray(q, dtype=float)
    n_p = book.length
    cross = np.abs(book.sequences @ book.sequences[k].conj()) ** 2
    denom = n_p * float(np.sum(betas * q * cross)) + overlap_load + noise_power
    gamma = n_p * betas[k] * q[k] / denom
    scale = np.sqrt(n_p * betas[k] * q[k]) / denom
    return ChannelEstimate(h_hat=scale * y_k, estimator=LMMSE, gamma=gamma,
                           error_ms=1.0 - gamma)


def nmse_curve(
    k_m: int,
    n_p: int,
    m: int,
    book_kind: str,
    estimator: str,
    snr_db_grid,
    trials: int,
    seed: int,
) -> list[dict]:
    """Monte-Carlo normalized mean-square estimation error over an SNR grid.

    Equal unit large-scale coefficients and equal pilot powers; SNR is defined
    as q * beta / sigma^2 per pilot symbol with sigma^2 = 1, so q is the SNR in
    linear scale. Random-assignment books are redrawn every trial. Returns one
    row per grid point with keys snr_db, nmse, estimator, book_kind, K_m, N_p,
    M, trials, seed.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    if estimator not in (LS, LMMSE):
        raise ValueError(f"estimator must be {LS!r} or {LMMSE!r}")
    if book_kind not in ("wbe", "random"):
        raise ValueError("book_kind must be 'wbe' or 'random'")
    noise_power = 1.0
    rng = np.random.default_rng(seed)
    fixed_book = make_wbe_book(n_p, k_m) if book_kind == "wbe" else None
    rows = []
    for snr_db in snr_db_grid:
        q = 10.0 ** (float(snr_db) / 10.0)
        acc = 0.0
        for _ in range(trials):
            book = fixed_book
            if book is None:
                book = make_random_assignment_book(n_p, k_m, seed=int(rng.integers(2**63)))
            phi = book.sequences
            h = draw_fading(m, k_m, rng)
            z = np.sqrt(noise_power / 2.0) * (
                rng.standard_normal((m, n_p)) + 1j * rng.standard_normal((m, n_p))
            )
            y = np.sqrt(n_p * q) * h @ phi.conj() + z
            y_d = y @ phi.T
            if estimator == LS:
                h_hat = y_d / np.sqrt(n_p * q)
            else:
                gram = np.abs(phi @ phi.conj().T) ** 2
                denom = n_p * q * gram.sum(axis=1) + noise_power
                h_hat = y_d * (np.sqrt(n_p * q) / denom)[None, :]
            acc += float(np.sum(np.abs(h_hat - h) ** 2))
        rows.append({
            "snr_db": float(snr_db),
            "nmse": acc / (trials * m * k_m),
            "estimator": estimator,
            "book_kind": book_kind,
            "K_m": k_m,
            "N_p": n_p,
            "M": m,
            "trials": trials,
            "seed": seed,
        })
    return rows
