"""Pilot codebooks, Gram analytics, feasibility conditions, and optimal pilot powers.

A codebook holds K unit-norm length-N_p sequences (rows); the transmitted pilot
signal is sqrt(N_p) times the sequence. Three kinds are supported:

* ``orthogonal`` - canonical basis sequences, requires K <= N_p;
* ``wbe`` - normalized distinct rows of a K x K FFT matrix, Welch-bound
  equality for K >= N_p;
* ``random`` - each device independently picks one of the N_p canonical
  orthonormal sequences (random pilot allocation, RPA).

A ``composite`` book stacks two books on orthogonal coordinate blocks (used
when humans and machines train in one shared window).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

LS = "ls"
LMMSE = "lmmse"

_NORM_TOL = 1e-12


class InfeasibleError(ValueError):
    """Requested target cannot be met by any non-negative power vector."""


def _check_estimator(estimator: str) -> None:
    if estimator not in (LS, LMMSE):
        raise ValueError(f"estimator must be {LS!r} or {LMMSE!r}, got {estimator!r}")


@dataclass(frozen=True)
class PilotBook:
    """K unit-norm pilot sequences of length N_p plus their cross-correlation model.

    ``expected_cross_corr_sq[i, j]`` is E|phi_i^H phi_j|^2 (unit diagonal);
    for deterministic kinds it equals the realized value, for the random kind
    the off-diagonal entries are the analytic collision probability 1/N_p.
    """

    length: int
    sequences: np.ndarray            # (K, N_p) complex
    kind: str                        # orthogonal | wbe | random | composite
    u: np.ndarray | None = None      # FFT row selector (wbe only)
    seed: int | None = None          # assignment seed (random only)
    expected_cross_corr_sq: np.ndarray = field(default=None, repr=False)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        seq = np.asarray(self.sequences, dtype=complex)
        if seq.ndim != 2 or seq.shape[1] != self.length or seq.shape[0] < 1:
            raise ValueError(f"sequences must be (K, {self.length}), got {seq.shape}")
        norms = np.linalg.norm(seq, axis=1)
        if np.any(np.abs(norms**2 - 1.0) > 1e-9):
            raise ValueError("pilot sequences must be unit norm")
        object.__setattr__(self, "sequences", seq)
        if self.expected_cross_corr_sq is None:
            object.__setattr__(self, "expected_cross_corr_sq", self._realized_cross_sq())

    def _realized_cross_sq(self) -> np.ndarray:
        g = np.abs(self.sequences @ self.sequences.conj().T) ** 2
        np.fill_diagonal(g, 1.0)
        return g

    @property
    def K(self) -> int:
        return self.sequences.shape[0]


@dataclass(frozen=True)
class GramStats:
    """Realized squared cross-correlation analytics of one codebook."""

    phi_matrix: np.ndarray       # (K, K), |phi_i^H phi_j|^2 with zero diagonal
    phi_bar: np.ndarray          # phi_matrix + I
    spectral_radius: float       # rho(phi_bar)
    row_sums: np.ndarray         # row sums of phi_bar
    welch_sum: float             # sum of all |phi_i^H phi_j|^2 incl. diagonal


def make_orthogonal_book(n_p: int, k: int) -> PilotBook:
    """K mutually orthonormal sequences (canonical basis columns)."""
    if not 1 <= k <= n_p:
        raise ValueError(f"orthogonal book needs 1 <= K <= N_p, got K={k}, N_p={n_p}")
    seq = np.zeros((k, n_p), dtype=complex)
    seq[np.arange(k), np.arange(k)] = 1.0
    return PilotBook(length=n_p, sequences=seq, kind="orthogonal")


def make_wbe_book(n_p: int, k_m: int, u: np.ndarray | None = None) -> PilotBook:
    """Welch-bound-equality book from N_p distinct rows of a K_m x K_m FFT matrix.

    Sequence k has entries exp(j 2 pi u_i (k-1) / K_m) / sqrt(N_p). The default
    selector is u_i = i; any selector with N_p entries distinct modulo K_m
    yields the same Gram row sums (K_m / N_p).
    """
    if n_p < 1 or n_p > k_m:
        raise ValueError(f"WBE book needs 1 <= N_p <= K_m, got N_p={n_p}, K_m={k_m}")
    if u is None:
        u = np.arange(1, n_p + 1)
    u = np.asarray(u, dtype=int)
    if u.shape != (n_p,):
        raise ValueError(f"u must have length N_p={n_p}")
    if len(np.unique(u % k_m)) != n_p:
        raise ValueError("u entries must be distinct modulo K_m")
    k_idx = np.arange(k_m)
    seq = np.exp(2j * np.pi * np.outer(k_idx, u) / k_m) / np.sqrt(n_p)
    return PilotBook(length=n_p, sequences=seq, kind="wbe", u=u)


def make_random_assignment_book(n_p: int, k_m: int, seed: int) -> PilotBook:
    """Each device picks one of N_p canonical orthonormal pilots i.i.d. uniform."""
    if n_p < 1 or k_m < 1:
        raise ValueError("need N_p >= 1 and K_m >= 1")
    rng = np.random.default_rng(seed)
    pick = rng.integers(0, n_p, size=k_m)
    seq = np.zeros((k_m, n_p), dtype=complex)
    seq[np.arange(k_m), pick] = 1.0
    expected = np.full((k_m, k_m), 1.0 / n_p)
    np.fill_diagonal(expected, 1.0)
    return PilotBook(length=n_p, sequences=seq, kind="random", seed=seed,
                     expected_cross_corr_sq=expected)


def stack_books(first: PilotBook, second: PilotBook) -> PilotBook:
    """Embed two books on orthogonal coordinate blocks of one longer window.

    The combined book has length ``first.length + second.length``; sequences of
    the two input books keep their mutual cross-correlations and are exactly
    orthogonal across books.
    """
    n_p = first.length + second.length
    seq = np.zeros((first.K + second.K, n_p), dtype=complex)
    seq[: first.K, : first.length] = first.sequences
    seq[first.K:, first.length:] = second.sequences
    expected = np.zeros((first.K + second.K, first.K + second.K))
    expected[: first.K, : first.K] = first.expected_cross_corr_sq
    expected[first.K:, first.K:] = second.expected_cross_corr_sq
    return PilotBook(length=n_p, sequences=seq, kind="composite",
                     expected_cross_corr_sq=expected)


def expected_cross_correlation(book: PilotBook, i: int, j: int) -> float:
    """E|phi_i^H phi_j|^2 for i != j (analytic 1/N_p for the random kind)."""
    if i == j:
        raise ValueError("expected cross-correlation is defined for i != j")
    return float(book.expected_cross_corr_sq[i, j])


def gram_stats(book: PilotBook) -> GramStats:
    """Realized Gram analytics: Phi, Phi_bar, spectral radius, row sums, Welch sum."""
    gram_sq = np.abs(book.sequences @ book.sequences.conj().T) ** 2
    welch_sum = float(gram_sq.sum())
    phi = gram_sq.copy()
    np.fill_diagonal(phi, 0.0)
    phi_bar = phi + np.eye(book.K)
    # symmetric non-negative matrix: Perron-Frobenius makes the top eigenvalue the radius
    spectral_radius = float(np.linalg.eigvalsh(phi_bar)[-1])
    return GramStats(
        phi_matrix=phi,
        phi_bar=phi_bar,
        spectral_radius=spectral_radius,
        row_sums=phi_bar.sum(axis=1),
        welch_sum=welch_sum,
    )


def error_feasible(stats: GramStats, e: float, estimator: str) -> bool:
    """Whether per-device estimation error e is reachable by some positive powers.

    Strict spectral-radius conditions: rho(Phi_bar) < 1 + e for LS and
    rho(Phi_bar) < 1 / (1 - e) for LMMSE (which also needs 0 < e < 1).
    """
    _check_estimator(estimator)
    if estimator == LS:
        if e <= 0.0:
            raise ValueError("LS target error must be positive")
        return stats.spectral_radius < 1.0 + e
    if not 0.0 < e < 1.0:
        raise ValueError("LMMSE target error must lie in (0, 1)")
    return stats.spectral_radius < 1.0 / (1.0 - e)


def min_power_vector(
    stats: GramStats,
    betas: np.ndarray,
    e: float,
    noise_power: float,
    n_p: int,
    estimator: str,
) -> np.ndarray:
    """Minimum pilot powers giving every device the same estimation error e.

    Solves the linear system in mu = beta * q:
    LS      mu = (I - Phi_bar / (1+e))^-1 eta / (1+e)
    LMMSE   mu = (I - (1-e) Phi_bar)^-1 (1-e) eta
    with eta = (sigma^2 / N_p) 1, then maps back to q = mu / beta.
    """
    _check_estimator(estimator)
    betas = np.asarray(betas, dtype=float)
    if np.any(betas <= 0.0):
        raise ValueError("betas must be positive")
    if betas.shape != (stats.phi_bar.shape[0],):
        raise ValueError("betas must have one entry per sequence")
    if not error_feasible(stats, e, estimator):
        raise InfeasibleError(
            f"error target {e} infeasible for spectral radius {stats.spectral_radius:.6g} ({estimator})"
        )
    k = stats.phi_bar.shape[0]
    eta = np.full(k, noise_power / n_p)
    if estimator == LS:
        a = np.eye(k) - stats.phi_bar / (1.0 + e)
        mu = np.linalg.solve(a, eta / (1.0 + e))
    else:
        a = np.eye(k) - (1.0 - e) * stats.phi_bar
        mu = np.linalg.solve(a, (1.0 - e) * eta)
    return mu / betas


def closed_form_power(
    betas: np.ndarray,
    e: float,
    noise_power: float,
    n_p: int,
    k_m: int,
    estimator: str,
) -> np.ndarray:
    """Closed-form minimum pilot powers, valid for any WBE book.

    q_k = sigma^2 / ((N_p (1+e) - K_m) beta_k)            for LS,
    q_k = sigma^2 (1-e) / ((N_p - K_m (1-e)) beta_k)      for LMMSE.
    """
    _check_estimator(estimator)
    betas = np.asarray(betas, dtype=float)
    if np.any(betas <= 0.0):
        raise ValueError("betas must be positive")
    if estimator == LS:
        if e <= 0.0:
            raise ValueError("LS target error must be positive")
        denom = n_p * (1.0 + e) - k_m
        num = noise_power
    else:
        if not 0.0 < e < 1.0:
            raise ValueError("LMMSE target error must lie in (0, 1)")
        denom = n_p - k_m * (1.0 - e)
        num = noise_power * (1.0 - e)
    if denom <= 0.0:
        raise InfeasibleError(f"error target {e} below the {estimator} floor for N_p={n_p}, K_m={k_m}")
    return num / (denom * betas)


def error_floor(k_m: int, n_p: int, estimator: str) -> float:
    """Min-max estimation error floor for WBE training: (K_m - N_p)/K_m (LMMSE) or /N_p (LS)."""
    _check_estimator(estimator)
    if not 1 <= n_p <= k_m:
        raise ValueError(f"floor defined for 1 <= N_p <= K_m, got N_p={n_p}, K_m={k_m}")
    if estimator == LMMSE:
        return (k_m - n_p) / k_m
    return (k_m - n_p) / n_p


def welch_lower_bound(n_p: int, k: int) -> float:
    """Lower bound on the summed squared cross-correlations of K unit-norm vectors.

    K^2 / N_p when K >= N_p; for K < N_p the diagonal contribution K dominates.
    """
    if n_p < 1 or k < 1:
        raise ValueError("need N_p >= 1 and K >= 1")
    return max(float(k), k**2 / n_p)


def export_book_csv(book: PilotBook, path: str | Path) -> None:
    """Write sequences as interleaved real/imag columns, one row per sequence."""
    params = [f"kind={book.kind}", f"N_p={book.length}", f"K={book.K}"]
    if book.u is not None:
        params.append("u=" + ",".join(str(x) for x in book.u))
    if book.seed is not None:
        params.append(f"seed={book.seed}")
    with open(path, "w", newline="") as fh:
        fh.write("# " + " ".join(params) + "\n")
        writer = csv.writer(fh)
        header: list[str] = []
        for i in range(book.length):
            header += [f"re{i}", f"im{i}"]
        writer.writerow(header)
        for row in book.sequences:
            out = np.empty(2 * book.length)
            out[0::2] = row.real
            out[1::2] = row.imag
            writer.writerow([repr(v) for v in out])


def load_book_csv(path: str | Path) -> PilotBook:
    """Read a codebook written by :func:`export_book_csv`."""
    lines = Path(path).read_text().splitlines()
    meta = dict(item.split("=", 1) for item in lines[0].lstrip("# ").split(" "))
    rows = []
    for line in lines[2:]:
        vals = np.array([float(v) for v in line.split(",")])
        rows.append(vals[0::2] + 1j * vals[1::2])
    seq = np.array(rows)
    kind = meta["kind"]
    u = np.array([int(x) for x in meta["u"].split(",")]) if "u" in meta else None
    seed = int(meta["seed"]) if "seed" in meta else None
    if kind == "random":
        k_m, n_p = seq.shape
        expected = np.full((k_m, k_m), 1.0 / n_p)
        np.fill_diagonal(expected, 1.0)
    else:
        expected = None
    return PilotBook(length=int(meta["N_p"]), sequences=seq, kind=kind, u=u, seed=seed,
                     expected_cross_corr_sq=expected)
