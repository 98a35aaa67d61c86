"""Single-cell deployment: device placement, large-scale fading, system parameters.

Distances are stored in meters; the path-loss law internally converts to km.
Device ordering is fixed: all humans first, then all machines.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

HUMAN = "human"
MACHINE = "machine"


@dataclass(frozen=True)
class SystemParams:
    """Static system parameters of one deployment (Table-I style defaults)."""

    M: int = 100                    # BS antennas
    N: int = 100                    # coherence interval length (samples)
    K_h: int = 5                    # humans
    K_m: int = 45                   # machines
    cell_radius_m: float = 250.0
    d_min_m: float = 20.0
    noise_power_w: float = 2e-13    # total noise power sigma^2 (W)
    q_max_w: float = 1.0            # pilot power cap (W)
    p_max_w: float = 1.0            # data power cap (W)
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.M < 1:
            raise ValueError(f"M must be >= 1, got {self.M}")
        if self.K_h < 0 or self.K_m < 0 or self.K_h + self.K_m < 1:
            raise ValueError(f"need K_h >= 0, K_m >= 0, K_h+K_m >= 1, got ({self.K_h}, {self.K_m})")
        if self.N < self.K_h + 1:
            raise ValueError(f"N must be >= K_h + 1 = {self.K_h + 1}, got {self.N}")
        if not (0.0 < self.d_min_m < self.cell_radius_m):
            raise ValueError("need 0 < d_min_m < cell_radius_m")
        if self.noise_power_w <= 0.0:
            raise ValueError("noise_power_w must be positive")
        if self.q_max_w <= 0.0 or self.p_max_w <= 0.0:
            raise ValueError("power caps must be positive")

    @property
    def K(self) -> int:
        return self.K_h + self.K_m


@dataclass(frozen=True)
class Device:
    """One device: index, class tag, distance from the BS, and linear channel gain."""

    id: int
    cls: str                # HUMAN or MACHINE
    distance_m: float
    beta: float             # linear large-scale fading coefficient

    def __post_init__(self) -> None:
        if self.cls not in (HUMAN, MACHINE):
            raise ValueError(f"unknown device class {self.cls!r}")
        if self.beta <= 0.0:
            raise ValueError("beta must be positive")


@dataclass(frozen=True)
class Scenario:
    """Immutable deployment: parameters plus the ordered device list (humans first)."""

    params: SystemParams
    devices: tuple[Device, ...]
    beta_min: float = field(default=0.0)  # large-scale coefficient at the cell edge

    def __post_init__(self) -> None:
        if len(self.devices) != self.params.K:
            raise ValueError("device count must equal K_h + K_m")
        classes = [d.cls for d in self.devices]
        if classes != [HUMAN] * self.params.K_h + [MACHINE] * self.params.K_m:
            raise ValueError("devices must be ordered humans first, then machines")
        if self.beta_min <= 0.0:
            object.__setattr__(self, "beta_min", beta_from_distance(self.params.cell_radius_m))

    @property
    def betas(self) -> np.ndarray:
        """Large-scale coefficients of all devices, shape (K,)."""
        return np.array([d.beta for d in self.devices])

    @property
    def human_ids(self) -> np.ndarray:
        return np.arange(self.params.K_h)

    @property
    def machine_ids(self) -> np.ndarray:
        return np.arange(self.params.K_h, self.params.K)

    def is_human(self, device_id: int) -> bool:
        return device_id < self.params.K_h


def path_loss_db(distance_m: float) -> float:
    """Path loss in dB at the given distance: 130 + 37.6 log10(d_km)."""
    if distance_m <= 0.0:
        raise ValueError("distance must be positive")
    return 130.0 + 37.6 * math.log10(distance_m / 1000.0)


def beta_from_distance(distance_m: float) -> float:
    """Linear large-scale fading coefficient from the path-loss law."""
    return 10.0 ** (-path_loss_db(distance_m) / 10.0)


def place_devices(params: SystemParams) -> Scenario:
    """Drop K_h + K_m devices uniformly over the annulus [d_min, R] (uniform in area).

    Deterministic given ``params.rng_seed``: the radius is d = sqrt(d_min^2 +
    U (R^2 - d_min^2)) with U uniform on [0, 1), which is the area-uniform law.
    """
    rng = np.random.default_rng(params.rng_seed)
    u = rng.random(params.K)
    d = np.sqrt(params.d_min_m**2 + u * (params.cell_radius_m**2 - params.d_min_m**2))
    devices = tuple(
        Device(
            id=k,
            cls=HUMAN if k < params.K_h else MACHINE,
            distance_m=float(d[k]),
            beta=beta_from_distance(float(d[k])),
        )
        for k in range(params.K)
    )
    return Scenario(params=params, devices=devices)


def save_scenario(scenario: Scenario, path: str | Path) -> None:
    """Dump a scenario to a human-readable JSON file (params + device table)."""
    doc = {
        "params": {
            "M": scenario.params.M,
            "N": scenario.params.N,
            "K_h": scenario.params.K_h,
            "K_m": scenario.params.K_m,
            "cell_radius_m": scenario.params.cell_radius_m,
            "d_min_m": scenario.params.d_min_m,
            "noise_power_w": scenario.params.noise_power_w,
            "q_max_w": scenario.params.q_max_w,
            "p_max_w": scenario.params.p_max_w,
            "rng_seed": scenario.params.rng_seed,
        },
        "beta_min": scenario.beta_min,
        "devices": [
            {"id": d.id, "class": d.cls, "distance_m": d.distance_m, "beta": d.beta}
            for d in scenario.devices
        ],
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def load_scenario(path: str | Path) -> Scenario:
    """Load a scenario dumped by :func:`save_scenario` (replay mode)."""
    doc = json.loads(Path(path).read_text())
    params = SystemParams(**doc["params"])
    devices = tuple(
        Device(id=d["id"], cls=d["class"], distance_m=d["distance_m"], beta=d["beta"])
        for d in doc["devices"]
    )
    return Scenario(params=params, devices=devices, beta_min=doc.get("beta_min", 0.0))
