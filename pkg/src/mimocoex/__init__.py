"""Uplink simulator for a single-cell massive MIMO system serving humans and machines.

Subpackages cover deployment generation (:mod:`mimocoex.scenario`), pilot
codebooks and optimal pilot powers (:mod:`mimocoex.pilots`), training-signal
synthesis and LS/LMMSE estimation (:mod:`mimocoex.estimation`), closed-form and
Monte-Carlo achievable rates (:mod:`mimocoex.rates`), max-min data power
control and rate-region tracing (:mod:`mimocoex.powerctl`), and the experiment
runner / CLI (:mod:`mimocoex.harness`, :mod:`mimocoex.cli`).
"""

__version__ = "0.1.0"

from mimocoex.scenario import Device, Scenario, SystemParams, place_devices
from mimocoex.pilots import (
    GramStats,
    PilotBook,
    closed_form_power,
    error_feasible,
    error_floor,
    expected_cross_correlation,
    gram_stats,
    make_orthogonal_book,
    make_random_assignment_book,
    make_wbe_book,
    min_power_vector,
    welch_lower_bound,
)
from mimocoex.rates import SchemeConfig, SinrBreakdown

__all__ = [
    "Device",
    "Scenario",
    "SystemParams",
    "place_devices",
    "GramStats",
    "PilotBook",
    "closed_form_power",
    "error_feasible",
    "error_floor",
    "expected_cross_correlation",
    "gram_stats",
    "make_orthogonal_book",
    "make_random_assignment_book",
    "make_wbe_book",
    "min_power_vector",
    "welch_lower_bound",
    "SchemeConfig",
    "SinrBreakdown",
]
