"""Dual-type 171Yb+ qubit simulator and fitting toolkit."""

from dualion._core import (
    FitResult,
    average_fidelity_mub,
    config_hash,
    detection_fidelities,
    experiments,
    fit_exp_decay,
    fit_power_decay,
    fit_rb,
    fit_thermal_rabi,
    mean_occupation,
    reference_config,
    run,
    thermal_carrier_signal,
    two_ion_transverse_modes,
)

__all__ = [
    "FitResult",
    "average_fidelity_mub",
    "config_hash",
    "detection_fidelities",
    "experiments",
    "fit_exp_decay",
    "fit_power_decay",
    "fit_rb",
    "fit_thermal_rabi",
    "mean_occupation",
    "reference_config",
    "run",
    "thermal_carrier_signal",
    "two_ion_transverse_modes",
]
