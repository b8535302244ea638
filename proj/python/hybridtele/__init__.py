"""Hybrid-qubit teleportation under photon loss."""

from ._core import (  # noqa: F401
    ConfigError,
    ContractViolation,
    CutoffInsufficientError,
    F_I,
    F_II_numeric,
    P_I,
    P_II,
    balpha_success_probability,
    bell_decomposition_check,
    channel_trace_distance,
    coherent_overlap,
    f_formula,
    p_formula,
    sphere_averages,
    sweep_csv,
    teleport_once,
)

CLASSICAL_LIMIT = 2.0 / 3.0

__version__ = "0.1.0"
