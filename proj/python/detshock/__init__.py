"""Detached bow shock solver."""

from ._core import (
    BluntBody,
    BranchCollisionError,
    ConfigError,
    ConvergenceError,
    DomainError,
    FlowState,
    GasParams,
    GeometryError,
    PolarSolution,
    SolverError,
    config_hash,
    default_body,
    detachment_angle,
    enthalpy,
    incoming_state,
    mach_of_rho,
    min_cutoff_height,
    polar_curve,
    q_gamma_rate,
    rho_hat,
    rho_max,
    rho_sonic,
    run_command,
    solve,
    solve_branches,
    sound_speed,
)

__all__ = [
    "BluntBody",
    "BranchCollisionError",
    "ConfigError",
    "ConvergenceError",
    "DomainError",
    "FlowState",
    "GasParams",
    "GeometryError",
    "PolarSolution",
    "SolverError",
    "config_hash",
    "default_body",
    "detachment_angle",
    "enthalpy",
    "incoming_state",
    "mach_of_rho",
    "min_cutoff_height",
    "polar_curve",
    "q_gamma_rate",
    "rho_hat",
    "rho_max",
    "rho_sonic",
    "run_command",
    "solve",
    "solve_branches",
    "sound_speed",
]
