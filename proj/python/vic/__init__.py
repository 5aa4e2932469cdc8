"""Variable impedance table-cleaning simulator."""

from ._vic import (
    ConfigError,
    DataError,
    Error,
    NumericError,
    compare,
    config_hash,
    damping_from_stiffness,
    demo,
    fit_em,
    generate_reference,
    rollout,
    solve_stiffness_qp,
    train,
    weighted_inverse_dynamics,
)

__all__ = [
    "ConfigError",
    "DataError",
    "Error",
    "NumericError",
    "compare",
    "config_hash",
    "damping_from_stiffness",
    "demo",
    "fit_em",
    "generate_reference",
    "rollout",
    "solve_stiffness_qp",
    "train",
    "weighted_inverse_dynamics",
]
