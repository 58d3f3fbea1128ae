"""Multispecies BGK kinetic solvers and their cross-diffusion limits.

Two kinetic models on a periodic 1D slab with 3D-consistent velocity space
(reduced to a Chu pair), their macroscopic limit systems (a non-isothermal
Maxwell-Stefan variant and generalized Busenberg-Travis equations), and the
diagnostics that verify conservation laws, entropy identities and the
empirical eps -> 0 convergence.
"""

from .core import (ConfigError, Grid1D, InvariantViolation, KineticState,
                   MacroStateBT, MacroStateMS, MixtureParams, RegimeKind,
                   ScalingRegime, VelocityGrid1D, default_velocity_grid,
                   init_kinetic_state, scaling_from_physical, validate_params)

__all__ = [
    "ConfigError", "Grid1D", "InvariantViolation", "KineticState",
    "MacroStateBT", "MacroStateMS", "MixtureParams", "RegimeKind",
    "ScalingRegime", "VelocityGrid1D", "default_velocity_grid",
    "init_kinetic_state", "scaling_from_physical", "validate_params",
]

__version__ = "0.1.0"
