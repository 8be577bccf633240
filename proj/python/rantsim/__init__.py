"""Python access to the rantsim simulator."""

from ._rantsim import (
    ConfigError,
    TrapRegime,
    classify,
    critical_gain,
    trapping_radius_geometric,
    implicit_radius_large_decay,
    nondim_flow,
    integrate_phase,
    lindstedt_frequency,
    greens_oracle,
    continuum_preset,
    known_keys,
    scenario_echo,
    run,
)

__all__ = [
    "ConfigError",
    "TrapRegime",
    "classify",
    "critical_gain",
    "trapping_radius_geometric",
    "implicit_radius_large_decay",
    "nondim_flow",
    "integrate_phase",
    "lindstedt_frequency",
    "greens_oracle",
    "continuum_preset",
    "known_keys",
    "scenario_echo",
    "run",
]
