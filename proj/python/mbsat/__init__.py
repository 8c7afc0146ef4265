"""Multi-agent joint search and track with multi-Bernoulli filters."""

from ._mbsat import (
    ConfigError,
    DomainError,
    InfeasibleError,
    Scenario,
    SensingConfig,
    SizeError,
    __version__,
    detection_probability,
    load_scenario,
    monte_carlo,
    oracle_check,
    ospa,
    parse_scenario,
    run,
    sweep_w,
    track_cost_from_statistics,
    write_outputs,
)

SEARCH = 0
TRACK = 1

__all__ = [
    "ConfigError",
    "DomainError",
    "InfeasibleError",
    "SEARCH",
    "Scenario",
    "SensingConfig",
    "SizeError",
    "TRACK",
    "__version__",
    "detection_probability",
    "load_scenario",
    "monte_carlo",
    "oracle_check",
    "ospa",
    "parse_scenario",
    "run",
    "sweep_w",
    "track_cost_from_statistics",
    "write_outputs",
]
