"""Discrete-event validation of the approximations."""

from .harness import (
    MODELS,
    ReplicationRecord,
    SimEstimate,
    SimScenario,
    estimates_by_name,
    load_scenario,
    replication_generator,
    run_replications,
    scenario_from_dict,
    simulate,
    slice_estimates,
)

__all__ = [
    "MODELS",
    "ReplicationRecord",
    "SimEstimate",
    "SimScenario",
    "estimates_by_name",
    "load_scenario",
    "replication_generator",
    "run_replications",
    "scenario_from_dict",
    "simulate",
    "slice_estimates",
]
