"""Multi-policy test case selection for reinforcement-learning environments.

The heavy lifting lives in the compiled extension; this package re-exports
its surface.
"""

from ._core import (  # noqa: F401
    Archive,
    ArchiveBounds,
    Descriptor,
    Environment,
    EnvState,
    OracleConfig,
    OracleVerdict,
    Policy,
    ScoredTestCase,
    TerminalEvent,
    TestCase,
    Trajectory,
    TrajectoryStep,
    calibrate_bounds,
    descriptor_from,
    difficulty,
    evaluate_suite,
    execute,
    load_environment,
    load_policy,
    make_environment,
    mptcs_insert,
    oracle,
    partition_alternating,
    provision_policy_pool,
    rank_policies,
    run_ga_campaign,
    save_policy,
)

__all__ = [
    "Archive",
    "ArchiveBounds",
    "Descriptor",
    "Environment",
    "EnvState",
    "OracleConfig",
    "OracleVerdict",
    "Policy",
    "ScoredTestCase",
    "TerminalEvent",
    "TestCase",
    "Trajectory",
    "TrajectoryStep",
    "calibrate_bounds",
    "descriptor_from",
    "difficulty",
    "evaluate_suite",
    "execute",
    "load_environment",
    "load_policy",
    "make_environment",
    "mptcs_insert",
    "oracle",
    "partition_alternating",
    "provision_policy_pool",
    "rank_policies",
    "run_ga_campaign",
    "save_policy",
]
