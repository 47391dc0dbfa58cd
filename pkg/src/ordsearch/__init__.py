"""Numerical adversary for quantum ordered search.

Builds hard input pairs for a given query algorithm and checks every
inequality of the lower-bound argument on concrete state vectors.
"""
from .adversary import (
    AdversaryParams,
    Interval,
    check_step_invariant,
    construct_hard_input,
    derive_params,
    plan_schedule,
    subdivide,
    weighted_sum,
)
from .algorithms import lifted_binary_search, random_algorithm, truncated_binary_search, zero_query
from .errors import ConfigError, InequalityViolation, RegimeError
from .kernels import backend_name
from .query_model import QueryAlgorithm, ThresholdInput, run_full, success_probability
from .state_core import BasisLayout, StateVector
from .verifier import bv_gap, hybrid_profile, verdict

__all__ = [
    "AdversaryParams",
    "BasisLayout",
    "ConfigError",
    "InequalityViolation",
    "Interval",
    "QueryAlgorithm",
    "RegimeError",
    "StateVector",
    "ThresholdInput",
    "backend_name",
    "bv_gap",
    "check_step_invariant",
    "construct_hard_input",
    "derive_params",
    "hybrid_profile",
    "lifted_binary_search",
    "plan_schedule",
    "random_algorithm",
    "run_full",
    "subdivide",
    "success_probability",
    "truncated_binary_search",
    "verdict",
    "weighted_sum",
    "zero_query",
]
__version__ = "0.1.0"
