"""Problem instances, their penalized objectives and exact evaluators."""
from .appendix import (
    CliqueCoverInstance,
    LayeredParents,
    LayeredTreeInstance,
    RobustCliqueInstance,
    RobustDominatingInstance,
    build_cc,
    build_mst,
    build_rds,
    build_rkc,
)
from .base import Problem, Report
from .coloring import RobustColoringInstance, build_rc
from .coverage import CoverageInstance, build_mc
from .facility import FacilityInstance, build_fl
from .solve import DERAND_METHODS, SolveResult, default_config, derandomize, solve

KINDS = {
    "fl": FacilityInstance,
    "mc": CoverageInstance,
    "rc": RobustColoringInstance,
    "rkc": RobustCliqueInstance,
    "rds": RobustDominatingInstance,
    "cc": CliqueCoverInstance,
    "mst": LayeredTreeInstance,
}


def evaluate_discrete(problem: Problem, X) -> Report:
    """Exact objective and constraint violations of a discrete decision."""
    return problem.evaluate(X)


__all__ = [
    "KINDS", "Problem", "Report", "SolveResult", "DERAND_METHODS",
    "FacilityInstance", "CoverageInstance", "RobustColoringInstance",
    "RobustCliqueInstance", "RobustDominatingInstance", "CliqueCoverInstance",
    "LayeredTreeInstance", "LayeredParents",
    "build_fl", "build_mc", "build_rc", "build_rkc", "build_rds", "build_cc", "build_mst",
    "evaluate_discrete", "solve", "default_config", "derandomize",
]
