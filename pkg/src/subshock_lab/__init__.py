"""Traveling-wave analysis for a viscous parabolic-elliptic conservation law.

The package computes singular (eps = 0) shock profiles with an interior
sub-shock, validates their spectral and transversality structure, continues
the profiles to eps > 0 by collocation, analyzes the small-shock transcritical
bifurcation at eps = 1, and confirms profiles against a direct finite
difference evolution of the PDE system.
"""

from .errors import (
    BoundaryDefectTooLarge,
    BoundedAdjoint,
    CflViolated,
    ConditionFailed,
    ContinuationStalled,
    DegenerateTransversality,
    EqualStates,
    FitResidualTooLarge,
    FrontLeftDomain,
    LeftDomain,
    MultipleIntersections,
    NewtonDiverged,
    NoIntersection,
    NotASaddle,
    NotNormallyHyperbolic,
    NotOnSlowManifold,
    OrderingViolated,
    OutOfDomain,
    SolverError,
    StepCapExceeded,
    SubshockLabError,
    ValidationError,
    WrongSignStructure,
)
from .model import (
    Branch,
    LaxReport,
    LinearCoupling,
    ModelSpec,
    PowerPlusLinearCoupling,
    QuadraticFlux,
    Subshock,
    WaveProblem,
    branch_inverse,
    check_lax,
    rankine_hugoniot_speed,
    sonic_point,
    subshock_expected,
)

__all__ = [
    "Branch",
    "LaxReport",
    "LinearCoupling",
    "ModelSpec",
    "PowerPlusLinearCoupling",
    "QuadraticFlux",
    "Subshock",
    "WaveProblem",
    "branch_inverse",
    "check_lax",
    "rankine_hugoniot_speed",
    "sonic_point",
    "subshock_expected",
    "SubshockLabError",
    "ValidationError",
    "SolverError",
    "EqualStates",
    "OutOfDomain",
    "NotOnSlowManifold",
    "NotNormallyHyperbolic",
    "NotASaddle",
    "OrderingViolated",
    "StepCapExceeded",
    "LeftDomain",
    "NoIntersection",
    "MultipleIntersections",
    "WrongSignStructure",
    "DegenerateTransversality",
    "BoundedAdjoint",
    "NewtonDiverged",
    "BoundaryDefectTooLarge",
    "ContinuationStalled",
    "ConditionFailed",
    "FitResidualTooLarge",
    "CflViolated",
    "FrontLeftDomain",
]

__version__ = "0.1.0"
