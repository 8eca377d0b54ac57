"""Exception taxonomy.

Two broad families matter to callers: input/validation problems (the CLI maps
these to exit code 2) and numerical solver failures (exit code 3).
``NoIntersection`` sits apart because a missing sub-shock matching is a
legitimate domain outcome, not a failure.
"""

from __future__ import annotations


class SubshockLabError(Exception):
    """Base class for everything raised by this package."""


class ValidationError(SubshockLabError):
    """Bad input: configuration, state pair, or evaluation point."""


class SolverError(SubshockLabError):
    """A numerical routine failed to meet its contract."""


class EqualStates(ValidationError):
    """Left and right states coincide; no shock data."""


class OutOfDomain(ValidationError):
    """Argument outside the domain of a slow-manifold branch."""


class NotOnSlowManifold(ValidationError):
    """Point does not satisfy F = 0 to tolerance."""


class NotNormallyHyperbolic(ValidationError):
    """df_c vanishes at the point; the slow branch degenerates."""


class NotASaddle(SolverError):
    """Reduced equilibrium lacks the expected saddle splitting."""


class OrderingViolated(SolverError):
    """Reduced eigenvalues violate the required ordering chain."""


class StepCapExceeded(SolverError):
    """Phase-curve integration exceeded its step budget."""


class LeftDomain(SolverError):
    """Trajectory left the branch domain before reaching its target."""


class NoIntersection(SubshockLabError):
    """Saddle curves do not cross: no sub-shock at these states."""


class MultipleIntersections(SolverError):
    """More than one crossing of the saddle curves; corrupted data."""


class WrongSignStructure(SolverError):
    """Layer field F has the wrong sign between its roots."""


class DegenerateTransversality(SolverError):
    """Transversality determinant vanishes to tolerance."""


class BoundedAdjoint(SolverError):
    """Adjoint solution fails to grow in both directions."""


class NewtonDiverged(SolverError):
    """Newton iteration failed to converge."""


class BoundaryDefectTooLarge(SolverError):
    """Endpoint states too far from the rest states; increase L."""


class ContinuationStalled(SolverError):
    """Continuation step shrank below its bisection budget."""


class ConditionFailed(SolverError):
    """A transcriticality condition failed; reports which one."""


class FitResidualTooLarge(SolverError):
    """Normal-form coefficient fit left too large a residual."""


class CflViolated(ValidationError):
    """Requested time step exceeds the explicit stability bound."""


class FrontLeftDomain(SolverError):
    """Front crossing left the measurable window."""
