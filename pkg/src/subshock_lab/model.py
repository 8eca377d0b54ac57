"""Model data: flux and coupling laws, shock states, slow-manifold branches.

The underlying system is

    u_t + f(u)_x - eps u_xx = v_x,      v - v_xx = g(u)_x,

with uniformly convex flux f and strictly increasing coupling g.  Traveling
waves with speed c reduce everything to the shifted flux f_c(u) = f(u) - c u;
this module owns those algebraic pieces: the Rankine-Hugoniot speed, the Lax
conditions, the sonic point u_star where df(u_star) = c, and the two inverse
branches of f_c on either side of u_star.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Union

import numpy as np

from .errors import EqualStates, OutOfDomain, ValidationError

SQRT2 = math.sqrt(2.0)


class Branch(Enum):
    """Slow-manifold branch: MINUS holds u_minus (df_c > 0), PLUS holds u_plus."""

    MINUS = "minus"
    PLUS = "plus"


class Subshock(Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class QuadraticFlux:
    """f(u) = a u^2 / 2 + b u with a > 0 (uniform convexity)."""

    a: float = 1.0
    b: float = 0.0

    def __post_init__(self) -> None:
        if not self.a > 0.0:
            raise ValidationError(f"flux coefficient a must be positive, got {self.a}")

    def f(self, u):
        return 0.5 * self.a * u * u + self.b * u

    def df(self, u):
        return self.a * u + self.b

    def d2f(self, u):
        return self.a * np.ones_like(np.asarray(u, dtype=float))


@dataclass(frozen=True)
class LinearCoupling:
    """g(u) = slope * u with slope > 0."""

    slope: float = 1.0

    def __post_init__(self) -> None:
        if not self.slope > 0.0:
            raise ValidationError(f"coupling slope must be positive, got {self.slope}")

    def g(self, u):
        return self.slope * u

    def dg(self, u):
        return self.slope * np.ones_like(np.asarray(u, dtype=float))


@dataclass(frozen=True)
class PowerPlusLinearCoupling:
    """g(u) = u + kappa u^m with kappa >= 0 and odd m >= 3, so dg > 0 everywhere."""

    kappa: float
    m: int

    def __post_init__(self) -> None:
        if self.kappa < 0.0:
            raise ValidationError(f"kappa must be nonnegative, got {self.kappa}")
        if self.m < 3 or self.m % 2 == 0:
            raise ValidationError(f"exponent m must be odd and >= 3, got {self.m}")

    def g(self, u):
        return u + self.kappa * u**self.m

    def dg(self, u):
        return 1.0 + self.kappa * self.m * u ** (self.m - 1)


Coupling = Union[LinearCoupling, PowerPlusLinearCoupling]


@dataclass(frozen=True)
class ModelSpec:
    """A flux law paired with a coupling law."""

    flux: QuadraticFlux
    coupling: Coupling

    @classmethod
    def hamer(cls) -> "ModelSpec":
        """The radiating-gas model: f(u) = u^2/2, g(u) = u."""
        return cls(QuadraticFlux(1.0, 0.0), LinearCoupling(1.0))

    def f(self, u):
        return self.flux.f(u)

    def df(self, u):
        return self.flux.df(u)

    def d2f(self, u):
        return self.flux.d2f(u)

    def g(self, u):
        return self.coupling.g(u)

    def dg(self, u):
        return self.coupling.dg(u)


def rankine_hugoniot_speed(model: ModelSpec, u_minus: float, u_plus: float) -> float:
    """Jump speed c = (f(u_plus) - f(u_minus)) / (u_plus - u_minus)."""
    if u_minus == u_plus:
        raise EqualStates(f"end states coincide: u_minus = u_plus = {u_minus}")
    return (model.f(u_plus) - model.f(u_minus)) / (u_plus - u_minus)


@dataclass(frozen=True)
class WaveProblem:
    """A shock data set: model, end states, speed, and derived constants.

    Instances are built through :meth:`build`, which computes the speed from
    the Rankine-Hugoniot condition, the sonic point u_star, and the common
    plateau value f_c(u_minus) = f_c(u_plus).  Non-Lax state pairs are
    representable (so :func:`check_lax` can report on them); routines that
    need admissibility check it themselves.
    """

    model: ModelSpec
    u_minus: float
    u_plus: float
    c: float
    u_star: float
    fc_plateau: float
    epsilon: float = 0.0

    @classmethod
    def build(
        cls,
        model: ModelSpec,
        u_minus: float,
        u_plus: float,
        epsilon: float = 0.0,
    ) -> "WaveProblem":
        if epsilon < 0.0:
            raise ValidationError(f"epsilon must be nonnegative, got {epsilon}")
        c = rankine_hugoniot_speed(model, u_minus, u_plus)
        u_star = sonic_point(model, c)
        plateau = model.f(u_minus) - c * u_minus
        return cls(model, u_minus, u_plus, c, u_star, plateau, epsilon)

    def with_epsilon(self, epsilon: float) -> "WaveProblem":
        return WaveProblem.build(self.model, self.u_minus, self.u_plus, epsilon)

    def f(self, u):
        return self.model.f(u)

    def df(self, u):
        return self.model.df(u)

    def f_c(self, u):
        return self.model.f(u) - self.c * u

    def df_c(self, u):
        return self.model.df(u) - self.c

    def g(self, u):
        return self.model.g(u)

    def dg(self, u):
        return self.model.dg(u)

    @property
    def v_floor(self) -> float:
        """Lower edge of the branch domain, f_c(u_star) - fc_plateau."""
        return self.f_c(self.u_star) - self.fc_plateau


@dataclass(frozen=True)
class LaxReport:
    lax_ok: bool
    laxbis_ok: bool


def check_lax(problem: WaveProblem) -> LaxReport:
    """Lax condition df(u_plus) < c < df(u_minus), and its shifted form.

    For a convex flux both are equivalent to u_plus < u_minus; the report
    states them separately because downstream admissibility messages cite
    the shifted version df_c(u_plus) < 0 < df_c(u_minus).
    """
    lax_ok = bool(problem.df(problem.u_plus) < problem.c < problem.df(problem.u_minus))
    laxbis_ok = bool(problem.df_c(problem.u_plus) < 0.0 < problem.df_c(problem.u_minus))
    return LaxReport(lax_ok=lax_ok, laxbis_ok=laxbis_ok)


def sonic_point(model: ModelSpec, c: float) -> float:
    """Unique u_star with df(u_star) = c; closed form for the quadratic flux."""
    return (c - model.flux.b) / model.flux.a


def branch_inverse(problem: WaveProblem, branch: Branch, v: float) -> float:
    """Invert f_c(h) - fc_plateau = v on one side of the sonic point.

    MINUS returns the root h > u_star, PLUS the root h < u_star.  Safeguarded
    Newton: iterates are kept inside a sign-changing bracket anchored at
    u_star, falling back to bisection whenever the Newton step leaves it.

    Raises OutOfDomain for v at or below the branch floor f_c(u_star) - fc_plateau.
    """
    floor = problem.v_floor
    tol = 1e-12 * max(1.0, abs(problem.fc_plateau))
    if v <= floor + tol:
        raise OutOfDomain(
            f"v = {v} not above the branch floor {floor} of branch {branch.value}"
        )

    span = abs(problem.u_minus - problem.u_plus) + 2.0
    u_star = problem.u_star
    if branch is Branch.MINUS:
        lo, hi = u_star, u_star + span
    else:
        lo, hi = u_star - span, u_star

    def resid(h: float) -> float:
        return problem.f_c(h) - problem.fc_plateau - v

    r_lo, r_hi = resid(lo), resid(hi)
    # Convexity puts the root between u_star (where resid < 0) and the far end;
    # widen once if the shock is unusually strong.
    while r_lo * r_hi > 0.0:
        span *= 2.0
        if span > 1e6:
            raise OutOfDomain(f"no bracket for branch inverse at v = {v}")
        if branch is Branch.MINUS:
            hi = u_star + span
            r_hi = resid(hi)
        else:
            lo = u_star - span
            r_lo = resid(lo)

    h = 0.5 * (lo + hi)
    for _ in range(100):
        r = resid(h)
        if abs(r) < 1e-12:
            return h
        if r * r_lo < 0.0:
            hi = h
        else:
            lo, r_lo = h, r
        d = problem.df_c(h)
        h_next = h - r / d if d != 0.0 else math.inf
        h = h_next if lo < h_next < hi else 0.5 * (lo + hi)
    raise OutOfDomain(f"branch inverse did not converge at v = {v}")


def subshock_expected(problem: WaveProblem) -> Subshock:
    """Tri-state sub-shock prediction.

    For the radiating-gas model (a = 1, linear coupling with slope 1) the
    known threshold applies: an interior sub-shock appears exactly when
    |u_plus - u_minus| > sqrt(2).  For any other model no threshold is
    claimed and the answer is UNKNOWN.
    """
    flux, coupling = problem.model.flux, problem.model.coupling
    hamer_like = (
        isinstance(coupling, LinearCoupling)
        and coupling.slope == 1.0
        and flux.a == 1.0
    )
    if not hamer_like:
        return Subshock.UNKNOWN
    return Subshock.YES if abs(problem.u_plus - problem.u_minus) > SQRT2 else Subshock.NO
