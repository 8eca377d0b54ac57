"""Small-shock analysis of the unit-viscosity profile equations.

For the radiating-gas model (f(u) = u^2/2, g(u) = u) at eps = 1 the
integrated profile equations close as a three-dimensional system in
X = (z, v, u~), with u~ = u - u_plus and z = u~ + v':

    X' = F(X; delta),    F = (v, z - u~, u~^2/2 + delta u~/2 - v),

where delta = u_plus - u_minus < 0 is the signed shock amplitude.  The
origin p1 (the right state) is an equilibrium for every delta, and a second
equilibrium p2 = (-delta, 0, -delta) (the left state) collides with it as
delta -> 0, where the linearization acquires the spectrum {0, sqrt2, -sqrt2}.
In the eigenbasis C of that degenerate linearization the flow splits into a
diagonal linear part plus a quadratic perturbation whose center-manifold
reduction is the transcritical normal form

    w1' = (delta/4) w1 + (1/4) w1^2.

This module verifies the transcriticality conditions by finite differences,
fits the normal-form coefficients, and computes the connecting profile
between the two equilibria, returned in the original (u, v, w) variables so
it is interchangeable with the finite-viscosity profiles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from . import colloc
from .errors import (
    ConditionFailed,
    FitResidualTooLarge,
    SolverError,
    ValidationError,
)
from .hetero import HeteroclinicSolution, _profile_rhs, _rest_point, _width_80_profile
from .model import LinearCoupling, ModelSpec, WaveProblem
from .spectral import SpectralReport, cubic_roots

SQRT2 = math.sqrt(2.0)
DELTA_CAP = 0.3

# columns are the delta = 0 eigenvectors for the eigenvalues (0, -sqrt2, sqrt2)
EIGENBASIS = np.array(
    [
        [1.0, -1.0, 1.0],
        [0.0, SQRT2, SQRT2],
        [1.0, 1.0, -1.0],
    ]
)


def _field(X, delta: float):
    """Vector field F(X; delta) for X = (z, v, u~); vectorized over rows."""
    X = np.asarray(X, dtype=float)
    single = X.ndim == 1
    Xm = np.atleast_2d(X)
    z, v, ut = Xm[:, 0], Xm[:, 1], Xm[:, 2]
    out = np.column_stack([v, z - ut, 0.5 * ut * ut + 0.5 * delta * ut - v])
    return out[0] if single else out


def _field_jacobian(X, delta: float):
    """dF/dX; only the (3,3) corner depends on the point."""
    X = np.asarray(X, dtype=float)
    single = X.ndim == 1
    Xm = np.atleast_2d(X)
    A = np.zeros((Xm.shape[0], 3, 3))
    A[:, 0, 1] = 1.0
    A[:, 1, 0] = 1.0
    A[:, 1, 2] = -1.0
    A[:, 2, 1] = -1.0
    A[:, 2, 2] = Xm[:, 2] + 0.5 * delta
    return A[0] if single else A


@dataclass(frozen=True)
class SmallShockSystem:
    """Shifted profile equations at unit viscosity near a weak shock.

    delta = u_plus - u_minus is the bifurcation parameter; the admissible
    range is [-0.3, 0], far below the sub-shock threshold sqrt(2).  u_plus
    fixes the translation back to the physical u variable and drops out of
    the field itself.
    """

    delta: float
    u_plus: float = 0.0

    def __post_init__(self) -> None:
        if not -DELTA_CAP <= self.delta <= 0.0:
            raise ValidationError(
                f"delta must lie in [-{DELTA_CAP:g}, 0], got {self.delta}"
            )

    @classmethod
    def for_model(
        cls, model: ModelSpec, u_minus: float, u_plus: float
    ) -> "SmallShockSystem":
        """Build from end states; only the radiating-gas model is supported."""
        flux, coupling = model.flux, model.coupling
        hamer = (
            isinstance(coupling, LinearCoupling)
            and coupling.slope == 1.0
            and flux.a == 1.0
            and flux.b == 0.0
        )
        if not hamer:
            raise NotImplementedError(
                "small-shock analysis is implemented for the radiating-gas "
                "model only (f(u) = u^2/2, g(u) = u)"
            )
        return cls(delta=float(u_plus - u_minus), u_plus=float(u_plus))

    @property
    def u_minus(self) -> float:
        return self.u_plus - self.delta

    @property
    def speed(self) -> float:
        return self.u_plus - 0.5 * self.delta

    @property
    def p1(self) -> np.ndarray:
        return np.zeros(3)

    @property
    def p2(self) -> np.ndarray:
        return np.array([-self.delta, 0.0, -self.delta])

    def field(self, X) -> np.ndarray:
        return _field(X, self.delta)

    def jacobian(self, X) -> np.ndarray:
        return _field_jacobian(X, self.delta)


def _spectral_report(point: np.ndarray, eigenvalues, tol: float = 1e-10) -> SpectralReport:
    n_stable = sum(1 for l in eigenvalues if l.real < -tol)
    n_unstable = sum(1 for l in eigenvalues if l.real > tol)
    return SpectralReport(
        point=tuple(float(p) for p in point),
        epsilon=1.0,
        eigenvalues=tuple(complex(l) for l in eigenvalues),
        n_stable=n_stable,
        n_unstable=n_unstable,
        n_center=len(eigenvalues) - n_stable - n_unstable,
    )


def equilibria_and_spectra(
    sys: SmallShockSystem,
) -> Tuple[SpectralReport, SpectralReport]:
    """Closed-form spectra at the two equilibria for delta < 0.

    The characteristic polynomial at a point with third component u~ is
    l^3 - a l^2 - 2 l + a with a = u~ + delta/2, so trace = a and
    det = -a.  The counts must come out (2 stable, 1 unstable) at p1 and
    (1 stable, 2 unstable) at p2; both are re-verified here together with
    the trace/determinant identities.
    """
    if sys.delta >= 0.0:
        raise ValidationError(
            "both equilibria exist only for delta < 0; "
            f"got delta = {sys.delta}"
        )
    reports = []
    for point, counts in ((sys.p1, (2, 1)), (sys.p2, (1, 2))):
        a = float(point[2] + 0.5 * sys.delta)
        eigs = cubic_roots(-a, -2.0, a)
        tr = sum(l.real for l in eigs)
        det = np.prod(np.array(eigs))
        if abs(tr - a) > 1e-10 or abs(det + a) > 1e-10:
            raise SolverError(
                f"spectrum violates trace/det identities at {tuple(point)}"
            )
        report = _spectral_report(point, eigs)
        if (report.n_stable, report.n_unstable) != counts:
            raise SolverError(
                f"expected {counts[0]} stable / {counts[1]} unstable at "
                f"{tuple(point)}, got ({report.n_stable}, {report.n_unstable})"
            )
        reports.append(report)
    return reports[0], reports[1]


def to_eigenbasis(X) -> np.ndarray:
    """Coordinates Y = C^-1 X in the delta = 0 eigenbasis."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        return np.linalg.solve(EIGENBASIS, X)
    return np.linalg.solve(EIGENBASIS, X.T).T


def from_eigenbasis(Y) -> np.ndarray:
    Y = np.asarray(Y, dtype=float)
    if Y.ndim == 1:
        return EIGENBASIS @ Y
    return Y @ EIGENBASIS.T


def conjugated_linear_part() -> np.ndarray:
    """B = C^-1 A(0; 0) C; diagonal (0, -sqrt2, sqrt2) up to rounding."""
    A0 = _field_jacobian(np.zeros(3), 0.0)
    return np.linalg.solve(EIGENBASIS, A0 @ EIGENBASIS)


def _transformed_field(Y, delta: float):
    """The field in eigenbasis coordinates, F_hat(Y; delta) = C^-1 F(CY)."""
    return to_eigenbasis(_field(from_eigenbasis(Y), delta))


@dataclass(frozen=True)
class SotomayorReport:
    """Finite-difference transcriticality conditions at delta = 0.

    c1 = w.F_hat_delta(0;0), c2 = w.DF_hat_delta(0;0)v and
    c3 = w.D2F_hat(0;0)(v,v) with w = v = (1,0,0); the exact values are
    0, 1/4 and 1/2.
    """

    c1: float
    c2: float
    c3: float
    step: float


def sotomayor_check(
    sys: SmallShockSystem,
    step: float = 1e-5,
    tolerances: Tuple[float, float, float] = (1e-9, 1e-6, 1e-5),
) -> SotomayorReport:
    """Verify the three transcritical-bifurcation conditions numerically.

    Central differences with the given step in both the state and the
    parameter; the system must sit at the bifurcation value delta = 0.
    Raises ConditionFailed naming the violated condition.
    """
    if sys.delta != 0.0:
        raise ValidationError(
            f"transcriticality is checked at delta = 0, got {sys.delta}"
        )
    if step <= 0.0:
        raise ValidationError(f"finite-difference step must be positive, got {step}")
    h = float(step)
    v = np.array([1.0, 0.0, 0.0])
    zero = np.zeros(3)

    c1 = (_transformed_field(zero, h) - _transformed_field(zero, -h))[0] / (2.0 * h)
    c2 = (
        _transformed_field(h * v, h)
        - _transformed_field(h * v, -h)
        - _transformed_field(-h * v, h)
        + _transformed_field(-h * v, -h)
    )[0] / (4.0 * h * h)
    c3 = (
        _transformed_field(h * v, 0.0)
        - 2.0 * _transformed_field(zero, 0.0)
        + _transformed_field(-h * v, 0.0)
    )[0] / (h * h)

    checks = (
        ("(i) w.F_delta = 0", abs(c1), tolerances[0]),
        ("(ii) w.DF_delta v = 1/4", abs(c2 - 0.25), tolerances[1]),
        ("(iii) w.D2F(v,v) = 1/2", abs(c3 - 0.5), tolerances[2]),
    )
    for name, err, tol in checks:
        if err >= tol:
            raise ConditionFailed(
                f"condition {name} fails: deviation {err:.3e} >= {tol:g}"
            )
    return SotomayorReport(c1=float(c1), c2=float(c2), c3=float(c3), step=h)


@dataclass(frozen=True)
class NormalFormFit:
    """Least-squares fit of w1' = linear_term * w1 + p * w1^2.

    q = linear_term / delta is the reported parameter coefficient; it is set
    to zero at delta = 0, where the fitted field is purely quadratic.
    """

    p: float
    q: float
    linear_term: float
    residual: float
    delta: float

    def fitted_equilibria(self) -> Tuple[Tuple[float, bool], Tuple[float, bool]]:
        """Roots of the fitted 1-D field with their stability flags."""
        second = -self.linear_term / self.p
        # slopes are linear_term at 0 and -linear_term at the second root
        return ((0.0, self.linear_term < 0.0), (float(second), self.linear_term > 0.0))


def normal_form_coefficients(
    sys: SmallShockSystem, window: float = 0.05, rtol: float = 1e-8
) -> NormalFormFit:
    """Fit the transcritical normal form from the first eigenbasis component.

    Samples F_hat_1 along the center direction (w1, 0, 0); the tangency of
    the center manifold to that axis makes the neglected corrections enter
    only at higher order.  Raises FitResidualTooLarge when the quadratic
    model does not explain the samples to rtol (relative to their scale).
    """
    if not -0.2 <= sys.delta <= 0.0:
        raise ValidationError(
            f"normal-form fit window is delta in [-0.2, 0], got {sys.delta}"
        )
    if window <= 0.0:
        raise ValidationError(f"sampling window must be positive, got {window}")
    w1 = np.linspace(-window, window, 21)
    Y = np.zeros((w1.size, 3))
    Y[:, 0] = w1
    samples = np.array(
        [_transformed_field(y, sys.delta)[0] for y in Y]
    )
    design = np.column_stack([w1, w1 * w1])
    coef, *_ = np.linalg.lstsq(design, samples, rcond=None)
    linear_term, p = float(coef[0]), float(coef[1])
    residual = float(np.max(np.abs(design @ coef - samples)))
    scale = float(np.max(np.abs(samples)))
    if residual > rtol * scale:
        raise FitResidualTooLarge(
            f"normal-form fit residual {residual:.3e} exceeds "
            f"{rtol:g} * {scale:.3e}"
        )
    q = linear_term / sys.delta if sys.delta < 0.0 else 0.0
    return NormalFormFit(
        p=p, q=float(q), linear_term=linear_term, residual=residual, delta=sys.delta
    )


def _simple_left_eigvec(A: np.ndarray, unstable: bool) -> np.ndarray:
    # Unit left eigenvector of the unique eigenvalue on the requested side
    # of the imaginary axis; used to project out one endpoint mode.
    lams, W = np.linalg.eig(A.T)
    mask = lams.real > 0.0 if unstable else lams.real < 0.0
    idx = np.flatnonzero(mask)
    if idx.size != 1:
        side = "unstable" if unstable else "stable"
        raise SolverError(f"expected exactly one {side} eigenvalue, got {idx.size}")
    w = W[:, idx[0]]
    if np.max(np.abs(w.imag)) > 1e-10:
        raise SolverError("projection eigenvector is not real")
    w = np.real(w)
    return w / np.linalg.norm(w)


def small_shock_profile(
    sys: SmallShockSystem,
    L: Optional[float] = None,
    mesh_size: int = 4000,
) -> HeteroclinicSolution:
    """Connecting profile from p2 (at -infinity) to p1 (at +infinity).

    Collocation on a uniform mesh with projection conditions killing the
    single stable mode of p2 at the left end and the single unstable mode of
    p1 at the right end, plus the phase row u~(0) = -delta/2.  The slow tail
    rate is |delta|/4, so the default truncation L = 60/|delta| keeps the
    endpoint defect near 1e-7.  The initial iterate is the logistic orbit of
    the normal form lifted along the center direction.  The result is mapped
    back to (u, v, w) = (u~ + u_plus, v, z + u_plus).
    """
    delta = sys.delta
    if not -DELTA_CAP <= delta < 0.0:
        raise ValidationError(
            f"profile requires delta in [-{DELTA_CAP:g}, 0), got {delta}"
        )
    if L is None:
        L = 60.0 / abs(delta)
    n_cells = int(mesh_size)
    n_cells += n_cells % 2
    mesh = np.linspace(-L, L, n_cells + 1)
    mesh[n_cells // 2] = 0.0

    rate = 0.25 * abs(delta)
    w1 = -delta / (1.0 + np.exp(np.clip(rate * mesh, -700.0, 700.0)))
    Y0 = np.column_stack([w1, np.zeros_like(w1), w1])

    l_left = _simple_left_eigvec(_field_jacobian(sys.p2, delta), unstable=False)
    l_right = _simple_left_eigvec(_field_jacobian(sys.p1, delta), unstable=True)
    rows = [
        (0, l_left, float(l_left @ sys.p2)),
        (n_cells, l_right, 0.0),
        (n_cells // 2, np.array([0.0, 0.0, 1.0]), -0.5 * delta),
    ]

    res = colloc.solve_collocation(
        lambda x, Y: _field(Y, delta),
        lambda x, Y: _field_jacobian(Y, delta),
        mesh,
        Y0,
        rows,
        tol=1e-11,
    )

    z, v, ut = res.values[:, 0], res.values[:, 1], res.values[:, 2]
    vals = np.column_stack([ut + sys.u_plus, v, z + sys.u_plus])
    problem = WaveProblem.build(ModelSpec.hamer(), sys.u_minus, sys.u_plus, epsilon=1.0)
    residual = float(
        np.max(np.abs(colloc.collocation_residual(_profile_rhs(problem, 1.0), mesh, vals)))
    )
    defect = max(
        float(np.max(np.abs(vals[0] - _rest_point(problem, problem.u_minus)))),
        float(np.max(np.abs(vals[-1] - _rest_point(problem, problem.u_plus)))),
    )
    width = _width_80_profile(mesh, vals[:, 0], problem.u_minus, problem.u_plus)
    return HeteroclinicSolution(
        problem,
        1.0,
        mesh,
        vals,
        residual,
        defect,
        width,
        res.newton_iterations,
    )
