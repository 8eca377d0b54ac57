"""Inner layer of the sub-shock and its transversality data.

At the matching point the fast (layer) equation decouples to the scalar ODE

    du/dy = F(u) = f_c(u) - fc_plateau - v_star,

whose roots are exactly u_left and u_right with F < 0 in between, so the
layer profile u0 is the decreasing connection between them.  For the
radiating-gas model this is -u_left tanh(u_left y / 2).

Transversality of the singular orbit reduces to a 2x2 determinant built from
the slow components (G, H) = (w - g(u), v) at the two corner points, because
the only bounded solution of the adjoint layer equation psi' = -df_c(u0) psi
is trivial: psi grows exponentially in both directions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from scipy.integrate import solve_ivp

from ._ivp import refine_times
from .errors import BoundedAdjoint, DegenerateTransversality, WrongSignStructure
from .model import WaveProblem
from .slowdyn import MatchingData

ENDPOINT_TOL = 1e-8
DET_TOL = 1e-10


@dataclass(frozen=True)
class LayerSolution:
    """Layer profile samples plus its measured width.

    samples has columns (y, u) in increasing y on [-Y, Y]; u is strictly
    decreasing from near u_left to near u_right.  width_80 is the y-interval
    over which u crosses the middle 80 percent of its range.
    """

    u_left: float
    u_right: float
    v_star: float
    truncation: float
    samples: np.ndarray
    width_80: float
    endpoint_residuals: Tuple[float, float]
    _interp_minus: object = field(repr=False, compare=False, default=None)
    _interp_plus: object = field(repr=False, compare=False, default=None)

    def u_at(self, y):
        """Profile value(s) through the high-order dense interpolants."""
        arr = np.atleast_1d(np.asarray(y, dtype=float))
        out = np.empty_like(arr)
        neg = arr < 0.0
        if np.any(neg):
            out[neg] = self._interp_minus(-arr[neg])[0]
        if np.any(~neg):
            out[~neg] = self._interp_plus(arr[~neg])[0]
        return float(out[0]) if np.isscalar(y) or np.ndim(y) == 0 else out


def default_truncation(problem: WaveProblem, matching: MatchingData) -> float:
    """Y = 25 / min(|df_c(u_left)|, |df_c(u_right)|), the 1e-8 decay budget."""
    r = min(abs(problem.df_c(matching.u_left)), abs(problem.df_c(matching.u_right)))
    return 25.0 / r


def solve_layer(
    problem: WaveProblem,
    matching: MatchingData,
    truncation: Optional[float] = None,
    rtol: float = 1e-12,
    atol: float = 1e-14,
) -> LayerSolution:
    """Integrate the layer ODE from the mid-value phase point.

    The phase convention u(0) = (u_left + u_right) / 2 fixes translation; the
    two half-profiles are integrated outward to +-Y.  The sign structure of F
    (negative strictly between its roots) is checked first.
    """
    ul, ur, vs = matching.u_left, matching.u_right, matching.v_star

    def F(u):
        return problem.f_c(u) - problem.fc_plateau - vs

    interior = np.linspace(ur, ul, 513)[1:-1]
    if not np.all(F(interior) < 0.0):
        raise WrongSignStructure("layer field F is not negative between its roots")
    if abs(F(ul)) > 1e-9 or abs(F(ur)) > 1e-9:
        raise WrongSignStructure(
            f"layer field does not vanish at the corner states: F(ul)={F(ul):.2e}, F(ur)={F(ur):.2e}"
        )

    Y = float(truncation) if truncation is not None else default_truncation(problem, matching)
    mid = 0.5 * (ul + ur)

    def rhs_plus(y, u):
        return [F(u[0])]

    def rhs_minus(s, u):  # s = -y
        return [-F(u[0])]

    sol_p = solve_ivp(
        rhs_plus, (0.0, Y), [mid], method="DOP853", rtol=rtol, atol=atol, dense_output=True
    )
    sol_m = solve_ivp(
        rhs_minus, (0.0, Y), [mid], method="DOP853", rtol=rtol, atol=atol, dense_output=True
    )
    if not (sol_p.success and sol_m.success):
        raise WrongSignStructure("layer integration failed")

    ts_p = refine_times(sol_p, ENDPOINT_TOL * 1e-1)
    ts_m = refine_times(sol_m, ENDPOINT_TOL * 1e-1)
    y = np.concatenate([-ts_m[::-1], ts_p[1:]])
    u = np.concatenate([sol_m.sol(ts_m)[0][::-1], sol_p.sol(ts_p)[0][1:]])
    res_left = abs(u[0] - ul)
    res_right = abs(u[-1] - ur)
    if res_left > ENDPOINT_TOL or res_right > ENDPOINT_TOL:
        raise WrongSignStructure(
            f"layer endpoints off the corner states: {res_left:.2e}, {res_right:.2e}"
        )

    return LayerSolution(
        u_left=ul,
        u_right=ur,
        v_star=vs,
        truncation=Y,
        samples=np.column_stack([y, u]),
        width_80=_width_80(y, u, ul, ur),
        endpoint_residuals=(float(res_left), float(res_right)),
        _interp_minus=sol_m.sol,
        _interp_plus=sol_p.sol,
    )


def _width_80(y: np.ndarray, u: np.ndarray, ul: float, ur: float) -> float:
    delta = ul - ur
    hi = ur + 0.9 * delta
    lo = ur + 0.1 * delta
    # u decreases with y; np.interp wants increasing sample abscissae
    y_hi = float(np.interp(hi, u[::-1], y[::-1]))
    y_lo = float(np.interp(lo, u[::-1], y[::-1]))
    return y_lo - y_hi


def transversality_determinant(problem: WaveProblem, matching: MatchingData) -> float:
    """det of the slow-component rows (G, H) at the two corner points.

    Rows are (w_star - g(u), v_star) for u = u_left and u = u_right; the
    determinant collapses to v_star (g(u_right) - g(u_left)), positive for an
    admissible sub-shock.  A value below DET_TOL in magnitude raises
    DegenerateTransversality.
    """
    ul, ur = matching.u_left, matching.u_right
    rows = np.array(
        [
            [matching.w_star - float(problem.g(ul)), matching.v_star],
            [matching.w_star - float(problem.g(ur)), matching.v_star],
        ]
    )
    det = float(np.linalg.det(rows))
    if abs(det) < DET_TOL:
        raise DegenerateTransversality(f"transversality determinant {det:.3e} below tolerance")
    return det


@dataclass(frozen=True)
class AdjointReport:
    """Growth of the adjoint layer solution in both directions.

    rate_minus and rate_plus are the fitted slopes of log psi with respect to
    distance from y = 0 (positive = growth), to be compared against
    df_c(u_left) and -df_c(u_right).
    """

    grows_minus: bool
    grows_plus: bool
    rate_minus: float
    rate_plus: float


def adjoint_growth_check(problem: WaveProblem, layer: LayerSolution) -> AdjointReport:
    """Confirm psi' = -df_c(u0) psi grows both ways, and measure the rates.

    log psi is accumulated by trapezoidal quadrature of -df_c(u0) over the
    layer samples (the ODE is linear, so this is its exact solution up to
    quadrature error); the rates come from a least-squares line through the
    outer 20 percent of each tail.  Absence of growth on either side raises
    BoundedAdjoint: a bounded adjoint solution would break transversality.
    """
    y = layer.samples[:, 0]
    integrand = -problem.df_c(layer.samples[:, 1])
    log_psi = np.concatenate([[0.0], np.cumsum(0.5 * (integrand[1:] + integrand[:-1]) * np.diff(y))])
    log_psi = log_psi - np.interp(0.0, y, log_psi)

    Y = layer.truncation
    right = y >= 0.8 * Y
    left = y <= -0.8 * Y
    rate_plus = float(np.polyfit(y[right], log_psi[right], 1)[0])
    rate_minus = float(np.polyfit(-y[left], log_psi[left], 1)[0])
    grows_plus = rate_plus > 0.0
    grows_minus = rate_minus > 0.0
    if not (grows_plus and grows_minus):
        raise BoundedAdjoint(
            f"adjoint solution fails to grow both ways: rates ({rate_minus:.3e}, {rate_plus:.3e})"
        )
    return AdjointReport(
        grows_minus=grows_minus,
        grows_plus=grows_plus,
        rate_minus=rate_minus,
        rate_plus=rate_plus,
    )
