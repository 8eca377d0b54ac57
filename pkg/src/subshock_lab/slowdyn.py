"""Reduced slow dynamics on the branches and the sub-shock matching point.

On a branch u = h(v) of the slow manifold the traveling-wave system reduces to
a planar flow in (v, w):

    v' = w - g(h(v)),      w' = v.

Both rest states (0, g(u_minus)) and (0, g(u_plus)) are saddles of this flow.
The maximal solution leaving the MINUS saddle (forward) and the one entering
the PLUS saddle (captured backward) are the two curves whose crossing, if any,
defines the sub-shock data (v_star, w_star, u_left, u_right).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.integrate import solve_ivp

from ._ivp import refine_times
from .errors import (
    LeftDomain,
    MultipleIntersections,
    NoIntersection,
    NotASaddle,
    StepCapExceeded,
)
from .model import Branch, WaveProblem, branch_inverse
from .spectral import reduced_slow_eigenvalues

SEED_OFFSET = 1e-6
FLOOR_MARGIN = 1e-10
INTERP_TOL = 1e-8


@dataclass(frozen=True)
class PhaseCurve:
    """One saddle curve, sampled densely.

    samples has columns (x, v, w, u) in increasing x; spacing is chosen so
    linear interpolation in (v, w) is accurate to 1e-8.  orientation records
    the integration direction: "forward" from the MINUS saddle, "backward"
    into the PLUS saddle (samples are stored in forward order either way).
    """

    branch: Branch
    samples: np.ndarray
    orientation: str

    @property
    def x(self) -> np.ndarray:
        return self.samples[:, 0]

    @property
    def v(self) -> np.ndarray:
        return self.samples[:, 1]

    @property
    def w(self) -> np.ndarray:
        return self.samples[:, 2]

    @property
    def u(self) -> np.ndarray:
        return self.samples[:, 3]


@dataclass(frozen=True)
class MatchingData:
    v_star: float
    w_star: float
    u_left: float
    u_right: float


@dataclass(frozen=True)
class FoldPoint:
    """Type of the folded singularity of the reduced flow at the sonic point.

    Rescaling time by df_c desingularizes the fold: (u_star, g(u_star))
    becomes an equilibrium with Jacobian [[-dg(u_star), 1],
    [d2f(u_star) * v_floor, 0]].  Real eigenvalues (folded node) let the slow
    flow carry u continuously through the sonic point; complex ones (folded
    focus) make every passage spiral, so the profile must jump there.
    """

    discriminant: float
    eigenvalues: Tuple[complex, complex]

    @property
    def kind(self) -> str:
        return "focus" if self.discriminant < 0.0 else "node"


def classify_fold(problem: WaveProblem) -> FoldPoint:
    """Classify the folded singularity at (u_star, g(u_star))."""
    u_star = problem.u_star
    tr = -float(problem.dg(u_star))
    det = -float(problem.model.d2f(u_star)) * problem.v_floor
    disc = tr * tr - 4.0 * det
    root = math.sqrt(abs(disc))
    if disc >= 0.0:
        pair = (complex(0.5 * (tr - root)), complex(0.5 * (tr + root)))
    else:
        pair = (complex(0.5 * tr, -0.5 * root), complex(0.5 * tr, 0.5 * root))
    return FoldPoint(discriminant=disc, eigenvalues=pair)


def _planar_eigen(problem: WaveProblem, branch: Branch) -> Tuple[float, np.ndarray]:
    """Relevant planar eigenvalue and eigenvector at the branch rest state.

    The planar linearization is [[-dg/df_c, 1], [1, 0]]; its eigenvalues are
    the nonzero reduced ones.  MINUS takes the unstable root, PLUS the stable
    root, and the eigenvector for root l is (1, l + dg/df_c).
    """
    l1, l2 = reduced_slow_eigenvalues(problem, branch)
    u0 = problem.u_minus if branch is Branch.MINUS else problem.u_plus
    ratio = float(problem.dg(u0)) / problem.df_c(u0)
    lam = l2 if branch is Branch.MINUS else l1
    if lam == 0.0:
        raise NotASaddle(f"vanishing planar eigenvalue at {branch.value} rest state")
    vec = np.array([1.0, lam + ratio])
    return lam, vec / np.linalg.norm(vec)


def seed_saddle_manifold(problem: WaveProblem, branch: Branch) -> np.ndarray:
    """Starting point just off the rest state along the saddle eigenvector.

    The offset is SEED_OFFSET times the (v, w) scale, signed so the curve
    heads toward the matching region (w below g(u_minus) on MINUS, above
    g(u_plus) on PLUS, v < 0 on both).
    """
    u0 = problem.u_minus if branch is Branch.MINUS else problem.u_plus
    rest = np.array([0.0, float(problem.g(u0))])
    _, vec = _planar_eigen(problem, branch)
    scale = max(1.0, float(np.abs(rest).max()))
    offset = SEED_OFFSET * scale * vec
    # vec has positive v-component by construction; the curve needs v < 0.
    return rest - offset


def integrate_phase_curve(
    problem: WaveProblem,
    branch: Branch,
    seed: Optional[np.ndarray] = None,
    rtol: float = 1e-10,
    atol: float = 1e-12,
) -> PhaseCurve:
    """Maximal saddle curve, integrated until v nears the branch floor.

    Integration runs forward on MINUS and backward on PLUS, terminating when
    v reaches the branch-domain floor plus FLOOR_MARGIN.  A step budget on
    the x-span guards against drift (StepCapExceeded); a trajectory that
    exits through any other side of the domain raises LeftDomain.
    """
    if seed is None:
        seed = seed_saddle_manifold(problem, branch)
    floor = problem.v_floor
    lam, _ = _planar_eigen(problem, branch)
    sign = 1.0 if branch is Branch.MINUS else -1.0
    # near-threshold crossings sit only (u_left^2)/2 above the floor, so the
    # stop margin must stay tiny; the clamp keeps branch_inverse in-domain
    margin = FLOOR_MARGIN * max(1.0, abs(problem.fc_plateau))
    clamp = floor + 0.5 * margin

    def rhs(t, y):
        v, w = y
        u = branch_inverse(problem, branch, max(v, clamp))
        return [sign * (w - float(problem.g(u))), sign * v]

    def hit_floor(t, y):
        return y[0] - (floor + margin)

    hit_floor.terminal = True

    # time for the seed offset to grow to O(1) plus a generous traverse allowance
    span = math.log(1.0 / SEED_OFFSET) / abs(lam) + 200.0 / min(1.0, abs(lam))
    sol = solve_ivp(
        rhs,
        (0.0, span),
        np.asarray(seed, dtype=float),
        method="DOP853",
        rtol=rtol,
        atol=atol,
        events=hit_floor,
        dense_output=True,
    )
    if not sol.success:
        raise LeftDomain(f"phase-curve integration failed: {sol.message}")
    if sol.status != 1:
        raise StepCapExceeded(
            f"phase curve did not reach the branch floor within x-span {span:.1f}"
        )

    ts = refine_times(sol, INTERP_TOL)
    vw = sol.sol(ts).T
    xs = sign * ts
    us = np.array([branch_inverse(problem, branch, max(v, clamp)) for v in vw[:, 0]])
    samples = np.column_stack([xs, vw, us])
    if sign < 0:
        samples = samples[::-1]
    orientation = "forward" if branch is Branch.MINUS else "backward"
    return PhaseCurve(branch=branch, samples=np.ascontiguousarray(samples), orientation=orientation)


def find_matching_point(
    problem: WaveProblem,
    curve_minus: PhaseCurve,
    curve_plus: PhaseCurve,
) -> MatchingData:
    """Crossing of the two saddle curves in the (v, w) plane.

    Both curves are reparametrized by their strictly decreasing w and the
    difference v_minus(w) - v_plus(w) is bisected on the overlap window.  No
    sign change raises NoIntersection (the no-sub-shock outcome); more than
    one raises MultipleIntersections.

    When no crossing is resolved but both curves pinch at the fold corner
    (v_floor, g(u_star)), the folded singularity decides: a folded node means
    the profile passes the sonic point smoothly (NoIntersection), a folded
    focus forces a sub-shock whose clearance above the floor is beyond all
    orders small in the jump excess, so the matching point rounds to the
    corner itself.

    A resolved crossing satisfies v_star < 0, u_right < u_star < u_left, and
    the slope sandwich g(u_right) <= w_star <= g(u_left).
    """
    vm, wm = _by_decreasing_w(curve_minus)
    vp, wp = _by_decreasing_w(curve_plus)
    w_lo = max(wm[0], wp[0])
    w_hi = min(wm[-1], wp[-1])
    if not w_lo < w_hi:
        return _corner_matching(problem, curve_minus, curve_plus)

    def gap(w: float) -> float:
        return float(np.interp(w, wm, vm) - np.interp(w, wp, vp))

    grid = np.linspace(w_lo, w_hi, 4001)
    gaps = np.interp(grid, wm, vm) - np.interp(grid, wp, vp)
    signs = np.sign(gaps)
    nonzero = signs != 0
    flips = np.flatnonzero(np.diff(signs[nonzero]) != 0)
    if flips.size == 0:
        return _corner_matching(problem, curve_minus, curve_plus)
    if flips.size > 1:
        raise MultipleIntersections(f"{flips.size} crossings of the saddle curves")

    idx = np.flatnonzero(nonzero)
    a, b = grid[idx[flips[0]]], grid[idx[flips[0] + 1]]
    ga = gap(a)
    for _ in range(200):
        mid = 0.5 * (a + b)
        gm = gap(mid)
        if gm == 0.0 or (b - a) < 1e-13 * max(1.0, abs(mid)):
            a = b = mid
            break
        if ga * gm < 0.0:
            b = mid
        else:
            a, ga = mid, gm
    w_star = 0.5 * (a + b)
    v_star = float(0.5 * (np.interp(w_star, wm, vm) + np.interp(w_star, wp, vp)))
    if abs(gap(w_star)) > 1e-8:
        raise MultipleIntersections(
            f"matching residual {abs(gap(w_star)):.3e} exceeds 1e-8"
        )

    u_left = branch_inverse(problem, Branch.MINUS, v_star)
    u_right = branch_inverse(problem, Branch.PLUS, v_star)
    if not v_star < 0.0:
        raise LeftDomain(f"matching value v_star = {v_star} is not negative")
    if not u_right < problem.u_star < u_left:
        raise LeftDomain(
            f"sub-shock states u_right = {u_right}, u_left = {u_left} do not straddle u_star"
        )
    g_r, g_l = float(problem.g(u_right)), float(problem.g(u_left))
    if not (g_r - 1e-8 <= w_star <= g_l + 1e-8):
        raise LeftDomain(
            f"w_star = {w_star} violates the slope sandwich [{g_r}, {g_l}]"
        )
    return MatchingData(v_star=v_star, w_star=w_star, u_left=u_left, u_right=u_right)


def _corner_matching(
    problem: WaveProblem,
    curve_minus: PhaseCurve,
    curve_plus: PhaseCurve,
) -> MatchingData:
    """No-crossing verdict for curves that pinch at the fold corner.

    Near the sub-shock threshold both saddle curves funnel into the corner
    (v_floor, g(u_star)) and their separation collapses faster than any power
    of the jump excess, below what the phase-plane intersection can resolve.
    The folded-singularity type carries the verdict instead; for a folded
    focus the true matching point differs from the corner by less than one
    ulp, so the corner is the correctly rounded MatchingData.
    """
    w_star = float(problem.g(problem.u_star))
    pinch = 0.05 * (float(problem.g(problem.u_minus)) - float(problem.g(problem.u_plus)))
    at_corner = (
        abs(curve_minus.w[-1] - w_star) < pinch
        and abs(curve_plus.w[0] - w_star) < pinch
    )
    if not at_corner:
        raise NoIntersection("saddle curves do not cross: no sub-shock at these states")
    if classify_fold(problem).kind == "node":
        raise NoIntersection(
            "saddle curves pinch at a folded node: the profile passes the "
            "sonic point without a sub-shock"
        )
    return MatchingData(
        v_star=problem.v_floor,
        w_star=w_star,
        u_left=problem.u_star,
        u_right=problem.u_star,
    )


def _by_decreasing_w(curve: PhaseCurve) -> Tuple[np.ndarray, np.ndarray]:
    """Return (v, w) with w strictly increasing, for np.interp."""
    w = curve.w
    v = curve.v
    dw = np.diff(w)
    if not (np.all(dw < 0.0) or np.all(dw > 0.0)):
        keep = np.concatenate([[True], np.abs(dw) > 0.0])
        w, v = w[keep], v[keep]
        dw = np.diff(w)
        if not (np.all(dw < 0.0) or np.all(dw > 0.0)):
            raise MultipleIntersections("saddle curve is not monotone in w")
    if dw[0] < 0.0:
        return v[::-1].copy(), w[::-1].copy()
    return v.copy(), w.copy()


