"""Connecting-orbit computation for the regularized traveling-wave system.

Builds the zero-viscosity singular orbit (slow arcs joined by an internal
fast layer), then solves the full profile equations at finite viscosity as a
first-order system in (u, v, w),

    eps u' = f_c(u) - f_c(plateau) - v,
    v' = w - g(u),
    w' = v,

with eigenprojection boundary conditions at the truncated endpoints and an
interior phase condition pinning u(0) to the layer midpoint.  An epsilon
sweep continues the profile toward the singular limit with warm starts, and
an independent bidirectional shooting solver provides a cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import solve_ivp
from scipy.spatial import cKDTree

from . import colloc
from .errors import (
    BoundaryDefectTooLarge,
    ContinuationStalled,
    DegenerateTransversality,
    LeftDomain,
    NewtonDiverged,
    ValidationError,
)
from .layer import LayerSolution, solve_layer
from .model import Branch, WaveProblem
from .slowdyn import (
    MatchingData,
    PhaseCurve,
    find_matching_point,
    integrate_phase_curve,
)
from .spectral import cubic_roots, reduced_slow_eigenvalues

DEFECT_TOL = 1e-6


@dataclass(frozen=True)
class SingularOrbit:
    """Zero-viscosity composite: slow arcs, fast layer, and matching data.

    The arcs are translated so the matching point sits at x = 0; x_left ends
    there and x_right starts there.  vals_* columns are (u, v, w).
    """

    problem: WaveProblem
    matching: MatchingData
    layer: LayerSolution
    x_left: np.ndarray
    vals_left: np.ndarray
    x_right: np.ndarray
    vals_right: np.ndarray

    @property
    def v_star(self) -> float:
        return self.matching.v_star

    @property
    def w_star(self) -> float:
        return self.matching.w_star

    def point_cloud(self) -> np.ndarray:
        """All (u, v, w) samples: both slow arcs plus the layer fiber."""
        fiber_u = self.layer.samples[:, 1]
        fiber = np.column_stack(
            [
                fiber_u,
                np.full_like(fiber_u, self.matching.v_star),
                np.full_like(fiber_u, self.matching.w_star),
            ]
        )
        return np.vstack([self.vals_left, fiber, self.vals_right])

    def guess(self, x: np.ndarray, epsilon: float) -> np.ndarray:
        """Mollified initial iterate for the viscous profile on nodes x."""
        x = np.asarray(x, dtype=float)
        u_l = self.matching.u_left
        u_r = self.matching.u_right
        neg = x <= 0.0
        u_outer = np.empty_like(x)
        u_outer[neg] = np.interp(x[neg], self.x_left, self.vals_left[:, 0])
        u_outer[~neg] = np.interp(x[~neg], self.x_right, self.vals_right[:, 0])
        # clamp to the layer's sampled range; beyond it the profile has
        # flattened to the corner states anyway
        y_arg = np.clip(
            x / max(epsilon, 1e-12),
            self.layer.samples[0, 0],
            self.layer.samples[-1, 0],
        )
        inner = self.layer.u_at(y_arg)
        u = u_outer + inner - np.where(neg, u_l, u_r)

        x_all = np.concatenate([self.x_left, self.x_right])
        v = np.interp(
            x, x_all, np.concatenate([self.vals_left[:, 1], self.vals_right[:, 1]])
        )
        w = np.interp(
            x, x_all, np.concatenate([self.vals_left[:, 2], self.vals_right[:, 2]])
        )
        return np.column_stack([u, v, w])


@dataclass(frozen=True)
class HeteroclinicSolution:
    problem: WaveProblem
    epsilon: float
    mesh: np.ndarray
    values: np.ndarray
    residual_norm: float
    boundary_defect: float
    layer_width_80: float
    newton_iterations: int

    def at(self, x) -> np.ndarray:
        """Evaluate the profile through the C^1 collocation interpolant."""
        return colloc.hermite_eval(
            _profile_rhs(self.problem, self.epsilon), self.mesh, self.values, x
        )


def _rest_point(problem: WaveProblem, u: float) -> np.ndarray:
    return np.array([u, 0.0, float(problem.g(u))])


def assemble_singular_orbit(
    problem: WaveProblem,
    curves: Optional[Tuple[PhaseCurve, PhaseCurve]] = None,
) -> SingularOrbit:
    """Compute and splice the two slow arcs and the connecting fast layer.

    The arcs are translated so the matching point sits at x = 0; continuity
    of (v, w) across the splice holds by construction and the u components
    land on the layer endpoints.
    """
    if curves is None:
        curve_m = integrate_phase_curve(problem, Branch.MINUS)
        curve_p = integrate_phase_curve(problem, Branch.PLUS)
    else:
        curve_m, curve_p = curves
    matching = find_matching_point(problem, curve_m, curve_p)
    if not matching.u_right < matching.u_left:
        raise DegenerateTransversality(
            "matching point rounds to the sonic corner: the sub-shock is below "
            "float resolution this close to the threshold, so the layer and "
            "splice degenerate"
        )
    layer = solve_layer(problem, matching)

    def trim(curve: PhaseCurve, side: str):
        x, v, w, u = curve.x, curve.v, curve.w, curve.u
        # w is strictly monotone along each arc, so invert it to locate x*.
        order = np.argsort(w)
        x_star = float(np.interp(matching.w_star, w[order], x[order]))
        xs = x - x_star
        vals = np.column_stack([u, v, w])
        if side == "left":
            keep = xs < 0.0
            end = np.array([matching.u_left, matching.v_star, matching.w_star])
            return np.append(xs[keep], 0.0), np.vstack([vals[keep], end])
        keep = xs > 0.0
        start = np.array([matching.u_right, matching.v_star, matching.w_star])
        return np.append(0.0, xs[keep]), np.vstack([start, vals[keep]])

    x_left, vals_left = trim(curve_m, "left")
    x_right, vals_right = trim(curve_p, "right")

    checks = (
        (vals_left[-1], vals_left[0], problem.u_minus),
        (vals_right[0], vals_right[-1], problem.u_plus),
    )
    for splice, far, rest in checks:
        if (
            abs(splice[1] - matching.v_star) > 1e-9
            or abs(splice[2] - matching.w_star) > 1e-9
        ):
            raise LeftDomain("slow arc does not reach the matching point")
        if np.max(np.abs(far - _rest_point(problem, rest))) > 1e-4:
            raise LeftDomain("slow arc does not originate at its rest state")

    return SingularOrbit(
        problem, matching, layer, x_left, vals_left, x_right, vals_right
    )


def _profile_rhs(problem: WaveProblem, eps: float) -> Callable:
    plateau = problem.fc_plateau

    def rhs(x, Y):
        Y = np.atleast_2d(Y)
        u, v, w = Y[:, 0], Y[:, 1], Y[:, 2]
        return np.column_stack(
            [(problem.f_c(u) - plateau - v) / eps, w - problem.g(u), v]
        )

    return rhs


def _profile_jac(problem: WaveProblem, eps: float) -> Callable:
    def jac(x, Y):
        Y = np.atleast_2d(Y)
        u = Y[:, 0]
        A = np.zeros((Y.shape[0], 3, 3))
        A[:, 0, 0] = problem.df_c(u) / eps
        A[:, 0, 1] = -1.0 / eps
        A[:, 1, 0] = -problem.dg(u)
        A[:, 1, 2] = 1.0
        A[:, 2, 1] = 1.0
        return A

    return jac


def _left_eigvec(problem: WaveProblem, u: float, eps: float, lam: float) -> np.ndarray:
    # Null vector of (J^T - lam I) for the fast-scale Jacobian; valid for the
    # nonzero simple eigenvalues used in the projection conditions.
    dfc = problem.df_c(u)
    dg = float(problem.dg(u))
    l = np.array([eps * dg / (dfc - lam), 1.0, eps / lam])
    return l / np.linalg.norm(l)


def projection_rows(
    problem: WaveProblem, eps: float, n_nodes: int, phase_target: float
) -> list:
    """The three linear boundary rows closing the collocation system.

    The left rest state is a saddle with one stable direction, the right one
    with one unstable direction.  Killing the single decaying mode at the
    left end and the single escaping mode at the right end leaves the orbit
    in the correct invariant manifolds, and the interior phase row
    u(0) = phase_target removes the translation freedom: 1 + 1 + 1 rows for
    the three-dimensional system.  Each projection row pairs the left
    eigenvector of the offending eigenvalue with the endpoint deviation.
    """
    rows = []
    for u0, pick, node in (
        (problem.u_minus, "stable", 0),
        (problem.u_plus, "unstable", n_nodes - 1),
    ):
        dfc = problem.df_c(u0)
        dg = float(problem.dg(u0))
        lam = np.array(cubic_roots(-dfc, -eps * (dg + eps), eps * eps * dfc))
        lam = np.real(lam[np.abs(np.imag(lam)) < 1e-9 * max(1.0, np.max(np.abs(lam)))])
        side = lam[lam < 0.0] if pick == "stable" else lam[lam > 0.0]
        if len(side) != 1:
            raise ValidationError(
                f"expected exactly one {pick} eigenvalue at u = {u0}, got {len(side)}"
            )
        l_vec = _left_eigvec(problem, u0, eps, float(side[0]))
        rows.append((node, l_vec, float(l_vec @ _rest_point(problem, u0))))
    rows.append(((n_nodes - 1) // 2, np.array([1.0, 0.0, 0.0]), phase_target))
    return rows


def graded_mesh(L: float, n_cells: int, epsilon: float) -> np.ndarray:
    """Symmetric sinh-graded mesh on [-L, L] with a node at the origin.

    The grading parameter solves sinh(s) = 12 L s / (n eps) so the central
    spacing tracks eps while edge cells stay coarse; small ratios collapse
    toward a uniform mesh.
    """
    if n_cells % 2:
        n_cells += 1
    s = 1.0
    for _ in range(80):
        s_new = math.asinh(12.0 * L * max(s, 1e-3) / (n_cells * epsilon))
        if abs(s_new - s) < 1e-12:
            break
        s = s_new
    t = np.linspace(-1.0, 1.0, n_cells + 1)
    x = L * np.sinh(s * t) / math.sinh(s)
    x[n_cells // 2] = 0.0
    return x


def _phase_target(matching: MatchingData) -> float:
    return 0.5 * (matching.u_left + matching.u_right)


def solve_heteroclinic(
    problem: WaveProblem,
    epsilon: float,
    L: Optional[float] = None,
    mesh_size: int = 2000,
    singular: Optional[SingularOrbit] = None,
    initial: Optional[HeteroclinicSolution] = None,
    newton_tol: float = 1e-11,
) -> HeteroclinicSolution:
    """Solve the viscous profile boundary value problem at one epsilon.

    The initial iterate is the previous solution when given (warm start),
    otherwise the mollified singular orbit.  Raises BoundaryDefectTooLarge
    when the truncation interval is too short for the requested accuracy.
    """
    if epsilon <= 0.0:
        raise ValidationError("epsilon must be positive for the viscous profile")
    if L is None:
        L = max(40.0, 60.0 * epsilon)
    if singular is None:
        singular = assemble_singular_orbit(problem)
    mesh = graded_mesh(L, mesh_size, epsilon)

    if initial is not None:
        Y0 = initial.at(np.clip(mesh, initial.mesh[0], initial.mesh[-1]))
    else:
        Y0 = singular.guess(mesh, epsilon)
    rows = projection_rows(problem, epsilon, len(mesh), _phase_target(singular.matching))

    res = colloc.solve_collocation(
        _profile_rhs(problem, epsilon),
        _profile_jac(problem, epsilon),
        mesh,
        Y0,
        rows,
        tol=newton_tol,
    )

    defect = max(
        float(np.max(np.abs(res.values[0] - _rest_point(problem, problem.u_minus)))),
        float(np.max(np.abs(res.values[-1] - _rest_point(problem, problem.u_plus)))),
    )
    if defect > DEFECT_TOL:
        raise BoundaryDefectTooLarge(
            f"endpoint defect {defect:.3e} exceeds {DEFECT_TOL:.1e}; "
            f"increase the truncation length L={L:g}"
        )
    width = _width_80_profile(
        res.mesh, res.values[:, 0], singular.matching.u_left, singular.matching.u_right
    )
    return HeteroclinicSolution(
        problem,
        epsilon,
        res.mesh,
        res.values,
        res.residual_norm,
        defect,
        width,
        res.newton_iterations,
    )


def _width_80_profile(x: np.ndarray, u: np.ndarray, u_l: float, u_r: float) -> float:
    """Width of the central transition between the 10/90 levels of the jump."""
    hi = u_r + 0.9 * (u_l - u_r)
    lo = u_r + 0.1 * (u_l - u_r)
    # restrict to the central window so the slow tails stay out of the fit
    core = np.abs(x) <= 0.25 * (x[-1] - x[0])
    xs, us = x[core], u[core]
    order = np.argsort(us)
    x_hi = float(np.interp(hi, us[order], xs[order]))
    x_lo = float(np.interp(lo, us[order], xs[order]))
    return abs(x_lo - x_hi)


def hausdorff_to_singular(
    solution: HeteroclinicSolution, singular: SingularOrbit
) -> float:
    """Symmetric Hausdorff distance between the viscous profile and the
    singular orbit, both viewed as point sets in (u, v, w) space."""
    prof = solution.values
    sing = singular.point_cloud()
    d_ps = cKDTree(sing).query(prof)[0]
    d_sp = cKDTree(prof).query(sing)[0]
    return float(max(d_ps.max(), d_sp.max()))


def sweep_epsilon(
    problem: WaveProblem,
    eps_list: Sequence[float],
    L: Optional[float] = None,
    mesh_size: int = 2000,
    max_bisections: int = 6,
) -> list:
    """Continue the profile across a decreasing viscosity schedule.

    Each requested epsilon warm-starts from the previously solved profile;
    the first solve starts from the mollified singular orbit.  If Newton
    fails on a step the gap is bisected, up to max_bisections inserted
    values, before giving up with ContinuationStalled.  Only the requested
    epsilons are returned.
    """
    eps_list = list(eps_list)
    if any(e <= 0.0 for e in eps_list):
        raise ValidationError("epsilon schedule must be positive")
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ValidationError("epsilon schedule must be strictly decreasing")
    singular = assemble_singular_orbit(problem)
    out = []
    prev: Optional[HeteroclinicSolution] = None
    for eps in eps_list:
        pending = [eps]
        bisections = 0
        while pending:
            eps_try = pending[-1]
            try:
                sol = solve_heteroclinic(
                    problem,
                    eps_try,
                    L=L,
                    mesh_size=mesh_size,
                    singular=singular,
                    initial=prev,
                )
            except NewtonDiverged:
                if prev is None:
                    raise
                if bisections >= max_bisections:
                    raise ContinuationStalled(
                        f"continuation stalled between eps={prev.epsilon:g} "
                        f"and eps={eps_try:g}"
                    )
                bisections += 1
                pending.append(0.5 * (prev.epsilon + eps_try))
                continue
            pending.pop()
            prev = sol
        out.append(prev)
    return out


def _slow_rates(problem: WaveProblem) -> Tuple[float, float]:
    """Per-end slow decay rates of the connecting orbit (the small roots)."""
    rates = []
    for which in (Branch.MINUS, Branch.PLUS):
        l1, l2 = reduced_slow_eigenvalues(problem, which)
        rates.append(min(abs(l1), abs(l2)))
    return rates[0], rates[1]


def shoot_heteroclinic(
    problem: WaveProblem,
    epsilon: float,
    singular: Optional[SingularOrbit] = None,
    L_shoot: Optional[float] = None,
    segment: Optional[float] = None,
    rtol: float = 1e-12,
    max_iter: int = 30,
) -> HeteroclinicSolution:
    """Independent multiple-shooting solve of the profile boundary value
    problem, used as a cross-check on the collocation path.

    Single shooting is unusable here: the slow transverse mode amplifies
    deviations by exp(beta L) along the interval, so the set of center
    values from which the flow even reaches the endpoints is exponentially
    thin.  Segmenting the interval caps the amplification per segment at
    exp(beta * segment), and orienting every segment away from the origin
    keeps the fast mode contracting during integration on both sides.

    Unknowns are the states at the segment junctions; equations are the
    flow-matching conditions per segment plus the same eigenprojection and
    phase rows as the collocation solve.  Newton uses finite-difference
    segment Jacobians and a step-halving line search.
    """
    if singular is None:
        singular = assemble_singular_orbit(problem)
    alpha_l, alpha_r = _slow_rates(problem)
    alpha = min(alpha_l, alpha_r)
    # growing rate = 1/decaying rate: the reduced eigenvalue product is -1
    beta = 1.0 / alpha
    if L_shoot is None:
        L_shoot = 14.0 / alpha
    if segment is None:
        segment = 1.0 / beta
    last_exc: Optional[Exception] = None
    for _attempt in range(3):
        try:
            return _shoot_once(
                problem, epsilon, singular, L_shoot, segment, rtol, max_iter
            )
        except (LeftDomain, NewtonDiverged) as exc:
            last_exc = exc
            segment *= 0.5
    raise last_exc


def _shoot_once(
    problem: WaveProblem,
    epsilon: float,
    singular: SingularOrbit,
    L_shoot: float,
    segment: float,
    rtol: float,
    max_iter: int,
) -> HeteroclinicSolution:
    n_half = max(1, int(math.ceil(L_shoot / segment)))
    nodes = np.linspace(-L_shoot, L_shoot, 2 * n_half + 1)
    center = n_half
    nodes[center] = 0.0
    n_node = len(nodes)

    (_, l_left, t_left), (_, l_right, t_right), _ = projection_rows(
        problem, epsilon, 2, 0.0
    )
    phase = _phase_target(singular.matching)
    rhs_v = _profile_rhs(problem, epsilon)

    def rhs(x, y):
        return rhs_v(x, y[None, :])[0]

    def flow(i: int, y_start: np.ndarray, dense: bool = False):
        # segment i spans [nodes[i], nodes[i+1]]; left of center integrates
        # backward (outward), right of center forward (outward)
        if i < center:
            span = (nodes[i + 1], nodes[i])
        else:
            span = (nodes[i], nodes[i + 1])
        sol = solve_ivp(
            rhs, span, y_start, method="DOP853", rtol=rtol, atol=1e-14,
            dense_output=dense,
        )
        if not sol.success or not np.all(np.isfinite(sol.y[:, -1])):
            return None
        return sol

    def residual(Y: np.ndarray):
        R = np.empty((n_node - 1, 3))
        for i in range(n_node - 1):
            start = Y[i + 1] if i < center else Y[i]
            sol = flow(i, start)
            if sol is None:
                return None
            target = Y[i] if i < center else Y[i + 1]
            R[i] = sol.y[:, -1] - target
        bc = np.array(
            [
                l_left @ Y[0] - t_left,
                l_right @ Y[-1] - t_right,
                Y[center, 0] - phase,
            ]
        )
        return np.concatenate([R.ravel(), bc])

    Y = singular.guess(nodes, epsilon)
    r = residual(Y)
    if r is None:
        raise LeftDomain("shooting seed leaves the integrable region")
    best = float(np.max(np.abs(r)))

    for it in range(1, max_iter + 1):
        if best < 1e-11:
            break
        J = np.zeros((3 * n_node, 3 * n_node))
        for i in range(n_node - 1):
            row = slice(3 * i, 3 * i + 3)
            start_idx = i + 1 if i < center else i
            targ_idx = i if i < center else i + 1
            start = Y[start_idx]
            base = flow(i, start)
            if base is None:
                raise NewtonDiverged("shooting iterate left the integrable region")
            yb = base.y[:, -1]
            for j in range(3):
                dy = np.zeros(3)
                dy[j] = 1e-8 * max(1.0, abs(start[j]))
                pert = flow(i, start + dy)
                if pert is None:
                    raise NewtonDiverged("shooting Jacobian probe failed")
                J[row, 3 * start_idx + j] = (pert.y[:, -1] - yb) / dy[j]
            J[row, 3 * targ_idx : 3 * targ_idx + 3] = -np.eye(3)
        J[3 * (n_node - 1), 0:3] = l_left
        J[3 * (n_node - 1) + 1, 3 * (n_node - 1) : 3 * n_node] = l_right
        J[3 * (n_node - 1) + 2, 3 * center] = 1.0

        try:
            delta = np.linalg.solve(J, -r).reshape(n_node, 3)
        except np.linalg.LinAlgError as exc:
            raise NewtonDiverged(f"singular shooting Jacobian: {exc}") from exc
        step = 1.0
        accepted = False
        for _ in range(10):
            r_try = residual(Y + step * delta)
            if r_try is not None:
                norm_try = float(np.max(np.abs(r_try)))
                if norm_try < best:
                    Y = Y + step * delta
                    r, best = r_try, norm_try
                    accepted = True
                    break
            step *= 0.5
        if not accepted:
            raise NewtonDiverged(
                f"shooting line search stalled at iteration {it}, "
                f"residual {best:.3e}"
            )
    if best >= 1e-11:
        raise NewtonDiverged(
            f"shooting did not converge in {max_iter} iterations, "
            f"residual {best:.3e}"
        )

    xs = []
    vs = []
    for i in range(n_node - 1):
        start = Y[i + 1] if i < center else Y[i]
        sol = flow(i, start, dense=True)
        t = np.linspace(nodes[i], nodes[i + 1], 64, endpoint=(i == n_node - 2))
        xs.append(t)
        vs.append(sol.sol(t).T)
    x = np.concatenate(xs)
    vals = np.vstack(vs)
    defect = max(
        float(np.max(np.abs(vals[0] - _rest_point(problem, problem.u_minus)))),
        float(np.max(np.abs(vals[-1] - _rest_point(problem, problem.u_plus)))),
    )
    width = _width_80_profile(
        x, vals[:, 0], singular.matching.u_left, singular.matching.u_right
    )
    return HeteroclinicSolution(problem, epsilon, x, vals, best, defect, width, 0)
