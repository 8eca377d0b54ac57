"""Eigenvalue structure of the traveling-wave system.

Three linearizations matter.  The fast Jacobian (layer scale)

    dF_eps = [[df_c(u), -1,   0 ],
              [-eps dg(u), 0, eps],
              [0,        eps,  0 ]]

has characteristic polynomial -l^3 + df_c l^2 + eps (dg + eps) l - eps^2 df_c,
so trace = df_c and det = -eps^2 df_c.  Appending eps' = 0 and freezing eps = 0
gives the extended spectrum {0, 0, 0, df_c(u)} on the slow manifold.  The
reduced (slow) flow on a branch has characteristic polynomial -l (l^2 +
(dg/df_c) l - 1) at a rest state, with the closed-form nonzero roots below.

All spectra are computed in closed form (Cardano / trigonometric cubic), not
by an iterative eigensolver, then polished by one or two Newton steps so the
trace/determinant identities hold to 1e-10 relative.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .errors import NotASaddle, NotNormallyHyperbolic, NotOnSlowManifold, OrderingViolated
from .model import Branch, WaveProblem

ZERO_TOL = 1e-10


@dataclass(frozen=True)
class SpectralReport:
    """Eigenvalues at a point plus stable/unstable/center counts.

    Counts use a 1e-10 absolute tolerance on the real part; eigenvalues within
    it are classified as center directions.
    """

    point: Tuple[float, ...]
    epsilon: float
    eigenvalues: Tuple[complex, ...]
    n_stable: int
    n_unstable: int
    n_center: int


def _report(point, epsilon, eigenvalues) -> SpectralReport:
    n_stable = sum(1 for l in eigenvalues if l.real < -ZERO_TOL)
    n_unstable = sum(1 for l in eigenvalues if l.real > ZERO_TOL)
    n_center = len(eigenvalues) - n_stable - n_unstable
    return SpectralReport(
        point=tuple(float(p) for p in point),
        epsilon=float(epsilon),
        eigenvalues=tuple(complex(l) for l in eigenvalues),
        n_stable=n_stable,
        n_unstable=n_unstable,
        n_center=n_center,
    )


def cubic_roots(a2: float, a1: float, a0: float) -> Tuple[complex, complex, complex]:
    """Roots of l^3 + a2 l^2 + a1 l + a0 in closed form.

    Trigonometric form when all three roots are real, Cardano with a
    cancellation-safe cube root otherwise.  Each root gets up to two complex
    Newton polish steps on the monic cubic.
    """
    p = a1 - a2 * a2 / 3.0
    q = 2.0 * a2**3 / 27.0 - a2 * a1 / 3.0 + a0
    shift = a2 / 3.0
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3

    if disc > 0.0:
        s = math.sqrt(disc)
        big = -q / 2.0 - s if q > 0.0 else -q / 2.0 + s
        uu = math.copysign(abs(big) ** (1.0 / 3.0), big)
        vv = -p / (3.0 * uu) if uu != 0.0 else 0.0
        t1 = uu + vv
        # remaining quadratic t^2 + t1 t + (t1^2 + p)
        half = -t1 / 2.0
        rad = cmath.sqrt(complex(t1 * t1 / 4.0 - (t1 * t1 + p)))
        ts: Sequence[complex] = (t1, half + rad, half - rad)
    elif p < 0.0 and p * 2.0 * math.sqrt(-p / 3.0) != 0.0:
        # three real roots
        m = 2.0 * math.sqrt(-p / 3.0)
        arg = 3.0 * q / (p * m)
        arg = min(1.0, max(-1.0, arg))
        theta = math.acos(arg) / 3.0
        ts = tuple(m * math.cos(theta - 2.0 * math.pi * k / 3.0) for k in range(3))
    else:
        # disc <= 0 with p >= 0 (or underflowed p): the near-triple-root corner
        t1 = math.copysign(abs(q) ** (1.0 / 3.0), -q)
        rot = cmath.exp(2j * math.pi / 3.0)
        ts = (t1, t1 * rot, t1 * rot.conjugate())

    root_scale = max(abs(t) for t in ts) + abs(shift)
    roots = []
    for t in ts:
        lam = t - shift
        for _ in range(2):
            f = ((lam + a2) * lam + a1) * lam + a0
            df = (3.0 * lam + 2.0 * a2) * lam + a1
            if df == 0.0:
                break
            step = f / df
            # polish must stay near the closed-form root and reduce the
            # residual; clustered roots with denormal f' violate one or the
            # other, and then the closed-form value is the better answer
            if abs(step) > 0.1 * (root_scale + abs(lam)):
                break
            new = lam - step
            fn = ((new + a2) * new + a1) * new + a0
            if abs(fn) >= abs(f):
                break
            lam = new
        roots.append(complex(lam))
    return tuple(roots)


def fast_jacobian(problem: WaveProblem, u: float, epsilon: float) -> np.ndarray:
    dfc = problem.df_c(u)
    dg = float(problem.dg(u))
    return np.array(
        [
            [dfc, -1.0, 0.0],
            [-epsilon * dg, 0.0, epsilon],
            [0.0, epsilon, 0.0],
        ]
    )


def fast_jacobian_spectrum(
    problem: WaveProblem, point: Sequence[float], epsilon: float
) -> SpectralReport:
    """Spectrum of the layer-scale Jacobian at a point (u, v, w).

    At eps = 0 the polynomial factors exactly as -l^2 (l - df_c(u)); that case
    is returned without any root finding.
    """
    u = float(point[0])
    dfc = problem.df_c(u)
    if epsilon == 0.0:
        eigs = (0.0 + 0.0j, 0.0 + 0.0j, complex(dfc))
    else:
        dg = float(problem.dg(u))
        eigs = cubic_roots(-dfc, -epsilon * (dg + epsilon), epsilon * epsilon * dfc)
    return _report(point, epsilon, eigs)


def extended_spectrum_eps0(problem: WaveProblem, point: Sequence[float]) -> SpectralReport:
    """Spectrum of the eps-extended system at eps = 0 on the slow manifold.

    The point (u, v, w) must satisfy F = f_c(u) - fc_plateau - v = 0 to 1e-10
    and df_c(u) must stay away from zero (normal hyperbolicity).  Eigenvalues
    are {0, 0, 0, df_c(u)}: the triple zero spans the slow directions plus the
    frozen eps direction, and the sign of df_c(u) separates the two branches.
    """
    u, v = float(point[0]), float(point[1])
    F = problem.f_c(u) - problem.fc_plateau - v
    if abs(F) > 1e-10:
        raise NotOnSlowManifold(f"|F| = {abs(F):.3e} at u = {u}, v = {v}")
    dfc = problem.df_c(u)
    if abs(dfc) < 1e-8:
        raise NotNormallyHyperbolic(f"df_c(u) = {dfc:.3e} at u = {u}")
    eigs = (0.0 + 0.0j, 0.0 + 0.0j, 0.0 + 0.0j, complex(dfc))
    return _report(point, 0.0, eigs)


def reduced_slow_eigenvalues(problem: WaveProblem, which: Branch) -> Tuple[float, float]:
    """Closed-form nonzero eigenvalues of the reduced flow at a rest state.

    Roots of l^2 + (dg/df_c) l - 1 evaluated at u_minus (MINUS) or u_plus
    (PLUS):

        l1 = -(sqrt(dg^2 + 4 df_c^2) + sign(df_c) dg) / (2 |df_c|)
        l2 =  (sqrt(dg^2 + 4 df_c^2) - sign(df_c) dg) / (2 |df_c|)

    so l1 < 0 < l2 and l1 * l2 = -1 at both states.
    """
    u = problem.u_minus if which is Branch.MINUS else problem.u_plus
    dfc = problem.df_c(u)
    if abs(dfc) < 1e-8:
        raise NotNormallyHyperbolic(f"df_c = {dfc:.3e} at rest state u = {u}")
    dg = float(problem.dg(u))
    root = math.hypot(dg, 2.0 * dfc)
    sgn = math.copysign(1.0, dfc)
    l1 = -(root + sgn * dg) / (2.0 * abs(dfc))
    l2 = (root - sgn * dg) / (2.0 * abs(dfc))
    return l1, l2


def reduced_jacobian_spectrum(problem: WaveProblem, which: Branch) -> SpectralReport:
    """Spectrum {0, l1, l2} of the reduced slow flow at a rest state.

    Verifies the saddle splitting (one negative, one positive nonzero root)
    and the ordering required of the two branches: l1 < -1 and 0 < l2 < 1 at
    u_minus, -1 < l1 < 0 and l2 > 1 at u_plus.  Since l1 * l2 = -1 exactly,
    l = 1 is never an eigenvalue.
    """
    l1, l2 = reduced_slow_eigenvalues(problem, which)
    if not (l1 < -ZERO_TOL < ZERO_TOL < l2):
        raise NotASaddle(f"nonzero reduced eigenvalues {l1}, {l2} are not a saddle pair")
    if which is Branch.MINUS:
        ok = l1 < -1.0 and 0.0 < l2 < 1.0
    else:
        ok = -1.0 < l1 < 0.0 and l2 > 1.0
    if not ok:
        raise OrderingViolated(
            f"reduced eigenvalues ({l1}, {l2}) violate the {which.value}-branch ordering"
        )
    u = problem.u_minus if which is Branch.MINUS else problem.u_plus
    point = (u, 0.0, float(problem.g(u)))
    return _report(point, 0.0, (0.0 + 0.0j, complex(l1), complex(l2)))
