"""Shared helper for turning solve_ivp dense output into chord-accurate samples."""

from __future__ import annotations

import numpy as np


def refine_times(sol, tol: float = 1e-8, max_depth: int = 24) -> np.ndarray:
    """Solver knots refined so linear interpolation matches dense output.

    Each step interval is bisected while the dense-output midpoint deviates
    from the chord midpoint by more than tol.  All intervals at one depth
    are evaluated through a single vectorized dense-output call.
    """
    knots = np.asarray(sol.t, dtype=float)
    if knots.size < 2:
        return knots.copy()
    ys = np.atleast_2d(sol.sol(knots))
    t0s, t1s = knots[:-1], knots[1:]
    y0s, y1s = ys[:, :-1], ys[:, 1:]
    out = [float(knots[0])]
    for depth in range(max_depth + 1):
        if t0s.size == 0:
            break
        tms = 0.5 * (t0s + t1s)
        yms = np.atleast_2d(sol.sol(tms))
        errs = np.max(np.abs(yms - 0.5 * (y0s + y1s)), axis=0)
        # intervals that hit the depth cap are accepted as they stand
        split = (errs > tol) if depth < max_depth else np.zeros(t0s.size, dtype=bool)
        out.extend(t1s[~split].tolist())
        t0s = np.concatenate([t0s[split], tms[split]])
        t1s = np.concatenate([tms[split], t1s[split]])
        y0s = np.hstack([y0s[:, split], yms[:, split]])
        y1s = np.hstack([yms[:, split], y1s[:, split]])
    return np.array(sorted(set(out)))
