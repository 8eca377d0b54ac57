"""Fixed-mesh collocation core for the connecting-orbit boundary value problems.

The discretization is 3-point Lobatto collocation on each mesh cell: the
collocating cubic matches the ODE at both cell ends and at the cell midpoint,
which condenses to the Simpson relation

    y_{i+1} - y_i = h/6 (f_i + 4 f_mid + f_{i+1}),
    y_mid = (y_i + y_{i+1})/2 - h/8 (f_{i+1} - f_i).

Boundary conditions enter as linear rows  weight . y[node] = target,  which
covers eigenprojection conditions at the endpoints and interior phase
conditions alike.  The damped Newton iteration assembles an analytic sparse
Jacobian and factors it with SuperLU.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence, Tuple

import numpy as np
from scipy.sparse import csc_matrix
from scipy.sparse.linalg import splu

from .errors import NewtonDiverged

BcRow = Tuple[int, np.ndarray, float]


@dataclass(frozen=True)
class CollocationResult:
    mesh: np.ndarray
    values: np.ndarray
    residual_norm: float
    newton_iterations: int


def _stage_values(mesh, Y, f):
    h = np.diff(mesh)[:, None]
    y_mid = 0.5 * (Y[:-1] + Y[1:]) - h / 8.0 * (f[1:] - f[:-1])
    x_mid = 0.5 * (mesh[:-1] + mesh[1:])
    return x_mid, y_mid, h


def collocation_residual(rhs: Callable, mesh: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Residual of the condensed Lobatto equations, shape (N, d)."""
    f = rhs(mesh, Y)
    x_mid, y_mid, h = _stage_values(mesh, Y, f)
    f_mid = rhs(x_mid, y_mid)
    return Y[1:] - Y[:-1] - h / 6.0 * (f[:-1] + 4.0 * f_mid + f[1:])


def _full_residual(rhs, mesh, Y, bc_rows):
    col = collocation_residual(rhs, mesh, Y).ravel()
    bc = np.array([w @ Y[node] - target for node, w, target in bc_rows])
    return np.concatenate([col, bc])


def _jacobian(rhs, jac, mesh, Y, bc_rows):
    n_node, d = Y.shape
    n_cell = n_node - 1
    f = rhs(mesh, Y)
    x_mid, y_mid, h3 = _stage_values(mesh, Y, f)
    A = jac(mesh, Y)
    A_mid = jac(x_mid, y_mid)
    h = h3[:, :, None]

    eye = np.broadcast_to(np.eye(d), (n_cell, d, d))
    # d y_mid / d y_i = I/2 + h/8 A_i,  d y_mid / d y_{i+1} = I/2 - h/8 A_{i+1}
    dmid_l = 0.5 * eye + h / 8.0 * A[:-1]
    dmid_r = 0.5 * eye - h / 8.0 * A[1:]
    dPhi_l = -eye - h / 6.0 * (A[:-1] + 4.0 * np.matmul(A_mid, dmid_l))
    dPhi_r = eye - h / 6.0 * (A[1:] + 4.0 * np.matmul(A_mid, dmid_r))

    cell = np.arange(n_cell)
    rows_block = (cell[:, None, None] * d + np.arange(d)[None, :, None]) * np.ones(
        (1, 1, d), dtype=int
    )
    cols_l = cell[:, None, None] * d + np.arange(d)[None, None, :] * np.ones(
        (1, d, 1), dtype=int
    )
    cols_r = cols_l + d

    rows = np.concatenate([rows_block.ravel(), rows_block.ravel()])
    cols = np.concatenate([cols_l.ravel(), cols_r.ravel()])
    data = np.concatenate([dPhi_l.ravel(), dPhi_r.ravel()])

    bc_rows_idx = []
    bc_cols_idx = []
    bc_data = []
    for k, (node, w, _target) in enumerate(bc_rows):
        for j in range(d):
            bc_rows_idx.append(n_cell * d + k)
            bc_cols_idx.append(node * d + j)
            bc_data.append(w[j])

    rows = np.concatenate([rows, np.array(bc_rows_idx, dtype=int)])
    cols = np.concatenate([cols, np.array(bc_cols_idx, dtype=int)])
    data = np.concatenate([data, np.array(bc_data)])
    n = n_node * d
    return csc_matrix((data, (rows, cols)), shape=(n, n))


def solve_collocation(
    rhs: Callable,
    jac: Callable,
    mesh: np.ndarray,
    y_init: np.ndarray,
    bc_rows: Sequence[BcRow],
    tol: float = 1e-11,
    max_iter: int = 40,
) -> CollocationResult:
    """Damped Newton iteration on the collocation system.

    rhs(x, Y) and jac(x, Y) must be vectorized over the leading axis.  The
    number of boundary rows must equal the system dimension.  Raises
    NewtonDiverged on stagnation, NaN contamination, or iteration budget
    exhaustion.
    """
    mesh = np.asarray(mesh, dtype=float)
    Y = np.array(y_init, dtype=float)
    n_node, d = Y.shape
    if len(bc_rows) != d:
        raise ValueError(f"need exactly {d} boundary rows, got {len(bc_rows)}")
    if not np.all(np.diff(mesh) > 0.0):
        raise ValueError("mesh must be strictly increasing")

    r = _full_residual(rhs, mesh, Y, bc_rows)
    best = float(np.max(np.abs(r)))
    for it in range(1, max_iter + 1):
        if not np.isfinite(best):
            raise NewtonDiverged(f"residual became non-finite at iteration {it}")
        if best < tol:
            return CollocationResult(mesh, Y, best, it - 1)
        J = _jacobian(rhs, jac, mesh, Y, bc_rows)
        try:
            delta = splu(J).solve(-r)
        except RuntimeError as exc:
            raise NewtonDiverged(f"singular collocation Jacobian: {exc}") from exc
        delta = delta.reshape(n_node, d)

        alpha = 1.0
        accepted = False
        for _ in range(10):
            Y_try = Y + alpha * delta
            r_try = _full_residual(rhs, mesh, Y_try, bc_rows)
            norm_try = float(np.max(np.abs(r_try)))
            if np.isfinite(norm_try) and norm_try < best:
                Y, r, best = Y_try, r_try, norm_try
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            raise NewtonDiverged(
                f"line search stalled at iteration {it}, residual {best:.3e}"
            )
    if best < tol:
        return CollocationResult(mesh, Y, best, max_iter)
    raise NewtonDiverged(f"no convergence in {max_iter} iterations, residual {best:.3e}")


def hermite_eval(
    rhs: Callable, mesh: np.ndarray, Y: np.ndarray, x: np.ndarray
) -> np.ndarray:
    """Evaluate the C^1 collocation interpolant (cubic Hermite with ODE slopes)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    f = rhs(mesh, Y)
    idx = np.clip(np.searchsorted(mesh, x, side="right") - 1, 0, len(mesh) - 2)
    h = mesh[idx + 1] - mesh[idx]
    s = ((x - mesh[idx]) / h)[:, None]
    h = h[:, None]
    y0, y1 = Y[idx], Y[idx + 1]
    f0, f1 = f[idx], f[idx + 1]
    h00 = (1.0 + 2.0 * s) * (1.0 - s) ** 2
    h10 = s * (1.0 - s) ** 2
    h01 = s * s * (3.0 - 2.0 * s)
    h11 = s * s * (s - 1.0)
    return h00 * y0 + h10 * h * f0 + h01 * y1 + h11 * h * f1
