"""Pure numpy/scipy implementation of the implicit-midpoint step.

Reference semantics for the compiled kernel: one step of

    i u_t + Lap u = -2 v conj(u)
    i v_t + kappa Lap v = -u^2

by the implicit midpoint rule, with the midpoint state resolved by Picard
iteration and the linear half-steps solved as banded systems.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.linalg import solve_banded

BACKEND = "python"


def _banded(lower, diag, upper, coeff):
    """LAPACK band storage of I - coeff * L for the tridiagonal L."""
    n = diag.shape[0]
    ab = np.zeros((3, n), dtype=complex)
    ab[0, 1:] = -coeff * upper[:-1]
    ab[1, :] = 1.0 - coeff * diag
    ab[2, :-1] = -coeff * lower[1:]
    return ab


def _apply(lower, diag, upper, x):
    out = diag * x
    out[1:] += lower[1:] * x[:-1]
    out[:-1] += upper[:-1] * x[1:]
    return out


def midpoint_step(u, v, lap_lower, lap_diag, lap_upper, weights,
                  dt, kappa, tol_abs, max_iter):
    """One implicit-midpoint step.

    Returns (u_new, v_new, iterations, converged); convergence is measured by
    the charge-weighted norm of the update between Picard sweeps.
    """
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    tau = 0.5j * dt

    ab_u = _banded(lap_lower, lap_diag, lap_upper, tau)
    ab_v = _banded(lap_lower, lap_diag, lap_upper, kappa * tau)
    rhs0_u = u + tau * _apply(lap_lower, lap_diag, lap_upper, u)
    rhs0_v = v + kappa * tau * _apply(lap_lower, lap_diag, lap_upper, v)

    um, vm = u, v
    u_prev, v_prev = u, v
    u_next, v_next = u, v
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        rhs_u = rhs0_u + (2j * dt) * vm * np.conj(um)
        rhs_v = rhs0_v + (1j * dt) * um * um
        u_next = solve_banded((1, 1), ab_u, rhs_u, check_finite=False)
        v_next = solve_banded((1, 1), ab_v, rhs_v, check_finite=False)
        du = u_next - u_prev
        dv = v_next - v_prev
        with np.errstate(over="ignore", invalid="ignore"):
            delta2 = float(
                np.dot(weights, np.abs(du) ** 2)
                + 2.0 * np.dot(weights, np.abs(dv) ** 2)
            )
        if not math.isfinite(delta2):
            break  # Picard diverged; report non-convergence
        delta = math.sqrt(delta2)
        um = 0.5 * (u + u_next)
        vm = 0.5 * (v + v_next)
        u_prev, v_prev = u_next, v_next
        if delta <= tol_abs:
            converged = True
            break
    return u_next, v_next, iterations, converged
