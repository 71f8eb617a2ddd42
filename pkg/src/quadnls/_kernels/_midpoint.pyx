# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled implicit-midpoint step: Thomas solves plus the Picard sweep.

Semantics mirror quadnls._kernels.fallback.midpoint_step exactly; this
version keeps the whole per-step loop in C.
"""

import numpy as np

from libc.math cimport sqrt

BACKEND = "cython"


cdef void _factor(const double complex[::1] a, const double complex[::1] b,
                  const double complex[::1] c, double complex[::1] cp,
                  double complex[::1] inv, Py_ssize_t n) nogil:
    cdef Py_ssize_t j
    cdef double complex denom
    inv[0] = 1.0 / b[0]
    cp[0] = c[0] * inv[0]
    for j in range(1, n):
        denom = b[j] - a[j] * cp[j - 1]
        inv[j] = 1.0 / denom
        cp[j] = c[j] * inv[j]


cdef void _solve(const double complex[::1] a, const double complex[::1] cp,
                 const double complex[::1] inv, const double complex[::1] d,
                 double complex[::1] x, Py_ssize_t n) nogil:
    cdef Py_ssize_t j
    x[0] = d[0] * inv[0]
    for j in range(1, n):
        x[j] = (d[j] - a[j] * x[j - 1]) * inv[j]
    for j in range(n - 2, -1, -1):
        x[j] = x[j] - cp[j] * x[j + 1]


def midpoint_step(u_in, v_in, lap_lower, lap_diag, lap_upper, weights,
                  double dt, double kappa, double tol_abs, int max_iter):
    """One implicit-midpoint step; see the fallback module for the contract."""
    cdef const double complex[::1] u = np.ascontiguousarray(u_in, dtype=complex)
    cdef const double complex[::1] v = np.ascontiguousarray(v_in, dtype=complex)
    cdef const double[::1] ll = np.ascontiguousarray(lap_lower, dtype=float)
    cdef const double[::1] ld = np.ascontiguousarray(lap_diag, dtype=float)
    cdef const double[::1] lu = np.ascontiguousarray(lap_upper, dtype=float)
    cdef const double[::1] w = np.ascontiguousarray(weights, dtype=float)
    cdef Py_ssize_t n = u.shape[0]

    work = np.empty((14, n), dtype=complex)
    cdef double complex[::1] au = work[0], bu = work[1], cu = work[2]
    cdef double complex[::1] av = work[3], bv = work[4], cv = work[5]
    cdef double complex[::1] cpu = work[6], invu = work[7]
    cdef double complex[::1] cpv = work[8], invv = work[9]
    cdef double complex[::1] rhs0u = work[10], rhs0v = work[11]
    cdef double complex[::1] rhs = work[12], mid = work[13]

    u_next_arr = np.empty(n, dtype=complex)
    v_next_arr = np.empty(n, dtype=complex)
    um_arr = np.empty(n, dtype=complex)
    vm_arr = np.empty(n, dtype=complex)
    cdef double complex[::1] u_next = u_next_arr, v_next = v_next_arr
    cdef double complex[::1] um = um_arr, vm = vm_arr

    cdef double complex tau = 0.5j * dt
    cdef double complex ktau = kappa * tau
    cdef double complex idt = 1j * dt
    cdef double complex lapval
    cdef Py_ssize_t j
    cdef int it = 0
    cdef bint converged = False
    cdef double delta2, du_re, du_im, dv_re, dv_im
    cdef double complex du, dv

    with nogil:
        for j in range(n):
            au[j] = -tau * ll[j]
            bu[j] = 1.0 - tau * ld[j]
            cu[j] = -tau * lu[j]
            av[j] = -ktau * ll[j]
            bv[j] = 1.0 - ktau * ld[j]
            cv[j] = -ktau * lu[j]
        _factor(au, bu, cu, cpu, invu, n)
        _factor(av, bv, cv, cpv, invv, n)

        for j in range(n):
            lapval = ld[j] * u[j]
            if j > 0:
                lapval = lapval + ll[j] * u[j - 1]
            if j < n - 1:
                lapval = lapval + lu[j] * u[j + 1]
            rhs0u[j] = u[j] + tau * lapval
            lapval = ld[j] * v[j]
            if j > 0:
                lapval = lapval + ll[j] * v[j - 1]
            if j < n - 1:
                lapval = lapval + lu[j] * v[j + 1]
            rhs0v[j] = v[j] + ktau * lapval
            um[j] = u[j]
            vm[j] = v[j]
            u_next[j] = u[j]
            v_next[j] = v[j]

        while it < max_iter and not converged:
            it += 1
            for j in range(n):
                rhs[j] = rhs0u[j] + 2.0 * idt * vm[j] * um[j].conjugate()
            _solve(au, cpu, invu, rhs, mid, n)
            delta2 = 0.0
            for j in range(n):
                du = mid[j] - u_next[j]
                du_re = du.real
                du_im = du.imag
                delta2 += w[j] * (du_re * du_re + du_im * du_im)
                u_next[j] = mid[j]

            for j in range(n):
                rhs[j] = rhs0v[j] + idt * um[j] * um[j]
            _solve(av, cpv, invv, rhs, mid, n)
            for j in range(n):
                dv = mid[j] - v_next[j]
                dv_re = dv.real
                dv_im = dv.imag
                delta2 += 2.0 * w[j] * (dv_re * dv_re + dv_im * dv_im)
                v_next[j] = mid[j]

            for j in range(n):
                um[j] = 0.5 * (u[j] + u_next[j])
                vm[j] = 0.5 * (v[j] + v_next[j])
            if sqrt(delta2) <= tol_abs:
                converged = True

    return u_next_arr, v_next_arr, it, bool(converged)
