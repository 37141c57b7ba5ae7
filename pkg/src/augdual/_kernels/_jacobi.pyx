# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled one-sided Jacobi kernel: orthogonalizes the columns of a matrix
in place by plane rotations, accumulating the rotations in ``v``."""

from libc.math cimport fabs, sqrt


def jacobi_rotate(double[:, ::1] a, double[:, ::1] v, double tol, int max_sweeps):
    """Run Hestenes one-sided Jacobi sweeps on the columns of ``a``.

    ``a`` is n-by-m with n >= m; ``v`` is m-by-m and must start as the
    identity. On return the columns of ``a`` are mutually orthogonal to
    ``tol`` (relative), ``a_in = a_out @ v.T``. Returns the number of sweeps
    used, or -1 if ``max_sweeps`` was exhausted first.
    """
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t m = a.shape[1]
    cdef Py_ssize_t p, q, i, sweep
    cdef double alpha, beta, gamma, zeta, t, c, s, off, ap, aq, rel

    for sweep in range(max_sweeps):
        off = 0.0
        for p in range(m - 1):
            for q in range(p + 1, m):
                alpha = 0.0
                beta = 0.0
                gamma = 0.0
                for i in range(n):
                    ap = a[i, p]
                    aq = a[i, q]
                    alpha += ap * ap
                    beta += aq * aq
                    gamma += ap * aq
                if alpha == 0.0 or beta == 0.0:
                    continue
                rel = fabs(gamma) / sqrt(alpha * beta)
                if rel > off:
                    off = rel
                if rel <= tol:
                    continue
                zeta = (beta - alpha) / (2.0 * gamma)
                if zeta >= 0.0:
                    t = 1.0 / (zeta + sqrt(1.0 + zeta * zeta))
                else:
                    t = -1.0 / (-zeta + sqrt(1.0 + zeta * zeta))
                c = 1.0 / sqrt(1.0 + t * t)
                s = c * t
                for i in range(n):
                    ap = a[i, p]
                    aq = a[i, q]
                    a[i, p] = c * ap - s * aq
                    a[i, q] = s * ap + c * aq
                for i in range(m):
                    ap = v[i, p]
                    aq = v[i, q]
                    v[i, p] = c * ap - s * aq
                    v[i, q] = s * ap + c * aq
        if off <= tol:
            return sweep + 1
    return -1
