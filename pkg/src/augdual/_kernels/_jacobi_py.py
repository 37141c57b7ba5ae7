"""Pure-Python (numpy) fallback for the one-sided Jacobi kernel.

Mirrors the compiled extension exactly: same sweep order, same rotation
formulas, so both backends converge to the same factorization.
"""

import math

import numpy as np


def jacobi_rotate(a: np.ndarray, v: np.ndarray, tol: float, max_sweeps: int) -> int:
    """Hestenes one-sided Jacobi sweeps; see the compiled kernel docstring."""
    m = a.shape[1]
    for sweep in range(max_sweeps):
        off = 0.0
        for p in range(m - 1):
            for q in range(p + 1, m):
                ap = a[:, p]
                aq = a[:, q]
                alpha = float(ap @ ap)
                beta = float(aq @ aq)
                gamma = float(ap @ aq)
                if alpha == 0.0 or beta == 0.0:
                    continue
                rel = abs(gamma) / math.sqrt(alpha * beta)
                off = max(off, rel)
                if rel <= tol:
                    continue
                zeta = (beta - alpha) / (2.0 * gamma)
                if zeta >= 0.0:
                    t = 1.0 / (zeta + math.sqrt(1.0 + zeta * zeta))
                else:
                    t = -1.0 / (-zeta + math.sqrt(1.0 + zeta * zeta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = c * t
                new_p = c * ap - s * aq
                new_q = s * ap + c * aq
                a[:, p] = new_p
                a[:, q] = new_q
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
        if off <= tol:
            return sweep + 1
    return -1
