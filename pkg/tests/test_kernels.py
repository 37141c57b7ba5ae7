import numpy as np
import pytest

from augdual._kernels import COMPILED
from augdual._kernels import _jacobi_py


def _run(kernel, seed, shape):
    rng = np.random.default_rng(seed)
    a = np.ascontiguousarray(rng.standard_normal(shape))
    v = np.ascontiguousarray(np.eye(shape[1]))
    sweeps = kernel(a, v, 5e-15, 100)
    return a, v, sweeps


def test_fallback_orthogonalizes_columns():
    a, v, sweeps = _run(_jacobi_py.jacobi_rotate, 0, (6, 4))
    assert sweeps >= 0
    gram = a.T @ a
    off = gram - np.diag(np.diag(gram))
    assert np.max(np.abs(off)) <= 1e-10 * np.max(np.diag(gram))
    assert np.max(np.abs(v.T @ v - np.eye(4))) <= 1e-12


@pytest.mark.skipif(not COMPILED, reason="compiled kernel unavailable")
def test_backends_agree():
    # same sweep order and formulas; only dot-product reduction order
    # differs between C and numpy, so agreement is to rounding, not bitwise
    from augdual._kernels import _jacobi

    for seed in range(5):
        ac, vc, sc = _run(_jacobi.jacobi_rotate, seed, (7, 5))
        ap, vp, sp = _run(_jacobi_py.jacobi_rotate, seed, (7, 5))
        assert sc == sp
        assert np.max(np.abs(ac - ap)) <= 1e-12
        assert np.max(np.abs(vc - vp)) <= 1e-12


def test_svd_identical_under_either_backend():
    # numerics.svd resolves the backend at import; this checks the active one
    # against a fallback-driven reference computed in-process.
    from augdual.numerics import svd

    rng = np.random.default_rng(3)
    m = rng.standard_normal((8, 5))
    res = svd(m)
    a = np.ascontiguousarray(m.copy())
    v = np.ascontiguousarray(np.eye(5))
    _jacobi_py.jacobi_rotate(a, v, 5e-15, 100)
    norms = np.sqrt(np.sum(a * a, axis=0))
    assert np.allclose(np.sort(norms)[::-1], res.s, atol=1e-10)
