"""Kernel backend selection.

The compiled Cython kernel is preferred; the numpy fallback is used when the
extension is unavailable or when AUGDUAL_PURE_PYTHON is set (the benchmark
uses the env var to compare both).
"""

import os

if os.environ.get("AUGDUAL_PURE_PYTHON"):
    from ._jacobi_py import jacobi_rotate

    COMPILED = False
else:
    try:
        from ._jacobi import jacobi_rotate  # type: ignore[no-redef]

        COMPILED = True
    except ImportError:
        from ._jacobi_py import jacobi_rotate  # type: ignore[no-redef]

        COMPILED = False

__all__ = ["jacobi_rotate", "COMPILED"]
