"""Dual gradient solver for augmented norm- and gauge-regularized recovery
models, including linearized Bregman, singular value thresholding, and
strongly convex RPCA as instances."""

from ._kernels import COMPILED as KERNEL_COMPILED
from .linop import BlockSum, Dense, Point, SamplingMask
from .prox import NormSpec
from .solver import ProblemSpec, SolveConfig, solve, solve_accelerated

__all__ = [
    "KERNEL_COMPILED",
    "BlockSum",
    "Dense",
    "Point",
    "SamplingMask",
    "NormSpec",
    "ProblemSpec",
    "SolveConfig",
    "solve",
    "solve_accelerated",
]

__version__ = "0.1.0"
