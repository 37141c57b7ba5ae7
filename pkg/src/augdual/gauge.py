"""Gauges, polar sets, and polar gauges.

A gauge is described by one of three variants:

* NormGauge: a catalog norm viewed as the gauge of its unit ball;
* DiagWeighted: x -> sum w_i |x_i| with strictly positive weights;
* PolyhedralPolar: the polar set is given directly as conv(V + {0}) for a
  finite vertex list V. The gauge itself is then the support function of
  that polytope, and projections onto it run a Wolfe-type min-norm-point
  active-set iteration over the vertices.

The generalized Moreau decomposition v = gauge_prox(v) + polar_project(v)
turns the polar projection into a prox for arbitrary gauges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .linop import Point
from .prox import NormSpec, dual_ball_project, dual_norm_value, norm_value, soft_threshold

DEFAULT_TOL = 1e-10
MAX_MNP_ITER = 10_000


class PolytopeProjectionError(RuntimeError):
    """Raised when the min-norm-point iteration hits its cap before tol.

    Carries the best iterate and the tolerance actually achieved.
    """

    def __init__(self, best: np.ndarray, achieved: float, requested: float):
        super().__init__(
            f"polytope projection reached iteration cap at certificate "
            f"{achieved:.3e} (requested {requested:.3e})"
        )
        self.best = best
        self.achieved = achieved
        self.requested = requested


@dataclass(frozen=True, eq=False)
class NormGauge:
    norm: NormSpec


@dataclass(frozen=True, eq=False)
class DiagWeighted:
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).ravel()
        if w.size == 0 or np.any(w <= 0) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be strictly positive and finite")
        object.__setattr__(self, "weights", w)


@dataclass(frozen=True, eq=False)
class PolyhedralPolar:
    """Polar set C° = conv(vertices + {0}); vertices is a (k, d) array.

    The origin is always adjoined, matching a gauge generated by a closed
    convex set containing the origin.
    """

    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[0] == 0:
            raise ValueError("vertex list must be a nonempty (k, d) array")
        if not np.all(np.isfinite(v)):
            raise ValueError("vertices must be finite")
        object.__setattr__(self, "vertices", v)

    def polytope(self, scale: float = 1.0) -> np.ndarray:
        return np.vstack([scale * self.vertices, np.zeros((1, self.vertices.shape[1]))])


GaugeSpec = Union[NormGauge, DiagWeighted, PolyhedralPolar]


def _check_dim(g, v: Point, dim: int):
    if v.data.size != dim:
        raise ValueError(f"point dimension {v.data.size} does not match gauge ({dim})")


def gauge_eval(g: GaugeSpec, x: Point) -> float:
    """Value of the gauge at x (support function of C° for the polyhedral
    variant)."""
    if isinstance(g, NormGauge):
        return norm_value(g.norm, x)
    if isinstance(g, DiagWeighted):
        _check_dim(g, x, g.weights.size)
        return float(g.weights @ np.abs(x.data))
    _check_dim(g, x, g.vertices.shape[1])
    return max(0.0, float(np.max(g.vertices @ x.data)))


def polar_gauge_eval(g: GaugeSpec, u: Point) -> float:
    """Value of the polar gauge (the gauge of C°); may be +inf when u lies
    outside every dilation of C°."""
    if isinstance(g, NormGauge):
        return dual_norm_value(g.norm, u)
    if isinstance(g, DiagWeighted):
        _check_dim(g, u, g.weights.size)
        if u.data.size == 0:
            return 0.0
        return float(np.max(np.abs(u.data) / g.weights))
    _check_dim(g, u, g.vertices.shape[1])
    return _polyhedral_polar_gauge(g, u.data)


def _polyhedral_polar_gauge(g: PolyhedralPolar, u: np.ndarray) -> float:
    """gamma_{C°}(u) by bisection on the dilation factor with a projection
    based membership test. Monotone because C° contains the origin."""
    unrm = float(np.linalg.norm(u))
    if unrm == 0.0:
        return 0.0
    pts = g.polytope()

    def member(lam: float) -> bool:
        # Distance is measured in the units of u (scaled back by lam), so a
        # large dilation cannot fake membership of a point off cone(V).
        scaled = u / lam
        slack = 1e-9 * (1.0 + unrm)
        shifted = pts - scaled
        # Floor the certificate tolerance at the floating-point noise level
        # of the shifted point set.
        floor = 1e-14 * (1.0 + float(np.max(np.einsum("ij,ij->i", shifted, shifted))))
        x = _min_norm_point(shifted, max(min((slack / lam) ** 2, 1e-12), floor))
        return lam * float(np.linalg.norm(x)) <= slack

    hi = 1.0
    for _ in range(80):
        if member(hi):
            break
        hi *= 2.0
    else:
        return math.inf
    lo = 0.0
    for _ in range(100):
        if hi - lo <= 1e-12 * hi:
            break
        mid = 0.5 * (lo + hi)
        if member(mid):
            hi = mid
        else:
            lo = mid
    return hi


def _affine_minimizer(pts: np.ndarray):
    """Min-norm point over the affine hull of the rows of pts; returns the
    affine coefficients and the point."""
    s = pts.shape[0]
    gram = pts @ pts.T
    system = np.zeros((s + 1, s + 1))
    system[:s, :s] = gram
    system[:s, s] = 1.0
    system[s, :s] = 1.0
    rhs = np.zeros(s + 1)
    rhs[s] = 1.0
    try:
        sol = np.linalg.solve(system, rhs)
        if not np.all(np.isfinite(sol)):
            raise np.linalg.LinAlgError
    except np.linalg.LinAlgError:
        sol = np.linalg.lstsq(system, rhs, rcond=None)[0]
    alpha = sol[:s]
    return alpha, alpha @ pts


def _min_norm_point(points: np.ndarray, tol: float, max_iter: int = MAX_MNP_ITER):
    """Wolfe's algorithm for the minimum-norm point of conv(points).

    Terminates when <x, x - p> <= tol for every point p (the variational
    inequality certificate at z = x).
    """
    norms2 = np.einsum("ij,ij->i", points, points)
    start = int(np.argmin(norms2))
    active = [start]
    coeffs = np.array([1.0])
    x = points[start].copy()
    for _ in range(max_iter):
        dots = points @ x
        candidate = int(np.argmin(dots))
        xx = float(x @ x)
        if xx - float(dots[candidate]) <= tol:
            return x
        if candidate in active:
            # No further progress is possible in floating point.
            return x
        active.append(candidate)
        coeffs = np.append(coeffs, 0.0)
        for _ in range(max_iter):
            alpha, y = _affine_minimizer(points[active])
            if np.all(alpha >= -1e-12):
                coeffs = np.clip(alpha, 0.0, None)
                x = y
                break
            neg = alpha < -1e-12
            with np.errstate(divide="ignore", invalid="ignore"):
                ratios = coeffs[neg] / (coeffs[neg] - alpha[neg])
            theta = float(np.min(ratios))
            coeffs = coeffs + theta * (alpha - coeffs)
            keep = coeffs > 1e-13
            if not np.any(keep):
                keep[int(np.argmax(coeffs))] = True
            active = [a for a, k in zip(active, keep) if k]
            coeffs = coeffs[keep]
            coeffs = coeffs / coeffs.sum()
            x = coeffs @ points[active]
    dots = points @ x
    achieved = float(x @ x - np.min(dots))
    raise PolytopeProjectionError(best=x, achieved=achieved, requested=tol)


def polar_project(
    g: GaugeSpec, v: Point, tol: float = DEFAULT_TOL, scale: float = 1.0
) -> Point:
    """Euclidean projection of v onto scale * C°."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    if isinstance(g, NormGauge):
        return dual_ball_project(g.norm, v, radius=scale)
    if isinstance(g, DiagWeighted):
        _check_dim(g, v, g.weights.size)
        bound = scale * g.weights
        return v.with_data(np.clip(v.data, -bound, bound))
    _check_dim(g, v, g.vertices.shape[1])
    shifted = g.polytope(scale) - v.data
    x = _min_norm_point(shifted, tol)
    return v.with_data(v.data + x)


def gauge_prox(
    g: GaugeSpec, v: Point, scale: float, tol: float = DEFAULT_TOL
) -> Point:
    """prox of scale * gauge at v via the generalized Moreau decomposition:
    v minus the projection onto scale * C°."""
    if scale <= 0:
        raise ValueError("scale must be positive")
    if isinstance(g, DiagWeighted):
        _check_dim(g, v, g.weights.size)
        return v.with_data(soft_threshold(v.data, scale * g.weights))
    z = polar_project(g, v, tol=tol, scale=scale)
    return v - z
