"""Metric-space primitives on finite point clouds.

Compact subsets of the state space are represented as finite point clouds
carrying a weighted Euclidean metric.  The weights are quadrature weights,
so the same code path serves plain ODE state spaces (all-ones weights) and
discretised function spaces whose natural norm is a quadrature rule plus
boundary point masses.

All operations are pure functions on immutable values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation

__all__ = [
    "MetricDescriptor",
    "SetCloud",
    "cloud",
    "semidist",
    "hausdorff",
    "in_eps_neighborhood",
    "prune",
]

_CHUNK = 256  # row block size for pairwise distance computations


@dataclass(frozen=True)
class MetricDescriptor:
    """Weighted Euclidean metric on R^dimension.

    ``weights`` holds one nonnegative quadrature weight per coordinate; the
    induced distance is ``sqrt(sum_i w_i (x_i - y_i)^2)``.
    """

    dimension: int
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if self.dimension <= 0:
            raise ContractViolation("dimension must be positive")
        if w.shape != (self.dimension,):
            raise ContractViolation(
                f"weights shape {w.shape} does not match dimension {self.dimension}"
            )
        if np.any(w < 0) or not np.any(w > 0):
            raise ContractViolation("weights must be nonnegative with at least one positive")
        w = w.copy()
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @classmethod
    def euclidean(cls, dimension: int) -> "MetricDescriptor":
        return cls(dimension, np.ones(dimension))

    def scale(self) -> np.ndarray:
        """Per-coordinate factor turning weighted distance into plain Euclidean."""
        return np.sqrt(self.weights)

    def norm(self, x: np.ndarray) -> float:
        x = np.asarray(x, dtype=float)
        return float(np.sqrt(np.sum(self.weights * x * x, axis=-1)))

    def distance(self, x: np.ndarray, y: np.ndarray) -> float:
        return self.norm(np.asarray(x, dtype=float) - np.asarray(y, dtype=float))


@dataclass(frozen=True)
class SetCloud:
    """Nonempty finite point set with its metric descriptor."""

    points: np.ndarray
    metric: MetricDescriptor

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        if pts.size == 0:
            raise ContractViolation("a set cloud must be nonempty")
        if pts.ndim != 2 or pts.shape[1] != self.metric.dimension:
            raise ContractViolation(
                f"points shape {pts.shape} incompatible with dimension {self.metric.dimension}"
            )
        if not np.all(np.isfinite(pts)):
            raise ContractViolation("cloud points must be finite")
        pts = pts.copy()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.shape[0]

    def diameter(self) -> float:
        scaled = self.points * self.metric.scale()
        best = 0.0
        for i in range(0, len(self), _CHUNK):
            block = scaled[i : i + _CHUNK]
            d2 = np.sum((block[:, None, :] - scaled[None, :, :]) ** 2, axis=2)
            best = max(best, float(d2.max()))
        return float(np.sqrt(best))


def cloud(points, metric: MetricDescriptor | None = None) -> SetCloud:
    """Build a cloud from an array-like of points; defaults to unit weights."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[0] == 1 and pts.shape[1] > 1 and metric is None:
        # a bare 1-D list is a list of scalar states, not one long vector
        pts = pts.reshape(-1, 1)
    if metric is None:
        metric = MetricDescriptor.euclidean(pts.shape[1])
    return SetCloud(pts, metric)


def _require_same_metric(a: SetCloud, b: SetCloud) -> None:
    if a.metric.dimension != b.metric.dimension or not np.array_equal(
        a.metric.weights, b.metric.weights
    ):
        raise ContractViolation("clouds do not share a metric descriptor")


def _directed(scaled_a: np.ndarray, scaled_b: np.ndarray) -> float:
    """sup over rows of A of the min distance to B, on pre-scaled coordinates."""
    worst = 0.0
    for i in range(0, scaled_a.shape[0], _CHUNK):
        block = scaled_a[i : i + _CHUNK]
        d2 = np.sum((block[:, None, :] - scaled_b[None, :, :]) ** 2, axis=2)
        worst = max(worst, float(d2.min(axis=1).max()))
    return float(np.sqrt(worst))


def semidist(a: SetCloud, b: SetCloud) -> float:
    """One-sided set distance: sup over a in A of the distance from a to B."""
    _require_same_metric(a, b)
    s = a.metric.scale()
    return _directed(a.points * s, b.points * s)


def hausdorff(a: SetCloud, b: SetCloud) -> float:
    """Symmetric set distance: max of the two semidistances."""
    _require_same_metric(a, b)
    s = a.metric.scale()
    sa, sb = a.points * s, b.points * s
    return max(_directed(sa, sb), _directed(sb, sa))


def point_dist(x, a: SetCloud) -> float:
    """Distance from a single state to a cloud."""
    x = np.asarray(x, dtype=float).reshape(1, -1)
    return semidist(SetCloud(x, a.metric), a)


def in_eps_neighborhood(a: SetCloud, x, eps: float) -> bool:
    """True iff d(x, A) < eps (strict inequality)."""
    if not eps > 0:
        raise ContractViolation("eps must be positive")
    return point_dist(x, a) < eps


def prune(a: SetCloud, tol: float) -> SetCloud:
    """Thin a cloud to an eps-net by greedy farthest-point retention.

    The result is a subset of ``a`` whose one-sided distance from ``a`` is
    at most ``tol``.  Selection starts at index 0 and repeatedly keeps the
    point farthest from the retained set, breaking ties at the lowest
    index, so the output is deterministic.
    """
    if not tol > 0:
        raise ContractViolation("tol must be positive")
    pts = a.points
    n = pts.shape[0]
    if n == 1:
        return a
    scaled = pts * a.metric.scale()
    kept = [0]
    min_d2 = np.sum((scaled - scaled[0]) ** 2, axis=1)
    tol2 = tol * tol
    while True:
        far = int(np.argmax(min_d2))
        if min_d2[far] <= tol2:
            break
        kept.append(far)
        d2 = np.sum((scaled - scaled[far]) ** 2, axis=1)
        np.minimum(min_d2, d2, out=min_d2)
    kept.sort()
    return SetCloud(pts[kept], a.metric)
