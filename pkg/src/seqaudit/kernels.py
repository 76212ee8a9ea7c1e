"""RBF kernel, median-heuristic bandwidth and the cross-kernel terms used by OGA."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist

from seqaudit.errors import UsageError


class BandwidthSource(enum.Enum):
    FIXED = "fixed"
    MEDIAN_HEURISTIC = "median_heuristic"


@dataclass(frozen=True)
class KernelConfig:
    bandwidth: float
    source: BandwidthSource = BandwidthSource.FIXED
    pilot_size: int = 0  # pooled points consumed by the median heuristic

    def __post_init__(self):
        if not (np.isfinite(self.bandwidth) and self.bandwidth > 0):
            raise UsageError(f"bandwidth must be finite and > 0, got {self.bandwidth}")


def as_point(x) -> np.ndarray:
    p = np.atleast_1d(np.asarray(x, dtype=float))
    if p.ndim != 1:
        raise UsageError(f"a point must be a 1-D vector, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise UsageError("point has non-finite coordinates")
    return p


def as_points(xs) -> np.ndarray:
    """Coerce a batch of points (or scalars) to a finite (n, d) array."""
    a = np.asarray(xs, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
    if a.ndim != 2:
        raise UsageError(f"expected an (n, d) array of points, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise UsageError("points have non-finite coordinates")
    return a


def sq_dist(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Squared Euclidean distance over the trailing axis, broadcasting the rest."""
    diff = a - b
    if diff.shape[-1] == 1:
        return np.square(diff[..., 0])
    return np.einsum("...k,...k->...", diff, diff)


def rbf(a: np.ndarray, b: np.ndarray, bandwidth) -> np.ndarray:
    """exp(-|a-b|^2 / (2 h^2)); `bandwidth` broadcasts against the leading axes."""
    return np.exp(-sq_dist(a, b) / (2.0 * np.square(bandwidth)))


def rbf_eval(x, y, cfg: KernelConfig) -> float:
    x, y = as_point(x), as_point(y)
    if x.shape != y.shape:
        raise UsageError(f"dimension mismatch: {x.shape[0]} vs {y.shape[0]}")
    return float(rbf(x, y, cfg.bandwidth))


def cross_kernel_block(xi, yi, xt, yt, cfg: KernelConfig) -> float:
    """K(xi,xt) - K(xi,yt) - K(yi,xt) + K(yi,yt), i.e. <K(xi,.)-K(yi,.), K(xt,.)-K(yt,.)>."""
    pts = [as_point(p) for p in (xi, yi, xt, yt)]
    if len({p.shape for p in pts}) != 1:
        raise UsageError("all four points must share a dimension")
    xi, yi, xt, yt = pts
    h = cfg.bandwidth
    return float(rbf(xi, xt, h) - rbf(xi, yt, h) - rbf(yi, xt, h) + rbf(yi, yt, h))


def gram(points, cfg: KernelConfig) -> np.ndarray:
    p = as_points(points)
    return rbf(p[:, None, :], p[None, :, :], cfg.bandwidth)


def median_heuristic(pilot) -> KernelConfig:
    """Bandwidth = median pairwise Euclidean distance of the pooled pilot sample.

    A zero median (e.g. a constant mechanism) falls back to bandwidth 1.
    """
    p = as_points(pilot)
    if p.shape[0] < 2:
        raise UsageError("median heuristic needs at least 2 pilot points")
    med = float(np.median(pdist(p)))
    bandwidth = med if med > 0 else 1.0
    return KernelConfig(bandwidth, BandwidthSource.MEDIAN_HEURISTIC, p.shape[0])
