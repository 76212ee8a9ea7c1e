"""Privacy parameters, MMD thresholds implied by (eps, delta)-DP, and a discrete
Hockey-Stick divergence used as ground truth in tests."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from seqaudit.errors import UsageError

SQRT2 = math.sqrt(2.0)


class BoundFormula(enum.Enum):
    NEW = "new"
    LEGACY = "legacy"


@dataclass(frozen=True)
class PrivacyParams:
    epsilon: float
    delta: float = 0.0

    def __post_init__(self):
        if not (self.epsilon >= 0):  # also rejects NaN
            raise UsageError(f"epsilon must be >= 0, got {self.epsilon}")
        if not (0.0 <= self.delta < 1.0):
            raise UsageError(f"delta must lie in [0, 1), got {self.delta}")


@dataclass(frozen=True)
class MmdThreshold:
    tau: float
    formula: BoundFormula


def mmd_threshold_new(p: PrivacyParams) -> MmdThreshold:
    """sqrt(2) * (1 - 2(1-delta)/(1+e^eps)).

    Rewritten as sqrt(2) * (tanh(eps/2) + 2 delta / (1+e^eps)), which has no
    cancellation at small eps and no overflow at large eps.
    """
    eps, delta = p.epsilon, p.delta
    if math.isinf(eps):
        return MmdThreshold(SQRT2, BoundFormula.NEW)
    tau = SQRT2 * (math.tanh(eps / 2.0) + 2.0 * delta * float(expit(-eps)))
    return MmdThreshold(tau, BoundFormula.NEW)


def mmd_threshold_legacy(p: PrivacyParams) -> MmdThreshold:
    """e^eps - 1 + (e^-eps + 1) delta; exceeds sqrt(2) (vacuous) once eps > ~0.88."""
    eps, delta = p.epsilon, p.delta
    try:
        grow = math.expm1(eps)
    except OverflowError:
        grow = math.inf
    return MmdThreshold(grow + (math.exp(-eps) + 1.0) * delta, BoundFormula.LEGACY)


def mmd_threshold(p: PrivacyParams, formula: BoundFormula | str = BoundFormula.NEW) -> MmdThreshold:
    formula = BoundFormula(formula)
    if formula is BoundFormula.NEW:
        return mmd_threshold_new(p)
    return mmd_threshold_legacy(p)


def _as_distribution(p, name: str) -> np.ndarray:
    a = np.asarray(p, dtype=float)
    if a.ndim != 1 or a.size == 0:
        raise UsageError(f"{name} must be a non-empty 1-D probability vector")
    if np.any(a < 0) or not np.all(np.isfinite(a)):
        raise UsageError(f"{name} has negative or non-finite mass")
    if abs(a.sum() - 1.0) > 1e-12:
        raise UsageError(f"{name} sums to {a.sum()!r}, not 1")
    return a


def hockey_stick_discrete(P, Q, epsilon: float) -> float:
    """sum_x max(0, P(x) - e^eps Q(x)) over a shared finite support."""
    P = _as_distribution(P, "P")
    Q = _as_distribution(Q, "Q")
    if P.shape != Q.shape:
        raise UsageError(f"support mismatch: {P.size} vs {Q.size} atoms")
    # atoms with Q(x) = 0 contribute P(x) in full, even when e^eps is infinite
    with np.errstate(over="ignore", invalid="ignore"):
        scaled = np.where(Q > 0, np.exp(epsilon) * Q, 0.0)
    return float(np.maximum(P - scaled, 0.0).sum())


def total_variation(P, Q) -> float:
    P = _as_distribution(P, "P")
    Q = _as_distribution(Q, "Q")
    if P.shape != Q.shape:
        raise UsageError(f"support mismatch: {P.size} vs {Q.size} atoms")
    return 0.5 * float(np.abs(P - Q).sum())
