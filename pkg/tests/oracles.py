"""Independent reference implementations used as test oracles.

These deliberately avoid the package's own recursions: the OGA oracle keeps the
iterate as an explicit coefficient vector over every point seen and measures
norms with a full Gram matrix; thresholds are evaluated in 400-digit arithmetic;
the e-process maximum is found by grid scan.
"""

from __future__ import annotations

import itertools
import math

import mpmath
import numpy as np

mpmath.mp.dps = 400


def k_rbf(a, b, h):
    a, b = np.atleast_1d(a).astype(float), np.atleast_1d(b).astype(float)
    return math.exp(-float(np.sum((a - b) ** 2)) / (2.0 * h * h))


class ExplicitOga:
    """f = sum_j alpha_j K(z_j, .) over atoms z_j; the projection uses the full atom Gram matrix."""

    def __init__(self, h):
        self.h = h
        self.atoms = np.empty((0, 0))
        self.alpha = np.empty(0)
        self.M = 0.0

    def _k(self, A, b):
        return np.exp(-np.sum((A - b) ** 2, axis=-1) / (2.0 * self.h * self.h))

    def value(self, x, y) -> float:
        if self.alpha.size == 0:
            return 0.0
        x, y = np.atleast_1d(x).astype(float), np.atleast_1d(y).astype(float)
        return float(self.alpha @ (self._k(self.atoms, x) - self._k(self.atoms, y)))

    def norm_sq(self) -> float:
        if self.alpha.size == 0:
            return 0.0
        A = self.atoms
        G = np.exp(-np.sum((A[:, None, :] - A[None, :, :]) ** 2, axis=-1) / (2.0 * self.h * self.h))
        return float(self.alpha @ G @ self.alpha)

    def step(self, x, y) -> float:
        x, y = np.atleast_1d(x).astype(float), np.atleast_1d(y).astype(float)
        v = self.value(x, y)
        g2 = 2.0 - 2.0 * k_rbf(x, y, self.h)
        self.M += g2
        if g2 > 0:
            eta = 2.0 / math.sqrt(self.M)
            new = np.stack([x, y])
            self.atoms = new if self.alpha.size == 0 else np.concatenate([self.atoms, new])
            self.alpha = np.concatenate([self.alpha, [eta, -eta]])
            nrm = math.sqrt(max(self.norm_sq(), 0.0))
            if nrm > 1.0:
                self.alpha = self.alpha / nrm
        return v


def tau_new_hp(eps, delta) -> float:
    e, d = mpmath.mpf(eps), mpmath.mpf(delta)
    return float(mpmath.sqrt(2) * (1 - 2 * (1 - d) / (1 + mpmath.e**e)))


def tau_legacy_hp(eps, delta) -> float:
    e, d = mpmath.mpf(eps), mpmath.mpf(delta)
    return float(mpmath.e**e - 1 + (mpmath.e ** (-e) + 1) * d)


def hockey_stick_bruteforce(P, Q, eps) -> float:
    """sup over events E of P(E) - e^eps Q(E), by enumerating every subset."""
    best = 0.0
    n = len(P)
    for r in range(n + 1):
        for E in itertools.combinations(range(n), r):
            best = max(best, sum(P[i] for i in E) - math.exp(eps) * sum(Q[i] for i in E))
    return best


def ons_scalar(a, b, L, grads):
    """Plain-float replay of 1-D Online Newton Step; returns the lambda sequence lambda_1..lambda_{T+1}."""
    beta = 0.5 * min(1.0 / (4.0 * L * (b - a)), 1.0)
    A = 1.0 / (beta**2 * (b - a) ** 2)
    lam = 0.0
    out = [lam]
    for g in grads:
        A += g * g
        lam = min(b, max(a, lam - g / (beta * A)))
        out.append(lam)
    return out


def _scan(E, betas):
    vals = np.zeros_like(betas)
    for e in np.asarray(E, dtype=float):  # accumulate over the history to keep memory flat
        with np.errstate(divide="ignore"):
            vals += np.log1p(betas * (e - 1.0))
    return vals


def grid_max_log_wealth(E, step=1e-6, coarse=1e-3):
    """Maximum of sum log(1 + beta (E_i - 1)) over the grid {0, step, 2 step, ..., 1}.

    The objective is concave, so the fine-grid maximiser lies within one coarse
    cell of the coarse-grid maximiser; scanning the fine grid on that window
    returns the same point as scanning all 10^6 + 1 grid values.
    """
    n_fine = int(round(1.0 / step))
    ratio = int(round(coarse / step))
    cb = np.arange(0, n_fine + 1, ratio)
    i = int(np.argmax(_scan(E, cb * step)))
    lo, hi = max(cb[max(i - 1, 0)], 0), min(cb[min(i + 1, cb.size - 1)], n_fine)
    fine = np.arange(lo, hi + 1)
    vals = _scan(E, fine * step)
    j = int(np.argmax(vals))
    return float(fine[j] * step), float(vals[j])
