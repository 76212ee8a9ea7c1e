"""Online learners driving the betting tests.

* `Ons1d`: one-dimensional Online Newton Step for the betting fraction.
* `OgaState`: online gradient ascent over the unit ball of the RBF RKHS, kept
  in closed form (kernel expansion coefficients plus the norm recursion), so
  the witness function is never materialised.
* `maximize_log_wealth`: best constant-bet log-wealth for the e-process test.

Every state carries an optional leading "lane" axis so that independent
replications can be advanced together; a lane that is masked out of an update
is left exactly as it was.
"""

from __future__ import annotations

import math

import numpy as np

from seqaudit.errors import UsageError
from seqaudit.kernels import as_point, sq_dist


class Ons1d:
    """Online Newton Step on an interval [a, b] with lambda_1 = 0."""

    def __init__(self, a, b, lipschitz, lanes: int | None = None):
        a, b, L = (np.asarray(v, dtype=float) for v in (a, b, lipschitz))
        if not np.all(a < b):
            raise UsageError(f"need a < b, got [{a}, {b}]")
        if not np.all((a <= 0.0) & (0.0 <= b)):
            raise UsageError("0 must lie in [a, b] so that lambda_1 = 0 is feasible")
        if not np.all(L > 0):
            raise UsageError("Lipschitz constant must be > 0")
        self.a, self.b, self.lipschitz = a, b, L
        self.beta = 0.5 * np.minimum(1.0 / (4.0 * L * (b - a)), 1.0)
        self.A0 = 1.0 / (self.beta**2 * (b - a) ** 2)
        shape = np.broadcast_shapes(a.shape, b.shape, L.shape, () if lanes is None else (lanes,))
        self.lam = np.zeros(shape)
        self.A = np.broadcast_to(self.A0, shape).astype(float)
        self.t = 0

    def step(self, g) -> None:
        """Feed the gradient of the realised loss at the current lambda.

        Lanes with g == 0 are unchanged, which is how masked lanes are frozen.
        """
        g = np.asarray(g, dtype=float)
        if not np.all(np.isfinite(g)):
            raise UsageError("ONS gradient must be finite")
        self.A = self.A + g * g
        self.lam = np.clip(self.lam - g / (self.beta * self.A), self.a, self.b)
        self.t += 1


def ons_init(a: float, b: float, lipschitz: float) -> Ons1d:
    return Ons1d(a, b, lipschitz)


class OgaState:
    """Closed-form OGA iterate f_t = sum_i c_i (K(x_i,.) - K(y_i,.)) on the unit ball.

    The step size is 2 / sqrt(M_t) with M_t the running sum of squared
    gradient norms |K(x_i,.) - K(y_i,.)|^2 = 2 (1 - K(x_i, y_i)).  The
    projection factor gamma_t needs |f_t + step|^2, obtained from the running
    |f_t|^2 via |f_t|^2 + 4 v_t / sqrt(M_t) + 4 (M_t - M_{t-1}) / M_t.
    """

    def __init__(self, bandwidth, dim: int, lanes: int = 1, capacity: int = 256):
        h = np.broadcast_to(np.asarray(bandwidth, dtype=float), (lanes,)).copy()
        if not np.all((h > 0) & np.isfinite(h)):
            raise UsageError("bandwidth must be finite and > 0")
        self.bandwidth = h
        self.lanes, self.dim = lanes, dim
        self.t = 0
        self._X = np.empty((lanes, capacity, dim))
        self._Y = np.empty((lanes, capacity, dim))
        self._coef = np.zeros((lanes, capacity))
        self.M = np.zeros(lanes)
        self.norm_sq = np.zeros(lanes)  # |f_t|^2
        # per-step history, one (lanes,) array per step
        self.M_hist: list[np.ndarray] = []
        self.gamma_hist: list[np.ndarray] = []
        self.v_hist: list[np.ndarray] = []
        self.pre_norm_sq_hist: list[np.ndarray] = []
        self.moved_hist: list[np.ndarray] = []

    def _coerce(self, x) -> tuple[np.ndarray, bool]:
        a = np.asarray(x, dtype=float)
        single = a.ndim <= 1
        if single:
            a = np.broadcast_to(as_point(a), (self.lanes, a.size if a.ndim else 1))
        if a.shape != (self.lanes, self.dim):
            raise UsageError(f"expected points of shape ({self.lanes}, {self.dim}), got {a.shape}")
        return a, single

    def _grow(self):
        cap = self._coef.shape[1]
        if self.t < cap:
            return
        new = 2 * cap
        self._X = np.concatenate([self._X, np.empty((self.lanes, new - cap, self.dim))], axis=1)
        self._Y = np.concatenate([self._Y, np.empty((self.lanes, new - cap, self.dim))], axis=1)
        self._coef = np.concatenate([self._coef, np.zeros((self.lanes, new - cap))], axis=1)

    @property
    def coefficients(self) -> np.ndarray:
        return self._coef[:, : self.t]

    @property
    def points(self) -> tuple[np.ndarray, np.ndarray]:
        return self._X[:, : self.t], self._Y[:, : self.t]

    def predict(self, x, y):
        """v_t = <f_t, K(x,.) - K(y,.)>, one value per lane (0 while f_t = 0)."""
        x, single = self._coerce(x)
        y, _ = self._coerce(y)
        if self.t == 0:
            v = np.zeros(self.lanes)
        else:
            v = self._inner(self._coef[:, : self.t], x, y)
        return float(v[0]) if single and self.lanes == 1 else v

    def _inner(self, coef, x, y):
        X, Y = self.points
        inv = (-0.5 / np.square(self.bandwidth))[:, None]
        xb, yb = x[:, None, :], y[:, None, :]
        block = np.exp(sq_dist(X, xb) * inv)
        block -= np.exp(sq_dist(X, yb) * inv)
        block -= np.exp(sq_dist(Y, xb) * inv)
        block += np.exp(sq_dist(Y, yb) * inv)
        return np.einsum("rt,rt->r", coef, block)

    def update(self, x, y, v=None, active=None) -> None:
        """Take the OGA step for the linear gain <f, K(x,.) - K(y,.)>.

        `v` must be the value returned by `predict(x, y)` at this step; it is
        recomputed when omitted.  Lanes where `active` is False do not move.
        """
        x, _ = self._coerce(x)
        y, _ = self._coerce(y)
        if v is None:
            v = self.predict(x, y)
        v = np.broadcast_to(np.asarray(v, dtype=float), (self.lanes,))
        # |K(x,.) - K(y,.)|^2 = K(x,x) - 2K(x,y) + K(y,y) = 2(1 - K(x,y)) for RBF
        g2 = -2.0 * np.expm1(-sq_dist(x, y) / (2.0 * np.square(self.bandwidth)))
        if active is not None:
            g2 = np.where(active, g2, 0.0)
        moving = g2 > 0
        M_new = self.M + g2
        root = np.sqrt(np.where(moving, M_new, 1.0))
        step = np.where(moving, 2.0 / root, 0.0)
        pre = self.norm_sq + np.where(moving, 4.0 * v / root + 4.0 * g2 / np.where(moving, M_new, 1.0), 0.0)
        pre = np.maximum(pre, 0.0)
        gamma = np.where(moving & (pre > 1.0), 1.0 / np.sqrt(np.where(pre > 0, pre, 1.0)), 1.0)

        self._grow()
        t = self.t
        if np.any(gamma < 1.0):
            self._coef[:, :t] *= gamma[:, None]
        self._coef[:, t] = gamma * step
        self._X[:, t] = x
        self._Y[:, t] = y
        self.norm_sq = np.where(moving, gamma**2 * pre, self.norm_sq)
        self.M = M_new
        self.t = t + 1
        self.M_hist.append(M_new)
        self.gamma_hist.append(gamma)
        self.v_hist.append(v.copy())
        self.pre_norm_sq_hist.append(np.where(moving, pre, self.norm_sq))
        self.moved_hist.append(moving)

    def predict_unrolled(self, x, y):
        """v_t from the stored histories: 2 sum_i block_i / sqrt(M_i) prod_{j=i}^{t-1} gamma_j.

        Slower than `predict`; kept as an independent route over the same state.
        """
        x, single = self._coerce(x)
        y, _ = self._coerce(y)
        if self.t == 0:
            v = np.zeros(self.lanes)
        else:
            M = np.stack(self.M_hist, axis=1)
            gam = np.stack(self.gamma_hist, axis=1)
            moved = np.stack(self.moved_hist, axis=1)
            tail = np.cumprod(gam[:, ::-1], axis=1)[:, ::-1]  # prod_{j=i}^{t-1}
            coef = np.where(moved, 2.0 / np.sqrt(np.where(M > 0, M, 1.0)), 0.0) * tail
            v = self._inner(coef, x, y)
        return float(v[0]) if single and self.lanes == 1 else v


def oga_init(bandwidth, dim: int, lanes: int = 1) -> OgaState:
    return OgaState(bandwidth, dim, lanes)


def _check_evalues(h) -> np.ndarray:
    e = np.asarray(h, dtype=float)
    if e.ndim not in (1, 2) or e.shape[-1] == 0:
        raise UsageError("e-value history must be a non-empty 1-D (or lanes x t) array")
    if np.any(e < 0) or not np.all(np.isfinite(e)):
        raise UsageError("e-values must be finite and >= 0")
    return e


def log_wealth_at_beta(h, beta: float) -> float:
    """sum_i log(1 + beta (E_i - 1)); -inf when beta = 1 meets a zero e-value."""
    if not 0.0 <= beta <= 1.0:
        raise UsageError(f"beta must lie in [0, 1], got {beta}")
    e = np.asarray(h, dtype=float)
    if np.any(e < 0):
        raise UsageError("e-values must be >= 0")
    with np.errstate(divide="ignore"):
        return float(np.sum(np.log1p(beta * (e - 1.0))))


def maximize_log_wealth_lanes(E: np.ndarray, beta0=None, tol: float = 1e-13, max_iter: int = 200):
    """Per-row maximiser of the concave map beta -> sum_i log(1 + beta (E_i - 1)) on [0, 1].

    Safeguarded Newton on the derivative, warm-started at `beta0`; rows whose
    optimum sits on the boundary return exactly 0 or 1.
    """
    E = np.atleast_2d(np.asarray(E, dtype=float))
    z = E - 1.0
    lanes = E.shape[0]
    d0 = z.sum(axis=1)
    has_zero = np.any(E == 0.0, axis=1)
    with np.errstate(divide="ignore", over="ignore"):
        d1 = np.where(has_zero, -np.inf, np.sum(z / np.where(E > 0, E, 1.0), axis=1))

    beta = np.zeros(lanes)
    beta[(d0 > 0) & (d1 >= 0)] = 1.0
    inner = (d0 > 0) & (d1 < 0)
    if np.any(inner):
        zi = z[inner]
        lo = np.zeros(zi.shape[0])
        hi = np.ones(zi.shape[0])
        b = np.full(zi.shape[0], 0.5) if beta0 is None else np.clip(np.broadcast_to(beta0, (lanes,))[inner], 0.0, 1.0)
        b = np.where((b <= 0) | (b >= 1), 0.5, b)
        todo = np.ones(zi.shape[0], dtype=bool)
        for _ in range(max_iter):
            q = 1.0 + b[todo, None] * zi[todo]
            r = zi[todo] / q
            d = r.sum(axis=1)
            dd = -(r * r).sum(axis=1)
            lo_t, hi_t, b_t = lo[todo], hi[todo], b[todo]
            lo_t = np.where(d > 0, b_t, lo_t)
            hi_t = np.where(d > 0, hi_t, b_t)
            with np.errstate(divide="ignore", invalid="ignore"):
                nb = b_t - d / dd
            nb = np.where((nb >= lo_t) & (nb <= hi_t), nb, 0.5 * (lo_t + hi_t))
            nb = np.where(d == 0, b_t, nb)  # exact root: keep it
            done = (np.abs(nb - b_t) < tol) | (hi_t - lo_t < tol)
            lo[todo], hi[todo], b[todo] = lo_t, hi_t, nb
            idx = np.flatnonzero(todo)
            todo[idx[done]] = False
            if not todo.any():
                break
        beta[inner] = b
    with np.errstate(divide="ignore"):
        value = np.sum(np.log1p(beta[:, None] * z), axis=1)
    return beta, value


def maximize_log_wealth(h) -> tuple[float, float]:
    e = _check_evalues(h)
    if e.ndim != 1:
        raise UsageError("use maximize_log_wealth_lanes for batched histories")
    beta, value = maximize_log_wealth_lanes(e[None, :])
    return float(beta[0]), float(value[0])


def regret_penalty(t: int) -> float:
    """Universal-portfolio regret against the best constant bet after t rounds."""
    return 0.5 * math.log(t + 1) + math.log(2.0)
