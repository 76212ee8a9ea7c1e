"""Sequential auditing engines.

Two ways of betting against H0: MMD <= tau(eps, delta):

* ``Strategy.ONS``: wealth K_t = K_{t-1} (1 + lambda_t (v_t - tau)) with the
  bet lambda_t tuned by Online Newton Step on [0, 1/(4 + 2 tau)].
* ``Strategy.EPROCESS``: e-values E_t = (2 + v_t) / (2 + tau) and the e-process
  max_beta log W_t(beta) - log(t+1)/2 - log 2.

In both, v_t = f_t(x_t) - f_t(y_t) comes from the OGA witness, and the test
rejects the first time wealth reaches 1/alpha.  Wealth is kept in log space.
"""

from __future__ import annotations

import csv
import dataclasses
import enum
import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from seqaudit.bounds import BoundFormula, PrivacyParams, mmd_threshold
from seqaudit.errors import UsageError
from seqaudit.kernels import KernelConfig, as_points, median_heuristic
from seqaudit.learners import OgaState, Ons1d, maximize_log_wealth_lanes, regret_penalty

TRACE_COLUMNS = ("t", "v_t", "lambda_or_beta", "log_wealth", "decision")


class Strategy(str, enum.Enum):
    ONS = "ons"
    EPROCESS = "eprocess"


@dataclass(frozen=True)
class TestConfig:
    __test__ = False

    privacy: PrivacyParams
    alpha: float = 0.05
    n_max: int | None = 2000
    pilot_size: int = 20  # pairs drawn for the median heuristic (2x points pooled)
    bandwidth: float | None = None  # None: median heuristic on the pilot
    strategy: Strategy = Strategy.ONS
    bound: BoundFormula = BoundFormula.NEW
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise UsageError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.n_max is not None and self.n_max < 0:
            raise UsageError("n_max must be >= 0 or None")
        if self.bandwidth is None and self.pilot_size < 1:
            raise UsageError("median heuristic needs pilot_size >= 1 pair (2 pooled points)")
        if self.bandwidth is not None:
            KernelConfig(self.bandwidth)
        object.__setattr__(self, "strategy", Strategy(self.strategy))
        object.__setattr__(self, "bound", BoundFormula(self.bound))

    @property
    def tau(self) -> float:
        return mmd_threshold(self.privacy, self.bound).tau

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["strategy"] = self.strategy.value
        d["bound"] = self.bound.value
        return d

    def fingerprint(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


class TraceRow(NamedTuple):
    t: int
    v_t: float
    lambda_or_beta: float
    log_wealth: float
    decision: str


class TestState:
    """Running state of one or more audits advanced in lock-step.

    Each lane has its own threshold, bet and wealth.  With
    ``shared_witness=True`` all lanes observe the same stream and share one
    OGA witness: the witness never depends on tau, and a lane only stops
    updating once it has rejected, so every live lane holds the same f_t.
    """

    __test__ = False

    def __init__(
        self,
        tau,
        alpha: float,
        strategy: Strategy | str,
        bandwidth,
        dim: int,
        lanes: int = 1,
        shared_witness: bool = False,
        record_trace: bool = True,
    ):
        self.tau = np.broadcast_to(np.asarray(tau, dtype=float), (lanes,)).copy()
        if np.any(self.tau < 0):
            raise UsageError("tau must be >= 0")
        self.alpha = alpha
        self.log_threshold = -math.log(alpha)
        self.strategy = Strategy(strategy)
        self.lanes, self.dim = lanes, dim
        self.shared_witness = shared_witness
        self.oga = OgaState(bandwidth, dim, lanes=1 if shared_witness else lanes)
        self.ons = None
        if self.strategy is Strategy.ONS:
            lip = 4.0 + 2.0 * self.tau
            self.ons = Ons1d(0.0, 1.0 / lip, lip, lanes=lanes)
        self._E = np.ones((lanes, 256))
        self._beta = np.zeros(lanes)
        self.t = 0
        self.log_wealth = np.zeros(lanes)
        self.active = np.ones(lanes, dtype=bool)
        self.rejected = np.zeros(lanes, dtype=bool)
        self.stopping_time = np.zeros(lanes, dtype=np.int64)  # 0 = not rejected
        self.record_trace = record_trace
        self._trace: list[tuple[np.ndarray, ...]] = []

    @property
    def evalues(self) -> np.ndarray:
        return self._E[:, : self.t]

    @property
    def wealth(self):
        w = np.exp(self.log_wealth)
        return float(w[0]) if self.lanes == 1 else w

    @property
    def decision(self):
        d = np.where(self.rejected, "reject", "continue")
        return str(d[0]) if self.lanes == 1 else d

    @property
    def lam(self):
        return None if self.ons is None else self.ons.lam

    @property
    def bet(self) -> np.ndarray:
        """Current betting fraction per lane: lambda (ONS) or beta* (e-process)."""
        return self.ons.lam if self.ons is not None else self._beta

    def _points(self, x, width):
        a = np.asarray(x, dtype=float)
        if a.ndim <= 1:
            a = np.broadcast_to(np.atleast_1d(a), (width, self.dim))
        return a

    def step(self, x, y) -> None:
        """Consume one pair (or one pair per lane, shape (lanes, d))."""
        act = self.active
        if not act.any():
            raise UsageError("test has already stopped; its state is frozen")
        width = 1 if self.shared_witness else self.lanes
        xw, yw = self._points(x, width), self._points(y, width)
        v_w = self.oga.predict(xw, yw)
        v = np.broadcast_to(v_w, (self.lanes,))
        self.t += 1
        t = self.t

        if self.strategy is Strategy.ONS:
            bet = self.ons.lam.copy()
            factor = 1.0 + bet * (v - self.tau)
            self.log_wealth = np.where(act, self.log_wealth + np.log(factor), self.log_wealth)
        else:
            if t > self._E.shape[1]:
                self._E = np.concatenate([self._E, np.ones_like(self._E)], axis=1)
            self._E[:, t - 1] = np.where(act, (2.0 + v) / (2.0 + self.tau), 1.0)
            beta, best = maximize_log_wealth_lanes(self._E[act, :t], beta0=self._beta[act])
            self._beta[act] = beta
            self.log_wealth[act] = best - regret_penalty(t)
            bet = self._beta.copy()

        newly = act & (self.log_wealth >= self.log_threshold)
        self.rejected |= newly
        self.stopping_time[newly] = t
        cont = act & ~newly
        if cont.any():
            mask = np.array([True]) if self.shared_witness else cont
            self.oga.update(xw, yw, v_w, active=mask)
            if self.ons is not None:
                self.ons.step(np.where(cont, -(v - self.tau) / factor, 0.0))
        self.active = cont
        if self.record_trace:
            self._trace.append((act.copy(), np.array(v), bet, self.log_wealth.copy(), newly))

    def trace(self, lane: int = 0) -> list[TraceRow]:
        rows = []
        for t, (act, v, bet, logw, newly) in enumerate(self._trace, start=1):
            if act[lane]:
                rows.append(
                    TraceRow(t, float(v[lane]), float(bet[lane]), float(logw[lane]),
                             "reject" if newly[lane] else "continue")
                )
        return rows


def init_test(cfg: TestConfig, pilot_x=None, pilot_y=None, dim: int | None = None) -> TestState:
    """Fresh single-lane state: wealth 1, lambda_1 = 0, f_1 = 0."""
    if cfg.bandwidth is not None:
        kcfg = KernelConfig(cfg.bandwidth)
        if dim is None:
            dim = as_points(pilot_x).shape[1] if pilot_x is not None else 1
    else:
        if pilot_x is None or pilot_y is None:
            raise UsageError("median heuristic requested but no pilot sample given")
        px, py = as_points(pilot_x), as_points(pilot_y)
        kcfg = median_heuristic(np.concatenate([px, py]))
        dim = px.shape[1]
    return TestState(cfg.tau, cfg.alpha, cfg.strategy, kcfg.bandwidth, dim)


# --------------------------------------------------------------------- streams


class IterStream:
    """Adapts an iterable of (x, y) pairs to the ``sample(n)`` stream protocol."""

    def __init__(self, pairs: Iterable):
        self._it = iter(pairs)
        self.dim = None

    def sample(self, n: int):
        xs, ys = [], []
        for _ in range(n):
            try:
                x, y = next(self._it)
            except StopIteration:
                break
            xs.append(np.atleast_1d(np.asarray(x, dtype=float)))
            ys.append(np.atleast_1d(np.asarray(y, dtype=float)))
        if not xs:
            d = self.dim or 1
            return np.empty((0, d)), np.empty((0, d))
        X, Y = np.stack(xs), np.stack(ys)
        self.dim = X.shape[1]
        return X, Y


def as_stream(stream):
    return stream if hasattr(stream, "sample") else IterStream(stream)


class _Feeder:
    """Chunked reader over several streams, tracking exhaustion per stream."""

    def __init__(self, streams, chunk: int = 256):
        self.streams = [as_stream(s) for s in streams]
        self.chunk = chunk
        self.buf = [None] * len(self.streams)
        self.pos = [0] * len(self.streams)
        self.done = [False] * len(self.streams)

    def take(self, i: int, n: int):
        """Up to n pairs from stream i."""
        xs, ys, got = [], [], 0
        while got < n and not self.done[i]:
            if self.buf[i] is None or self.pos[i] >= len(self.buf[i][0]):
                X, Y = self.streams[i].sample(max(self.chunk, n - got))
                if len(X) == 0:
                    self.done[i] = True
                    break
                self.buf[i], self.pos[i] = (as_points(X), as_points(Y)), 0
            X, Y = self.buf[i]
            k = min(n - got, len(X) - self.pos[i])
            xs.append(X[self.pos[i] : self.pos[i] + k])
            ys.append(Y[self.pos[i] : self.pos[i] + k])
            self.pos[i] += k
            got += k
        if not xs:
            return None, None
        return np.concatenate(xs), np.concatenate(ys)


@dataclass
class AuditResult:
    rejected: bool
    stopping_time: int | None
    final_log_wealth: float
    trace: list[TraceRow]
    fingerprint: str
    seed: int
    truncated: bool = False
    pilot_used: int = 0  # pairs consumed before testing
    bandwidth: float = math.nan

    @property
    def final_wealth(self) -> float:
        return math.exp(self.final_log_wealth)


def _pilot_bandwidths(cfg: TestConfig, feeder: _Feeder):
    lanes = len(feeder.streams)
    if cfg.bandwidth is not None:
        return np.full(lanes, float(cfg.bandwidth)), 0, None
    bws, dim = np.ones(lanes), None
    for i in range(lanes):
        X, Y = feeder.take(i, cfg.pilot_size)
        if X is None or len(X) < cfg.pilot_size:
            raise UsageError(f"stream {i} ended during the {cfg.pilot_size}-pair pilot")
        bws[i] = median_heuristic(np.concatenate([X, Y])).bandwidth
        dim = X.shape[1]
    return bws, cfg.pilot_size, dim


def run_audits(cfg: TestConfig, streams: Sequence, record_trace: bool = True) -> list[AuditResult]:
    """Run independent audits, one per stream, advanced together as lanes."""
    feeder = _Feeder(streams)
    lanes = len(feeder.streams)
    bws, pilot_used, dim = _pilot_bandwidths(cfg, feeder)
    truncated = np.zeros(lanes, dtype=bool)
    state = None
    n_max = math.inf if cfg.n_max is None else cfg.n_max
    t = 0
    while t < n_max:
        block = int(min(256, n_max - t))
        chunks = [feeder.take(i, block) for i in range(lanes)]
        if dim is None:
            dim = next((c[0].shape[1] for c in chunks if c[0] is not None), None)
            if dim is None:
                truncated[:] = True
                break
        if state is None:
            state = TestState(cfg.tau, cfg.alpha, cfg.strategy, bws, dim, lanes=lanes, record_trace=record_trace)
        X = np.zeros((lanes, block, dim))
        Y = np.zeros((lanes, block, dim))
        avail = np.zeros(lanes, dtype=np.int64)
        for i, (cx, cy) in enumerate(chunks):
            if cx is not None:
                X[i, : len(cx)], Y[i, : len(cy)] = cx, cy
                avail[i] = len(cx)
        for k in range(block):
            dry = state.active & (avail <= k)
            if dry.any():
                truncated |= dry
                state.active = state.active & ~dry
            if not state.active.any():
                break
            state.step(X[:, k], Y[:, k])
            t += 1
        if state is None or not state.active.any():
            break

    results = []
    fp = cfg.fingerprint()
    for i in range(lanes):
        if state is None:
            results.append(AuditResult(False, None, 0.0, [], fp, cfg.seed, bool(truncated[i]), pilot_used, float(bws[i])))
            continue
        rej = bool(state.rejected[i])
        results.append(
            AuditResult(
                rejected=rej,
                stopping_time=int(state.stopping_time[i]) if rej else None,
                final_log_wealth=float(state.log_wealth[i]),
                trace=state.trace(i) if record_trace else [],
                fingerprint=fp,
                seed=cfg.seed,
                truncated=bool(truncated[i]) and not rej,
                pilot_used=pilot_used,
                bandwidth=float(bws[i]),
            )
        )
    return results


def run_audit(cfg: TestConfig, stream, record_trace: bool = True) -> AuditResult:
    return run_audits(cfg, [stream], record_trace=record_trace)[0]


# ------------------------------------------------------------- epsilon sweep


@dataclass
class EpsilonSweep:
    candidates: np.ndarray
    lower_bound: np.ndarray  # index t: bound after t steps (index 0: before any)
    stopping_times: list[int | None]
    bandwidth: float
    fingerprint: str = ""

    def at(self, t: int) -> float:
        return float(self.lower_bound[min(t, len(self.lower_bound) - 1)])


def epsilon_lower_bound(candidates, delta: float, cfg: TestConfig, stream) -> EpsilonSweep:
    """Test every candidate epsilon on one shared stream.

    After step t the bound is the smallest candidate not yet rejected, or
    ``inf`` once every candidate has been rejected.
    """
    eps = np.asarray(candidates, dtype=float)
    if eps.ndim != 1 or eps.size == 0:
        raise UsageError("candidate list must be non-empty")
    if np.any(np.diff(eps) <= 0):
        raise UsageError("candidates must be strictly ascending")
    taus = np.array([mmd_threshold(PrivacyParams(e, delta), cfg.bound).tau for e in eps])
    feeder = _Feeder([stream])
    bws, _, dim = _pilot_bandwidths(cfg, feeder)
    bound = [float(eps[0])]
    state = None
    n_max = math.inf if cfg.n_max is None else cfg.n_max
    t = 0
    while t < n_max:
        X, Y = feeder.take(0, int(min(256, n_max - t)))
        if X is None:
            break
        if state is None:
            state = TestState(taus, cfg.alpha, cfg.strategy, bws[0], X.shape[1], lanes=eps.size,
                              shared_witness=True, record_trace=False)
        for k in range(len(X)):
            state.step(X[k], Y[k])
            t += 1
            open_ = np.flatnonzero(~state.rejected)
            bound.append(float(eps[open_[0]]) if open_.size else math.inf)
            if not state.active.any():
                break
        if not state.active.any():
            break
    stops = [None] * eps.size if state is None else [int(s) if s else None for s in state.stopping_time]
    return EpsilonSweep(eps, np.array(bound), stops, float(bws[0]), cfg.fingerprint())


# ---------------------------------------------------------------------- export


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence], comment: str | None = None) -> None:
    with open(path, "w", newline="") as fh:
        if comment is not None:
            fh.write(f"# {comment}\n")
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def write_trace_csv(path, rows: Iterable[TraceRow], comment: str | None = None) -> None:
    write_csv(path, TRACE_COLUMNS, rows, comment)


def read_trace_csv(path) -> list[TraceRow]:
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    reader = csv.DictReader(lines)
    return [
        TraceRow(int(r["t"]), float(r["v_t"]), float(r["lambda_or_beta"]), float(r["log_wealth"]), r["decision"])
        for r in reader
    ]
