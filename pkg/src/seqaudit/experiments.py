"""Experiment harness: mean-mechanism tables, the sequential-vs-batch grid,
synthetic two-sample studies and canary epsilon-lower-bound sweeps.

Every experiment is described by an `ExperimentConfig`.  Replication ``r`` of
a cell draws its samples from ``make_rng(seed, stream_id)`` where the stream id
is a stable checksum of the cell label and ``r``, so results do not depend on
the order in which cells are run or on the number of workers.

Outputs are CSV files whose first line is ``# {json header}`` carrying the
config fingerprint.  Tables can be re-derived from their per-replication trace
files with `fold_traces`.
"""

from __future__ import annotations

import concurrent.futures
import csv
import dataclasses
import enum
import hashlib
import json
import math
import os
import zlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from seqaudit.bounds import BoundFormula, PrivacyParams, mmd_threshold
from seqaudit.errors import UsageError
from seqaudit.kernels import as_points, median_heuristic, rbf
from seqaudit.mechanisms import (
    CanaryStream,
    GaussianShiftStream,
    MechanismKind,
    MechanismPairStream,
    MechanismSpec,
    PerturbedUniformStream,
    StreamSpec,
    UniformCubeStream,
    gaussian_sigma_for,
    make_rng,
    shift_vector,
)
from seqaudit.sequential import (
    AuditResult,
    EpsilonSweep,
    Strategy,
    TestConfig,
    epsilon_lower_bound,
    read_trace_csv,
    run_audits,
    write_csv,
    write_trace_csv,
)

SUMMARY_COLUMNS = ("mechanism", "epsilon", "strategy", "rejection_rate", "rate_stderr", "mean_stop", "stop_stderr", "runs")
DECOUPLE_COLUMNS = ("variant", "mechanism", "rejection_rate", "rate_stderr", "runs")
SYNTHETIC_COLUMNS = ("family", "dim", "param", "rejection_rate", "rate_stderr", "mean_stop", "stop_stderr", "runs")
SWEEP_COLUMNS = ("t", "epsilon_lb")

DEFAULT_CANDIDATES = (0.01, 0.05) + tuple(round(0.1 + 0.05 * i, 2) for i in range(19)) + (1.25, 1.5, 2.0, 2.5, 3.0)


class ExperimentKind(str, enum.Enum):
    AUDIT = "audit"
    TABLE1 = "table1"
    TABLE2 = "table2"
    DECOUPLE = "decouple"
    SYNTHETIC = "synthetic"
    DPSGD = "dpsgd"
    SWEEP_EPSILON = "sweep-epsilon"


@dataclass(frozen=True)
class ExperimentConfig:
    kind: ExperimentKind = ExperimentKind.TABLE1
    repetitions: int = 20
    seed: int = 0
    out: str | None = None
    # shared test settings
    epsilons: tuple = (0.01, 0.1)
    delta: float = 1e-5
    alpha: float = 0.05
    n_max: tuple = (2000, 5000)  # one entry per epsilon, or a single entry for all
    pilot_size: int = 20
    strategy: Strategy = Strategy.ONS
    mechanisms: tuple = tuple(k.value for k in MechanismKind)
    # fixed-batch comparator
    batch_size: int = 2000
    bootstrap: int = 1000
    # synthetic studies
    dims: tuple = (1, 2, 3, 4, 5)
    mu_norms: tuple = (0.0, 0.25, 0.5, 0.75, 1.0)
    uniform_repetitions: int = 100
    uniform_dim: int = 2
    amplitude: float = 1.0
    # canary sweeps
    candidates: tuple = DEFAULT_CANDIDATES
    canary_epsilon: float = 0.01
    nonprivate_sigma: float = 0.1
    # single audits / sweeps on an arbitrary stream
    stream: dict | None = None

    def __post_init__(self):
        set_ = lambda k, v: object.__setattr__(self, k, v)  # noqa: E731
        set_("kind", ExperimentKind(self.kind))
        set_("strategy", Strategy(self.strategy))
        for name in ("epsilons", "n_max", "mechanisms", "dims", "mu_norms", "candidates"):
            val = getattr(self, name)
            set_(name, tuple(val) if isinstance(val, (list, tuple)) else (val,))
        if self.repetitions < 1 or self.uniform_repetitions < 1:
            raise UsageError("repetitions must be >= 1")
        if len(self.n_max) not in (1, len(self.epsilons)):
            raise UsageError("n_max needs one entry, or one per epsilon")
        if any(n < 0 for n in self.n_max):
            raise UsageError("n_max entries must be >= 0")
        for m in self.mechanisms:
            MechanismKind(m)
        if self.batch_size < 4:
            raise UsageError("batch_size must be >= 4")
        if self.bootstrap < 1:
            raise UsageError("bootstrap must be >= 1")
        PrivacyParams(0.0, self.delta)
        if not 0.0 < self.alpha < 1.0:
            raise UsageError("alpha must lie in (0, 1)")

    def n_max_for(self, i: int) -> int:
        return int(self.n_max[0] if len(self.n_max) == 1 else self.n_max[i])

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["kind"] = self.kind.value
        d["strategy"] = self.strategy.value
        for k, v in d.items():
            if isinstance(v, tuple):
                d[k] = list(v)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**d)
        except (TypeError, ValueError) as exc:
            raise UsageError(f"invalid config: {exc}") from None

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise UsageError(f"{path}: not valid JSON ({exc})") from None
        if not isinstance(data, dict):
            raise UsageError(f"{path}: config must be a JSON object")
        return cls.from_dict(data)

    def fingerprint(self) -> str:
        d = self.to_dict()
        d.pop("out")
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()[:16]

    def test_config(self, epsilon: float, n_max: int, **overrides) -> TestConfig:
        kw = dict(privacy=PrivacyParams(epsilon, self.delta), alpha=self.alpha, n_max=n_max,
                  pilot_size=self.pilot_size, strategy=self.strategy, seed=self.seed)
        kw.update(overrides)
        return TestConfig(**kw)


@dataclass(frozen=True)
class SummaryRow:
    mechanism: str
    epsilon: float
    strategy: str
    rejection_rate: float
    rate_stderr: float
    mean_stop: float | None  # over rejecting runs only
    stop_stderr: float | None
    runs: int

    def as_tuple(self) -> tuple:
        opt = lambda x: "" if x is None else x  # noqa: E731
        return (self.mechanism, self.epsilon, self.strategy, self.rejection_rate, self.rate_stderr,
                opt(self.mean_stop), opt(self.stop_stderr), self.runs)


# ----------------------------------------------------------------- helpers


def stream_id(*labels) -> int:
    """Stable 32-bit id for a replication, independent of run order."""
    return zlib.crc32("|".join(str(x) for x in labels).encode())


def rate_and_stops(rejected: Sequence[bool], stops: Sequence[int | None]):
    """Rejection rate with binomial stderr; mean stopping time over rejecting runs with stderr."""
    n = len(rejected)
    if n == 0:
        raise UsageError("no runs to summarise")
    p = float(np.mean(rejected))
    rate_se = math.sqrt(p * (1.0 - p) / n)
    s = np.array([t for r, t in zip(rejected, stops) if r], dtype=float)
    if s.size == 0:
        return p, rate_se, None, None
    se = float(s.std(ddof=1) / math.sqrt(s.size)) if s.size > 1 else 0.0
    return p, rate_se, float(s.mean()), se


def worker_count() -> int:
    raw = os.environ.get("SEQAUDIT_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"SEQAUDIT_THREADS must be an integer >= 1, got {raw!r}") from None
    if n < 1:
        raise UsageError(f"SEQAUDIT_THREADS must be an integer >= 1, got {raw!r}")
    return n


def _fan_out(fn: Callable, tasks: list) -> list:
    """Ordered map, across processes when SEQAUDIT_THREADS > 1."""
    workers = min(worker_count(), len(tasks))
    if workers <= 1:
        return [fn(t) for t in tasks]
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


def _header(cfg: ExperimentConfig, **extra) -> str:
    return json.dumps({"config": cfg.fingerprint(), **extra}, sort_keys=True)


def _out_dir(cfg: ExperimentConfig) -> Path | None:
    if cfg.out is None:
        return None
    out = Path(cfg.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc.strerror}") from exc
    return out


# -------------------------------------------------------- mean mechanisms


def _mechanism_cell(task):
    cfg, kind, i = task
    eps = cfg.epsilons[i]
    tcfg = cfg.test_config(eps, cfg.n_max_for(i))
    spec = MechanismSpec(kind, eps, cfg.delta)
    streams = [MechanismPairStream(spec, seed=cfg.seed, stream_id=stream_id(kind, eps, r))
               for r in range(cfg.repetitions)]
    return run_audits(tcfg, streams, record_trace=cfg.out is not None)


def replicate_mean_mechanism_table(cfg: ExperimentConfig) -> list[SummaryRow]:
    """Rejection rate and stopping time of every mechanism x epsilon cell."""
    cells = [(kind, i) for kind in cfg.mechanisms for i in range(len(cfg.epsilons))]
    results = _fan_out(_mechanism_cell, [(cfg, k, i) for k, i in cells])
    rows = []
    out = _out_dir(cfg)
    if out is not None:
        (out / "traces").mkdir(exist_ok=True)
    for (kind, i), res in zip(cells, results):
        eps = cfg.epsilons[i]
        rate, rate_se, mean, mean_se = rate_and_stops([r.rejected for r in res], [r.stopping_time for r in res])
        rows.append(SummaryRow(kind, eps, cfg.strategy.value, rate, rate_se, mean, mean_se, len(res)))
        if out is not None:
            for r, a in enumerate(res):
                meta = dict(mechanism=kind, epsilon=eps, strategy=cfg.strategy.value, rep=r, truncated=a.truncated)
                write_trace_csv(out / "traces" / f"{kind}_eps{eps}_rep{r}.csv", a.trace, _header(cfg, **meta))
    if out is not None:
        write_summary_csv(out / "summary.csv", rows, _header(cfg))
    return rows


def write_summary_csv(path, rows: Sequence[SummaryRow], comment: str | None = None) -> None:
    write_csv(path, SUMMARY_COLUMNS, [r.as_tuple() for r in rows], comment)


def read_summary_csv(path) -> list[SummaryRow]:
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    opt = lambda s: None if s == "" else float(s)  # noqa: E731
    return [
        SummaryRow(r["mechanism"], float(r["epsilon"]), r["strategy"], float(r["rejection_rate"]),
                   float(r["rate_stderr"]), opt(r["mean_stop"]), opt(r["stop_stderr"]), int(r["runs"]))
        for r in csv.DictReader(lines)
    ]


def _trace_meta(path) -> dict:
    with open(path) as fh:
        first = fh.readline()
    if not first.startswith("# "):
        raise UsageError(f"{path}: trace file has no header comment")
    return json.loads(first[2:])


def fold_traces(paths: Sequence) -> list[SummaryRow]:
    """Rebuild summary rows from per-replication trace files (a pure fold)."""
    groups: dict[tuple, list] = {}
    for p in sorted(paths, key=lambda p: (str(Path(p).parent), _trace_meta(p).get("rep", 0), str(p))):
        meta = _trace_meta(p)
        rows = read_trace_csv(p)
        rejected = bool(rows) and rows[-1].decision == "reject"
        key = (meta["mechanism"], float(meta["epsilon"]), meta["strategy"])
        groups.setdefault(key, []).append((rejected, rows[-1].t if rejected else None))
    out = []
    for (mech, eps, strat), runs in groups.items():
        rate, rate_se, mean, mean_se = rate_and_stops([r for r, _ in runs], [t for _, t in runs])
        out.append(SummaryRow(mech, eps, strat, rate, rate_se, mean, mean_se, len(runs)))
    return out


# ------------------------------------------------------ fixed-batch tester


class BatchBandwidth(str, enum.Enum):
    MEDIAN_HEURISTIC = "median_heuristic"
    FIXED_ONE = "fixed_one"


@dataclass(frozen=True)
class BatchResult:
    reject: bool
    estimate: float  # unbiased MMD^2
    lower: float  # bootstrap lower confidence bound for MMD^2
    tau: float
    bandwidth: float


def mmd2_kernel_matrix(X, Y, bandwidth: float) -> np.ndarray:
    """H_ij = k(x_i,x_j) + k(y_i,y_j) - k(x_i,y_j) - k(x_j,y_i), zero diagonal."""
    X, Y = as_points(X), as_points(Y)
    Kxx = rbf(X[:, None], X[None], bandwidth)
    Kyy = rbf(Y[:, None], Y[None], bandwidth)
    Kxy = rbf(X[:, None], Y[None], bandwidth)
    H = Kxx + Kyy - Kxy - Kxy.T
    np.fill_diagonal(H, 0.0)
    return H


def batch_mmd_test(
    X,
    Y,
    p: PrivacyParams,
    alpha: float = 0.05,
    bound: BoundFormula | str = BoundFormula.LEGACY,
    bandwidth: BatchBandwidth | str = BatchBandwidth.FIXED_ONE,
    n_boot: int = 1000,
    rng: np.random.Generator | None = None,
    pilot=None,
) -> BatchResult:
    """Simplified fixed-sample MMD tester.

    Computes the unbiased MMD^2 U-statistic of the paired batch and a
    1 - alpha lower confidence bound L from a percentile bootstrap over pairs;
    rejects iff L > tau^2.  With the median heuristic the bandwidth comes from
    `pilot` (pooled (x, y) points) when given, otherwise from the batch.
    """
    X, Y = as_points(X), as_points(Y)
    n = X.shape[0]
    if n < 4 or Y.shape != X.shape:
        raise UsageError("batch test needs two equally sized batches of >= 4 points")
    if not 0.0 < alpha < 1.0:
        raise UsageError("alpha must lie in (0, 1)")
    if n_boot < 1:
        raise UsageError("n_boot must be >= 1")
    bandwidth = BatchBandwidth(bandwidth)
    if bandwidth is BatchBandwidth.FIXED_ONE:
        h = 1.0
    else:
        h = median_heuristic(np.concatenate([X, Y]) if pilot is None else pilot).bandwidth
    H = mmd2_kernel_matrix(X, Y, h)
    denom = n * (n - 1.0)
    estimate = float(H.sum() / denom)
    rng = np.random.default_rng(0) if rng is None else rng
    W = rng.multinomial(n, np.full(n, 1.0 / n), size=n_boot).astype(float)
    boot = np.einsum("bi,bi->b", W @ H, W) / denom
    lower = float(np.quantile(boot, alpha))
    tau = mmd_threshold(p, bound).tau
    return BatchResult(lower > tau * tau, estimate, lower, tau, h)


# ------------------------------------------------------- decoupling grid

DECOUPLE_VARIANTS = (
    ("Sequential + new bound + MH", "sequential", BoundFormula.NEW, True),
    ("Sequential + MH", "sequential", BoundFormula.LEGACY, True),
    ("Sequential + new bound", "sequential", BoundFormula.NEW, False),
    ("Sequential", "sequential", BoundFormula.LEGACY, False),
    ("Batch + new bound + MH", "batch", BoundFormula.NEW, True),
    ("Batch + MH", "batch", BoundFormula.LEGACY, True),
    ("Batch + new bound", "batch", BoundFormula.NEW, False),
    ("Batch", "batch", BoundFormula.LEGACY, False),
)
DECOUPLE_MECHANISMS = ("DPGaussian", "NonDPGaussian1", "NonDPGaussian2")


@dataclass(frozen=True)
class DecoupleRow:
    variant: str
    mechanism: str
    rejection_rate: float
    rate_stderr: float
    runs: int


def _decouple_cell(task):
    cfg, variant, kind = task
    _, mode, bound, mh = next(v for v in DECOUPLE_VARIANTS if v[0] == variant)
    eps = cfg.epsilons[0]
    spec = MechanismSpec(kind, eps, cfg.delta)
    # the same replication streams are used by every variant
    streams = [MechanismPairStream(spec, seed=cfg.seed, stream_id=stream_id("decouple", kind, r))
               for r in range(cfg.repetitions)]
    if mode == "sequential":
        tcfg = cfg.test_config(eps, cfg.n_max_for(0), bound=bound, bandwidth=None if mh else 1.0)
        if not mh:
            for s in streams:  # keep the tested samples aligned with the MH variants
                s.sample(cfg.pilot_size)
        return [r.rejected for r in run_audits(tcfg, streams, record_trace=False)]
    decisions = []
    for r, s in enumerate(streams):
        pX, pY = s.sample(cfg.pilot_size)
        X, Y = s.sample(cfg.batch_size)
        res = batch_mmd_test(X, Y, PrivacyParams(eps, cfg.delta), cfg.alpha, bound,
                             BatchBandwidth.MEDIAN_HEURISTIC if mh else BatchBandwidth.FIXED_ONE,
                             cfg.bootstrap, make_rng(cfg.seed, stream_id("bootstrap", variant, kind, r)),
                             pilot=np.concatenate([pX, pY]))
        decisions.append(res.reject)
    return decisions


def decoupling_grid(cfg: ExperimentConfig) -> list[DecoupleRow]:
    """Rejection rates of the eight sequential/batch x bound x bandwidth variants."""
    mechanisms = [m for m in cfg.mechanisms if m in DECOUPLE_MECHANISMS] or list(DECOUPLE_MECHANISMS)
    tasks = [(cfg, v[0], m) for v in DECOUPLE_VARIANTS for m in mechanisms]
    results = _fan_out(_decouple_cell, tasks)
    rows = []
    for (_, variant, kind), dec in zip(tasks, results):
        p = float(np.mean(dec))
        rows.append(DecoupleRow(variant, kind, p, math.sqrt(p * (1 - p) / len(dec)), len(dec)))
    out = _out_dir(cfg)
    if out is not None:
        write_csv(out / "decouple.csv", DECOUPLE_COLUMNS,
                  [(r.variant, r.mechanism, r.rejection_rate, r.rate_stderr, r.runs) for r in rows], _header(cfg))
    return rows


# ------------------------------------------------------ synthetic studies


@dataclass(frozen=True)
class SyntheticRow:
    family: str
    dim: int
    param: float  # mean-shift norm, or bump amplitude (0 for identical uniforms)
    rejection_rate: float
    rate_stderr: float
    mean_stop: float | None
    stop_stderr: float | None
    runs: int

    def as_tuple(self) -> tuple:
        opt = lambda x: "" if x is None else x  # noqa: E731
        return (self.family, self.dim, self.param, self.rejection_rate, self.rate_stderr,
                opt(self.mean_stop), opt(self.stop_stderr), self.runs)


def _synthetic_cell(task):
    cfg, family, dim, param, reps = task
    tcfg = cfg.test_config(0.0, cfg.n_max_for(0), privacy=PrivacyParams(0.0, 0.0))
    ids = [stream_id(family, dim, param, r) for r in range(reps)]
    if family == "uniform":
        streams = [UniformCubeStream(dim, cfg.seed, i) for i in ids]
    elif family == "perturbed_uniform":
        streams = [PerturbedUniformStream(dim, param, 1, cfg.seed, i) for i in ids]
    else:
        streams = [GaussianShiftStream(shift_vector(param, dim), cfg.seed, i) for i in ids]
    return run_audits(tcfg, streams, record_trace=False)


def synthetic_suite(cfg: ExperimentConfig) -> list[SyntheticRow]:
    """Pure two-sample mode (tau = 0): identical and perturbed uniforms, Gaussian mean shifts."""
    tasks = [
        (cfg, "uniform", cfg.uniform_dim, 0.0, cfg.uniform_repetitions),
        (cfg, "perturbed_uniform", cfg.uniform_dim, cfg.amplitude, cfg.uniform_repetitions),
    ]
    tasks += [(cfg, "gaussian_shift", d, float(m), cfg.repetitions) for d in cfg.dims for m in cfg.mu_norms]
    results = _fan_out(_synthetic_cell, tasks)
    rows = []
    for (_, family, dim, param, _), res in zip(tasks, results):
        rate, rate_se, mean, mean_se = rate_and_stops([r.rejected for r in res], [r.stopping_time for r in res])
        rows.append(SyntheticRow(family, dim, param, rate, rate_se, mean, mean_se, len(res)))
    out = _out_dir(cfg)
    if out is not None:
        write_csv(out / "synthetic.csv", SYNTHETIC_COLUMNS, [r.as_tuple() for r in rows], _header(cfg))
    return rows


# ---------------------------------------------------------- canary sweeps


@dataclass(frozen=True)
class CanaryRun:
    fixture: str  # "private" or "nonprivate"
    run: int
    sigma: float
    sweep: EpsilonSweep


def canary_sigmas(cfg: ExperimentConfig) -> dict[str, float]:
    return {
        "private": float(gaussian_sigma_for(cfg.canary_epsilon, cfg.delta, 1.0)),
        "nonprivate": float(cfg.nonprivate_sigma),
    }


def _canary_cell(task):
    cfg, fixture, sigma, run = task
    tcfg = cfg.test_config(cfg.candidates[0], cfg.n_max_for(0))
    stream = CanaryStream(sigma, cfg.seed, stream_id("canary", fixture, run))
    return epsilon_lower_bound(cfg.candidates, cfg.delta, tcfg, stream)


def write_sweep_csv(path, sweep: EpsilonSweep, comment: str | None = None) -> None:
    write_csv(path, SWEEP_COLUMNS, ((t, lb) for t, lb in enumerate(sweep.lower_bound)), comment)


def dpsgd_audit_run(cfg: ExperimentConfig) -> list[CanaryRun]:
    """Epsilon lower-bound traces on private and non-private canary fixtures."""
    if not cfg.candidates:
        raise UsageError("candidate grid is empty")
    sig = canary_sigmas(cfg)
    tasks = [(cfg, f, sig[f], r) for f in ("private", "nonprivate") for r in range(cfg.repetitions)]
    sweeps = _fan_out(_canary_cell, tasks)
    runs = [CanaryRun(f, r, s, sw) for (_, f, s, r), sw in zip(tasks, sweeps)]
    out = _out_dir(cfg)
    if out is not None:
        for c in runs:
            write_sweep_csv(out / f"canary_{c.fixture}_run{c.run}.csv", c.sweep,
                            _header(cfg, fixture=c.fixture, run=c.run, sigma=c.sigma))
    return runs


# ------------------------------------------------- single stream commands


def _stream_spec(cfg: ExperimentConfig) -> StreamSpec:
    if cfg.stream is None:
        raise UsageError("this command needs a 'stream' entry in the config")
    return StreamSpec.from_dict(cfg.stream)


def audit_stream(cfg: ExperimentConfig) -> list[AuditResult]:
    """`repetitions` audits at epsilons[0] on the configured stream family."""
    spec = _stream_spec(cfg)
    tcfg = cfg.test_config(cfg.epsilons[0], cfg.n_max_for(0))
    streams = [spec.build(stream_id("audit", r)) for r in range(cfg.repetitions)]
    results = run_audits(tcfg, streams, record_trace=True)
    out = _out_dir(cfg)
    if out is not None:
        for r, a in enumerate(results):
            meta = dict(mechanism=spec.family.value, epsilon=cfg.epsilons[0], strategy=cfg.strategy.value, rep=r,
                        truncated=a.truncated)
            write_trace_csv(out / f"audit_rep{r}.csv", a.trace, _header(cfg, **meta))
    return results


def sweep_stream(cfg: ExperimentConfig) -> EpsilonSweep:
    spec = _stream_spec(cfg)
    tcfg = cfg.test_config(cfg.candidates[0], cfg.n_max_for(0))
    sweep = epsilon_lower_bound(cfg.candidates, cfg.delta, tcfg, spec.build(stream_id("sweep", 0)))
    out = _out_dir(cfg)
    if out is not None:
        write_sweep_csv(out / "sweep.csv", sweep, _header(cfg))
    return sweep


# per-kind defaults used by the CLI and the scripts
KIND_DEFAULTS: dict[ExperimentKind, dict] = {
    ExperimentKind.TABLE1: dict(strategy="ons"),
    ExperimentKind.TABLE2: dict(strategy="eprocess"),
    ExperimentKind.DECOUPLE: dict(epsilons=(0.01,), n_max=(2000,), repetitions=10),
    ExperimentKind.SYNTHETIC: dict(n_max=(2000,)),
    ExperimentKind.DPSGD: dict(repetitions=5, n_max=(500,)),
    ExperimentKind.AUDIT: dict(repetitions=1, epsilons=(0.01,), n_max=(2000,)),
    ExperimentKind.SWEEP_EPSILON: dict(repetitions=1, n_max=(500,)),
}


def default_config(kind: ExperimentKind | str, **overrides) -> ExperimentConfig:
    kind = ExperimentKind(kind)
    kw = dict(KIND_DEFAULTS[kind])
    kw.update(overrides)
    return ExperimentConfig(kind=kind, **kw)
