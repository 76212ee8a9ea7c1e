"""Benchmark mechanisms and synthetic paired streams.

The mean mechanisms release sum(D)/m + noise for a dataset D of records in
[0, 1].  The noisy count n~ = max(1e-12, n + Laplace(0, 2/eps)) is redrawn on
every call.

=============== ======== ================ ============================
kind            mean     noise            noise scale
=============== ======== ================ ============================
DPLaplace       sum/n~   Laplace          2 / (n~ eps)
NonDPLaplace1   sum/n    Laplace          2 / (n eps)
NonDPLaplace2   sum/n    Laplace          2 / (n~ eps)
DPGaussian      sum/n~   Gaussian         sigma(eps, delta, 2 / n~)
NonDPGaussian1  sum/n    Gaussian         sigma(eps, delta, 2 / n)
NonDPGaussian2  sum/n    Gaussian         sigma(eps, delta, 2 / n~)
=============== ======== ================ ============================

with sigma(eps, delta, s) = s sqrt(2 ln(1.25/delta)) / eps.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from seqaudit.errors import UsageError

MIN_COUNT = 1e-12
S_SMALL = (0.0,)
S_LARGE = (0.0, 1.0)


class MechanismKind(str, enum.Enum):
    DP_LAPLACE = "DPLaplace"
    NONDP_LAPLACE1 = "NonDPLaplace1"
    NONDP_LAPLACE2 = "NonDPLaplace2"
    DP_GAUSSIAN = "DPGaussian"
    NONDP_GAUSSIAN1 = "NonDPGaussian1"
    NONDP_GAUSSIAN2 = "NonDPGaussian2"

    @property
    def gaussian(self) -> bool:
        return "Gaussian" in self.value

    @property
    def private_mean(self) -> bool:
        """Mean divides by the noisy count."""
        return self in (MechanismKind.DP_LAPLACE, MechanismKind.DP_GAUSSIAN)

    @property
    def private_scale(self) -> bool:
        """Noise scale uses the noisy count."""
        return self not in (MechanismKind.NONDP_LAPLACE1, MechanismKind.NONDP_GAUSSIAN1)


@dataclass(frozen=True)
class MechanismSpec:
    kind: MechanismKind
    epsilon: float
    delta: float = 1e-5

    def __post_init__(self):
        object.__setattr__(self, "kind", MechanismKind(self.kind))
        if not self.epsilon > 0:
            raise UsageError("mechanism epsilon must be > 0")
        if not 0.0 <= self.delta < 1.0:
            raise UsageError("delta must lie in [0, 1)")
        if self.kind.gaussian and self.delta <= 0:
            raise UsageError("Gaussian mechanisms need delta > 0")


def make_rng(seed: int, stream_id: int = 0) -> np.random.Generator:
    """Counter-based generator keyed by (seed, stream_id)."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(stream_id)])))


def gaussian_sigma_for(epsilon: float, delta: float, sensitivity=1.0):
    """Classical Gaussian-mechanism scale sensitivity * sqrt(2 ln(1.25/delta)) / eps."""
    if not epsilon > 0:
        raise UsageError("epsilon must be > 0")
    if not 0.0 < delta < 1.0:
        raise UsageError("the Gaussian mechanism needs 0 < delta < 1")
    return np.asarray(sensitivity) * math.sqrt(2.0 * math.log(1.25 / delta)) / epsilon


def noisy_count(n: int, epsilon: float, rng: np.random.Generator, size=None):
    return np.maximum(MIN_COUNT, n + rng.laplace(0.0, 2.0 / epsilon, size=size))


def sample_mechanism(spec: MechanismSpec, data, rng: np.random.Generator, size: int | None = None):
    """One release (or `size` independent releases) of the mechanism on `data`."""
    records = np.asarray(data, dtype=float)
    n = records.size
    if n == 0 and not spec.kind.private_mean:
        raise UsageError(f"{spec.kind.value} divides by the true count; dataset must be non-empty")
    eps = spec.epsilon
    total = records.sum()
    n_tilde = noisy_count(n, eps, rng, size)
    mean = total / n_tilde if spec.kind.private_mean else np.full_like(n_tilde, total / n)
    sens = 2.0 / (n_tilde if spec.kind.private_scale else n)
    if spec.kind.gaussian:
        noise = rng.normal(0.0, 1.0, size=size) * gaussian_sigma_for(eps, spec.delta, sens)
    else:
        noise = rng.laplace(0.0, 1.0, size=size) * (sens / eps)
    out = mean + noise
    return float(out) if size is None else out


# -------------------------------------------------------------------- streams


class PairStream:
    """Infinite i.i.d. paired stream; ``sample(n)`` returns (X, Y), each (n, dim)."""

    dim = 1

    def __init__(self, seed: int = 0, stream_id: int = 0):
        self.seed, self.stream_id = seed, stream_id
        self.rng = make_rng(seed, stream_id)

    def sample(self, n: int):
        raise NotImplementedError

    def __iter__(self):
        while True:
            X, Y = self.sample(256)
            yield from zip(X, Y)


class MechanismPairStream(PairStream):
    """x ~ A(S), y ~ A(S') for a fixed neighbouring pair."""

    def __init__(self, spec: MechanismSpec, S=S_SMALL, S_prime=S_LARGE, seed: int = 0, stream_id: int = 0):
        super().__init__(seed, stream_id)
        self.spec, self.S, self.S_prime = spec, tuple(S), tuple(S_prime)

    def sample(self, n):
        x = sample_mechanism(self.spec, self.S, self.rng, size=n)
        y = sample_mechanism(self.spec, self.S_prime, self.rng, size=n)
        return x[:, None], y[:, None]


class CanaryStream(PairStream):
    """Rescaled canary dot products: x ~ N(0, sigma^2), y ~ N(1, sigma^2)."""

    def __init__(self, sigma: float, seed: int = 0, stream_id: int = 0):
        if not sigma > 0:
            raise UsageError("canary sigma must be > 0")
        super().__init__(seed, stream_id)
        self.sigma = sigma

    def sample(self, n):
        x = self.rng.normal(0.0, self.sigma, size=n)
        y = self.rng.normal(1.0, self.sigma, size=n)
        return x[:, None], y[:, None]


def canary_pair_stream(sigma: float, seed: int = 0, stream_id: int = 0) -> CanaryStream:
    return CanaryStream(sigma, seed, stream_id)


class UniformCubeStream(PairStream):
    def __init__(self, dim: int = 2, seed: int = 0, stream_id: int = 0):
        if dim < 1:
            raise UsageError("dimension must be >= 1")
        super().__init__(seed, stream_id)
        self.dim = dim

    def sample(self, n):
        return self.rng.random((n, self.dim)), self.rng.random((n, self.dim))


def perturbed_density(x, amplitude: float = 1.0, frequency: int = 1) -> np.ndarray:
    """Uniform density on [0, 1]^d plus one raised-cosine bump at the origin corner.

    p(x) = 1 + a (prod_k (1 + cos(pi c x_k)) - 1) / (2^d - 1).  For integer
    c >= 1 each factor integrates to 1, so p integrates to 1; the product lies
    in [0, 2^d], so p stays within [1 - a/(2^d - 1), 1 + a] which is inside
    [0, 2] for a in [0, 1].
    """
    x = np.atleast_2d(x)
    d = x.shape[-1]
    bump = np.prod(1.0 + np.cos(np.pi * frequency * x), axis=-1) - 1.0
    return 1.0 + amplitude * bump / (2.0**d - 1.0)


class PerturbedUniformStream(PairStream):
    """x uniform on [0,1]^d, y from `perturbed_density` (rejection sampling)."""

    def __init__(self, dim: int = 2, amplitude: float = 1.0, frequency: int = 1, seed: int = 0, stream_id: int = 0):
        if dim < 1:
            raise UsageError("dimension must be >= 1")
        if not 0.0 <= amplitude <= 1.0:
            raise UsageError("amplitude must lie in [0, 1] to keep the density within [0, 2]")
        if int(frequency) != frequency or frequency < 1:
            raise UsageError("frequency must be a positive integer")
        super().__init__(seed, stream_id)
        self.dim, self.amplitude, self.frequency = dim, amplitude, int(frequency)

    def _perturbed(self, n):
        out = np.empty((0, self.dim))
        bound = 1.0 + self.amplitude
        while len(out) < n:
            m = 2 * (n - len(out)) + 16
            cand = self.rng.random((m, self.dim))
            keep = self.rng.random(m) * bound < perturbed_density(cand, self.amplitude, self.frequency)
            out = np.concatenate([out, cand[keep]])
        return out[:n]

    def sample(self, n):
        return self.rng.random((n, self.dim)), self._perturbed(n)


class GaussianShiftStream(PairStream):
    """x ~ N(0, I_d), y ~ N(mu, I_d)."""

    def __init__(self, mu, seed: int = 0, stream_id: int = 0):
        super().__init__(seed, stream_id)
        self.mu = np.atleast_1d(np.asarray(mu, dtype=float))
        self.dim = self.mu.size

    def sample(self, n):
        x = self.rng.standard_normal((n, self.dim))
        y = self.rng.standard_normal((n, self.dim)) + self.mu
        return x, y


def shift_vector(norm: float, dim: int) -> np.ndarray:
    """Mean shift of the given Euclidean norm spread evenly over all coordinates."""
    return np.full(dim, norm / math.sqrt(dim))


class StreamFamily(str, enum.Enum):
    MECHANISM_PAIR = "mechanism_pair"
    CANARY_GAUSSIAN = "canary_gaussian"
    UNIFORM_CUBE = "uniform_cube"
    PERTURBED_UNIFORM = "perturbed_uniform"
    GAUSSIAN_SHIFT = "gaussian_shift"


@dataclass(frozen=True)
class StreamSpec:
    """Serializable description of a paired stream."""

    family: StreamFamily
    params: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "family", StreamFamily(self.family))

    def to_dict(self) -> dict:
        return {"family": self.family.value, "params": dict(self.params), "seed": self.seed}

    @classmethod
    def from_dict(cls, d: dict) -> "StreamSpec":
        unknown = set(d) - {"family", "params", "seed"}
        if unknown:
            raise UsageError(f"unknown stream keys: {sorted(unknown)}")
        return cls(d["family"], dict(d.get("params", {})), int(d.get("seed", 0)))

    def build(self, stream_id: int = 0) -> PairStream:
        p = self.params
        try:
            if self.family is StreamFamily.MECHANISM_PAIR:
                spec = MechanismSpec(p["kind"], p["epsilon"], p.get("delta", 1e-5))
                return MechanismPairStream(spec, p.get("S", S_SMALL), p.get("S_prime", S_LARGE), self.seed, stream_id)
            if self.family is StreamFamily.CANARY_GAUSSIAN:
                return CanaryStream(p["sigma"], self.seed, stream_id)
            if self.family is StreamFamily.UNIFORM_CUBE:
                return UniformCubeStream(p.get("dim", 2), self.seed, stream_id)
            if self.family is StreamFamily.PERTURBED_UNIFORM:
                return PerturbedUniformStream(p.get("dim", 2), p.get("amplitude", 1.0), p.get("frequency", 1),
                                              self.seed, stream_id)
            mu = p["mu"] if "mu" in p else shift_vector(p["mu_norm"], p.get("dim", 1))
            return GaussianShiftStream(mu, self.seed, stream_id)
        except KeyError as exc:
            raise UsageError(f"stream family {self.family.value!r} is missing parameter {exc}") from None


def synthetic_stream(spec: StreamSpec, stream_id: int = 0) -> PairStream:
    return spec.build(stream_id)
