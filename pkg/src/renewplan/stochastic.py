"""Random variables, reproducible sampling, and upper-quantile estimation.

Sampling is chunked into counter-based substreams keyed on
``(seed, chunk index)`` so the output for a given ``(rv, seed, n)`` is
bit-identical no matter how many workers evaluate the chunks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import InfeasibleError, InputError, NumericalError, ParameterError

#: Draws per substream chunk.
CHUNK_SIZE = 1 << 20

MONTE_CARLO = "monte_carlo"
QUADRATURE_ORACLE = "quadrature_oracle"


@dataclass(frozen=True)
class RandomVariable:
    """Distribution of a demand level or a capacity factor.

    Supported kinds: ``constant`` (a single value), ``uniform`` on
    ``[lo, hi)``, and ``empirical`` (resampling with replacement from a
    sorted value list). Use the classmethod constructors.
    """

    kind: str
    value: float = 0.0
    lo: float = 0.0
    hi: float = 0.0
    values: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind == "constant":
            if not math.isfinite(self.value):
                raise ParameterError("constant random variable needs a finite value")
        elif self.kind == "uniform":
            if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
                raise ParameterError("uniform bounds must be finite")
            if not self.lo < self.hi:
                raise ParameterError(f"uniform requires lo < hi, got [{self.lo}, {self.hi}]")
        elif self.kind == "empirical":
            if len(self.values) == 0:
                raise ParameterError("empirical sample list must be non-empty")
            if any(a > b for a, b in zip(self.values, self.values[1:])):
                raise ParameterError("empirical sample list must be sorted ascending")
        else:
            raise ParameterError(f"unknown random variable kind {self.kind!r}")

    @classmethod
    def constant(cls, value: float) -> "RandomVariable":
        return cls(kind="constant", value=float(value))

    @classmethod
    def uniform(cls, lo: float, hi: float) -> "RandomVariable":
        return cls(kind="uniform", lo=float(lo), hi=float(hi))

    @classmethod
    def empirical(cls, values) -> "RandomVariable":
        return cls(kind="empirical", values=tuple(sorted(float(v) for v in values)))

    def support(self) -> tuple[float, float]:
        if self.kind == "constant":
            return self.value, self.value
        if self.kind == "uniform":
            return self.lo, self.hi
        return self.values[0], self.values[-1]

    def mean(self) -> float:
        if self.kind == "constant":
            return self.value
        if self.kind == "uniform":
            return 0.5 * (self.lo + self.hi)
        return float(np.mean(self.values))


@dataclass
class SampleBatch:
    """Draws produced by :func:`sample`; ``values`` has exactly ``count`` entries."""

    values: np.ndarray
    seed: int
    count: int


@dataclass(frozen=True)
class SamplingConfig:
    """How many draws to use and which master seed."""

    n_samples: int = 10**6
    seed: int = 0


@dataclass(frozen=True)
class QuantileResult:
    """An upper-quantile estimate with its provenance.

    ``z`` is the value whose strict-exceedance probability is ``epsilon``;
    ``ci_halfwidth`` is 0 for the quadrature oracle.
    """

    z: float
    epsilon: float
    method: str
    ci_halfwidth: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.z):
            raise ParameterError("quantile must be finite")
        if not 0.0 < self.epsilon < 1.0:
            raise ParameterError("epsilon must lie in (0,1)")


def _chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    # Philox is counter based; the spawn key isolates each chunk's stream.
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(chunk,))
    return np.random.Generator(np.random.Philox(ss))


def _draw(rv: RandomVariable, rng: np.random.Generator, n: int) -> np.ndarray:
    if rv.kind == "constant":
        return np.full(n, rv.value)
    if rv.kind == "uniform":
        return rng.uniform(rv.lo, rv.hi, n)
    vals = np.asarray(rv.values)
    return vals[rng.integers(0, len(vals), n)]


def sample(rv: RandomVariable, seed: int, n: int) -> SampleBatch:
    """Draw ``n`` values from ``rv``, deterministically for fixed ``(rv, seed, n)``."""
    if n < 1:
        raise ParameterError(f"sample count must be >= 1, got {n}")
    if seed < 0:
        raise ParameterError("seed must be a non-negative integer")
    parts = []
    for chunk in range(0, math.ceil(n / CHUNK_SIZE)):
        take = min(CHUNK_SIZE, n - chunk * CHUNK_SIZE)
        parts.append(_draw(rv, _chunk_rng(seed, chunk), take))
    return SampleBatch(values=np.concatenate(parts), seed=seed, count=n)


def derive_seeds(seed: int, n: int) -> list[int]:
    """Derive ``n`` independent child seeds from a master seed (deterministic)."""
    words = np.random.SeedSequence(seed).generate_state(n, dtype=np.uint64)
    return [int(w) for w in words]


def sample_pair(
    d_rv: RandomVariable, v_rv: RandomVariable, seed: int, n: int
) -> tuple[np.ndarray, np.ndarray]:
    """Independent demand and capacity-factor draws from one master seed."""
    d_seed, v_seed = derive_seeds(seed, 2)
    return sample(d_rv, d_seed, n).values, sample(v_rv, v_seed, n).values


def _tail_count_limit(epsilon: float, n: int) -> int:
    # Largest admissible strict-exceedance count; rounding guards against
    # epsilon*n landing just below an integer in floating point.
    return int(math.floor(round(epsilon * n, 9)))


def _quantile_index(epsilon: float, n: int) -> int:
    return max(n - 1 - _tail_count_limit(epsilon, n), 0)


def upper_quantile_mc(samples, epsilon: float) -> QuantileResult:
    """Empirical upper quantile of a sample set.

    Convention: the smallest sample value ``z`` whose strict-exceedance
    fraction is at most ``epsilon``. The confidence halfwidth maps the
    binomial standard error of the tail probability through the empirical
    quantile function.
    """
    arr = np.sort(np.asarray(samples, dtype=float))
    if arr.size == 0:
        raise InputError("cannot take a quantile of an empty sample set")
    if not 0.0 < epsilon < 1.0:
        raise ParameterError("epsilon must lie in (0,1)")
    n = arr.size
    z = float(arr[_quantile_index(epsilon, n)])

    se = math.sqrt(epsilon * (1.0 - epsilon) / n)
    if epsilon - se <= 0.0 or epsilon + se >= 1.0:
        halfwidth = 0.0
    else:
        hi = float(arr[_quantile_index(epsilon - se, n)])
        lo = float(arr[_quantile_index(epsilon + se, n)])
        halfwidth = 0.5 * (hi - lo)
    return QuantileResult(z=z, epsilon=epsilon, method=MONTE_CARLO, ci_halfwidth=halfwidth)


def constraint_ratio_samples(
    d_rv: RandomVariable,
    v_rv: RandomVariable,
    T: float,
    L: float,
    e_F: float,
    seed: int,
    n: int,
) -> np.ndarray:
    """Draws of the constraint variable ``(T*D - L/e_F) / V``."""
    if e_F <= 0:
        raise ParameterError("e_F must be positive")
    d, v = sample_pair(d_rv, v_rv, seed, n)
    with np.errstate(divide="ignore"):
        return (T * d - L / e_F) / v


def _uniform_ratio_tail(
    z: float, a: float, b: float, v_lo: float, v_hi: float
) -> float:
    """P(A > z*V) for A ~ U(a,b) and V ~ U(v_lo,v_hi) independent, z >= 0.

    The inner probability is piecewise linear in v, so the integral over v
    is evaluated exactly by splitting at the breakpoints a/z and b/z.
    """
    width = b - a

    def inner(v: float) -> float:
        y = z * v
        if y <= a:
            return 1.0
        if y >= b:
            return 0.0
        return (b - y) / width

    if z == 0.0:
        return inner(v_lo)
    pts = [v_lo, v_hi]
    for cut in (a / z, b / z):
        if v_lo < cut < v_hi:
            pts.append(cut)
    pts.sort()
    total = 0.0
    for left, right in zip(pts, pts[1:]):
        total += (right - left) * inner(0.5 * (left + right))
    return total / (v_hi - v_lo)


def z_epsilon_oracle(
    d_rv: RandomVariable,
    v_rv: RandomVariable,
    T: float,
    L: float,
    e_F: float,
    epsilon: float,
) -> QuantileResult:
    """Exact upper quantile of ``(T*D - L/e_F)/V`` for uniform D and V.

    Computes the exceedance probability by exact piecewise-linear
    quadrature over V, then root-finds ``z`` on ``[0, z_hi]`` with the
    bracket doubled until the tail drops below ``epsilon``.
    """
    if d_rv.kind != "uniform" or v_rv.kind != "uniform":
        raise ParameterError("the quadrature oracle requires uniform D and V")
    if not 0.0 < epsilon < 1.0:
        raise ParameterError("epsilon must lie in (0,1)")
    if e_F <= 0:
        raise ParameterError("e_F must be positive")
    if v_rv.lo < 0 or v_rv.hi > 1:
        raise ParameterError("capacity factor support must lie within [0, 1]")

    a = T * d_rv.lo - L / e_F
    b = T * d_rv.hi - L / e_F

    def tail(z: float) -> float:
        return _uniform_ratio_tail(z, a, b, v_rv.lo, v_rv.hi)

    t0 = tail(0.0)
    if t0 < epsilon:
        raise InfeasibleError(
            "exceedance probability never reaches epsilon: the emission target is "
            "loose enough that no positive quantile exists",
            details={"attainable_tail_range": (0.0, t0), "epsilon": epsilon},
        )

    z_hi = 1.0
    doublings = 0
    while tail(z_hi) >= epsilon:
        z_hi *= 2.0
        doublings += 1
        if doublings > 60:
            raise InfeasibleError(
                "tail probability stayed above epsilon after 60 bracket doublings",
                details={"attainable_tail_range": (tail(z_hi), t0), "epsilon": epsilon},
            )

    z = brentq(lambda x: tail(x) - epsilon, 0.0, z_hi, xtol=1e-12, rtol=8.9e-16)
    if abs(tail(z) - epsilon) >= 1e-8:
        # Near-degenerate distributions make the tail so steep that 1e-8 is
        # unrepresentable in double precision; accept z when its floating
        # point neighborhood still straddles epsilon.
        step = 16 * np.spacing(max(abs(z), 1.0))
        if not tail(z - step) >= epsilon >= tail(z + step):
            raise NumericalError(
                f"quantile root finding did not satisfy |tail(z) - epsilon| < 1e-8 at z={z}"
            )
    return QuantileResult(z=float(z), epsilon=epsilon, method=QUADRATURE_ORACLE, ci_halfwidth=0.0)
