"""Seeded simulation of the random-coding ensemble and prefactor regression.

Randomness comes from counter-based Philox streams.  Trials are grouped into
fixed-size blocks and block ``b`` draws from the stream keyed by
``(seed, b)``, so results do not depend on how blocks are scheduled.  Within a
block, draws are consumed in a fixed order: codebooks, messages, channel
noise, tie-break keys.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .bounds import BoundCurve
from .density import build_density_table, competitor_spectrum
from .errors import DegenerateFit, MemoryBudget, ValidationError
from .laws import DiscreteRealLaw, convolution_powers
from .scenario import Scenario

BLOCK_TRIALS = 1 << 16
MEMORY_BUDGET = 1 << 26  # symbols held per block
TIE_RTOL = 1e-10


@dataclass(frozen=True)
class SimEstimate:
    p_hat: float
    stderr: float
    trials: int
    seed: int

    def to_dict(self) -> dict:
        return asdict(self)

    def csv_row(self, n: int) -> str:
        return f"{n},{self.p_hat!r},{self.stderr!r},{self.trials},{self.seed}"


SIM_CSV_HEADER = "n,estimate,stderr,trials,seed"


@dataclass(frozen=True)
class PrefactorFit:
    slope: float
    intercept: float
    residual: float
    predicted_slope: float | None = None

    @property
    def deviation(self) -> float | None:
        if self.predicted_slope is None:
            return None
        return abs(self.slope - self.predicted_slope)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["deviation"] = self.deviation
        return d


def block_generator(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, block])))


def _blocks(trials: int, block_trials: int):
    start = 0
    b = 0
    while start < trials:
        size = min(block_trials, trials - start)
        yield b, size
        start += size
        b += 1


def _sample_categorical(rng: np.random.Generator, cdf: np.ndarray, shape) -> np.ndarray:
    u = rng.random(shape)
    return np.minimum(np.searchsorted(cdf, u, side="right"), cdf.size - 1)


def simulate_pe(sc: Scenario, n: int, trials: int, seed: int, M: int | None = None,
                block_trials: int = BLOCK_TRIALS,
                memory_budget: int = MEMORY_BUDGET) -> SimEstimate:
    """Estimate the ensemble-average error probability of max-metric decoding.

    Each trial draws a fresh i.i.d. codebook, a uniform message and a channel
    output, and decodes by the largest metric with ties broken uniformly at
    random.  Metric products are compared through per-codeword counts of
    distinct metric values so equal products compare exactly equal.
    """
    if n < 1 or trials < 1:
        raise ValidationError("need n >= 1 and trials >= 1")
    M = sc.num_codewords(n) if M is None else int(M)
    if M * n > memory_budget:
        raise MemoryBudget(f"M*n = {M * n} symbols per trial exceeds {memory_budget}")
    block_trials = max(1, min(block_trials, memory_budget // (M * n)))

    ny = sc.ny
    q_flat = sc.q.ravel()
    levels, bucket = np.unique(q_flat[q_flat > 0], return_inverse=True)
    cell_bucket = np.full(q_flat.size, -1)
    cell_bucket[q_flat > 0] = bucket
    log_levels = np.log(levels)
    q_cdf = np.cumsum(sc.Q)
    w_cdf = np.cumsum(sc.W, axis=1)

    errors = 0
    for b, size in _blocks(trials, block_trials):
        rng = block_generator(seed, b)
        book = _sample_categorical(rng, q_cdf, (size, M, n))
        msg = rng.integers(0, M, size)
        sent = book[np.arange(size), msg]  # (size, n)
        u = rng.random((size, n))
        y = (u[..., None] >= w_cdf[sent]).sum(-1)
        y = np.minimum(y, ny - 1)
        keys = rng.random((size, M))

        cb = cell_bucket[book * ny + y[:, None, :]]  # (size, M, n)
        counts = np.stack([(cb == k).sum(-1) for k in range(levels.size)], axis=-1)
        score = counts @ log_levels
        score[(cb < 0).any(-1)] = -np.inf
        best = score.max(axis=1, keepdims=True)
        tied = score >= best - TIE_RTOL * np.maximum(1.0, np.abs(best))
        choice = np.where(tied, keys, -1.0).argmax(axis=1)
        errors += int((choice != msg).sum())

    p = errors / trials
    return SimEstimate(p, math.sqrt(p * (1 - p) / trials), trials, seed)


def rcu_monte_carlo(sc: Scenario, s: float, n: int, trials: int, seed: int,
                    M: int | None = None, block_trials: int = BLOCK_TRIALS) -> SimEstimate:
    """Unbiased estimate of the RCU value: (X, Y) sampled, inner probability exact.

    The competitor law depends only on the output type and is cached per type.
    """
    if n < 1 or trials < 1:
        raise ValidationError("need n >= 1 and trials >= 1")
    M = sc.num_codewords(n) if M is None else int(M)
    log_m1 = math.log(M - 1) if M > 1 else -math.inf
    table = build_density_table(sc, s)
    p_y = sc.output_marginal
    comp_pow: dict[int, list[DiscreteRealLaw]] = {}
    cache: dict[tuple[int, ...], DiscreteRealLaw] = {}

    def competitor(y_counts: tuple[int, ...]) -> DiscreteRealLaw:
        law = cache.get(y_counts)
        if law is None:
            law = DiscreteRealLaw.point(0.0)
            for y, k in enumerate(y_counts):
                if k == 0:
                    continue
                if y not in comp_pow:
                    comp_pow[y] = convolution_powers(competitor_spectrum(table, sc, y), n)
                law = law.convolve(comp_pow[y][k])
            cache[y_counts] = law
        return law

    q_cdf = np.cumsum(sc.Q)
    w_cdf = np.cumsum(sc.W, axis=1)
    i_flat = np.where(sc.joint > 0, table.i, 0.0).ravel()
    nx, ny = sc.nx, sc.ny
    values = np.empty(trials)
    pos = 0
    for b, size in _blocks(trials, block_trials):
        rng = block_generator(seed, b)
        x = _sample_categorical(rng, q_cdf, (size, n))
        u = rng.random((size, n))
        y = np.minimum((u[..., None] >= w_cdf[x]).sum(-1), ny - 1)
        cell = x * ny + y
        counts = np.stack([(cell == c).sum(-1) for c in range(nx * ny)], axis=-1)
        thresholds = counts @ i_flat
        ycounts = counts.reshape(size, nx, ny).sum(axis=1)
        out = np.empty(size)
        for row in range(size):
            tail = competitor(tuple(int(k) for k in ycounts[row])).tail_ge([thresholds[row]])[0]
            out[row] = 0.0 if tail == 0 else min(1.0, math.exp(log_m1 + math.log(tail)))
        values[pos:pos + size] = out
        pos += size
    mean = float(_pairwise_mean(values))
    std = float(values.std(ddof=1)) if trials > 1 else 0.0
    return SimEstimate(mean, std / math.sqrt(trials), trials, seed)


def _pairwise_mean(values: np.ndarray) -> float:
    # numpy's sum uses pairwise summation over a contiguous array: order-stable
    return float(np.sum(values) / values.size)


def default_grid(n0: int = 60, points: int = 4) -> list[int]:
    return [n0 * 2 ** k for k in range(points)]


def prefactor_fit(curve: BoundCurve, e_r: float,
                  predicted_slope: float | None = None) -> PrefactorFit:
    """Least-squares fit of log_bound + n E_r against log n."""
    ns = np.asarray(curve.n_values, dtype=float)
    ys = np.asarray(curve.log_bound, dtype=float) + ns * e_r
    if ns.size < 4 or np.unique(ns).size < 4:
        raise DegenerateFit(f"need at least 4 distinct blocklengths, got {np.unique(ns).size}")
    if not np.all(np.isfinite(ys)):
        raise DegenerateFit("curve contains non-finite values")
    A = np.column_stack([np.log(ns), np.ones_like(ns)])
    coef, *_ = np.linalg.lstsq(A, ys, rcond=None)
    resid = ys - A @ coef
    return PrefactorFit(float(coef[0]), float(coef[1]),
                        float(math.sqrt(np.mean(resid ** 2))), predicted_slope)
