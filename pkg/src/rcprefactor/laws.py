"""Finite discrete laws on the extended real line.

A :class:`DiscreteRealLaw` holds strictly increasing finite atoms plus an
explicit mass at ``-inf``.  The ``-inf`` atom is never represented by a large
negative float so that "never reaches a finite threshold" stays exact.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import AtomExplosion, InfiniteAtom, ValidationError

MERGE_RTOL = 1e-12
MERGE_ATOL = 1e-14
MASS_TOL = 1e-10
DEFAULT_ATOM_CAP = 5_000_000


def _merge_sorted(values: np.ndarray, probs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if values.size <= 1:
        return values, probs
    gaps = np.diff(values)
    scale = np.maximum(np.abs(values[1:]), np.abs(values[:-1]))
    new_group = gaps > np.maximum(MERGE_RTOL * scale, MERGE_ATOL)
    if new_group.all():
        return values, probs
    starts = np.concatenate(([0], np.flatnonzero(new_group) + 1))
    # the group's first value represents it; a probability-weighted mean is
    # unstable once products of probabilities become subnormal
    return values[starts], np.add.reduceat(probs, starts)


@dataclass(frozen=True, eq=False)
class DiscreteRealLaw:
    values: np.ndarray
    probs: np.ndarray
    neg_inf: float = 0.0

    @classmethod
    def from_atoms(cls, values, probs, check: bool = True) -> "DiscreteRealLaw":
        v = np.asarray(values, dtype=float).ravel()
        p = np.asarray(probs, dtype=float).ravel()
        if v.shape != p.shape:
            raise ValidationError("values and probs differ in length")
        if np.any(p < 0) or np.any(np.isnan(v)) or np.any(v == np.inf):
            raise ValidationError("atoms need nonnegative probs and values in [-inf, inf)")
        ninf = v == -np.inf
        neg_inf = float(p[ninf].sum())
        keep = ~ninf & (p > 0)
        v, p = v[keep], p[keep]
        order = np.argsort(v, kind="stable")
        v, p = _merge_sorted(v[order], p[order])
        law = cls(v, p, neg_inf)
        if check and abs(law.total_mass - 1.0) > MASS_TOL:
            raise ValidationError(f"law has total mass {law.total_mass!r}")
        return law

    @classmethod
    def point(cls, value: float = 0.0) -> "DiscreteRealLaw":
        if value == -np.inf:
            return cls(np.empty(0), np.empty(0), 1.0)
        return cls(np.array([float(value)]), np.array([1.0]), 0.0)

    def __len__(self) -> int:
        return self.values.size + (self.neg_inf > 0)

    @property
    def total_mass(self) -> float:
        return float(self.probs.sum() + self.neg_inf)

    def atoms(self) -> list[tuple[float, float]]:
        out = [(-math.inf, self.neg_inf)] if self.neg_inf > 0 else []
        return out + list(zip(self.values.tolist(), self.probs.tolist()))

    def prob(self, value: float) -> float:
        """Mass at ``value`` (matched with the merge tolerance)."""
        if value == -np.inf:
            return self.neg_inf
        tol = max(MERGE_RTOL * abs(value), MERGE_ATOL)
        lo = np.searchsorted(self.values, value - tol, side="left")
        hi = np.searchsorted(self.values, value + tol, side="right")
        return float(self.probs[lo:hi].sum())

    def tail_ge(self, thresholds) -> np.ndarray:
        """P[V >= t] for each t; values within the merge tolerance of t count as equal."""
        t = np.asarray(thresholds, dtype=float)
        tails = np.concatenate((np.cumsum(self.probs[::-1])[::-1], [0.0]))
        tol = np.maximum(MERGE_RTOL * np.abs(t), MERGE_ATOL)
        idx = np.searchsorted(self.values, t - tol, side="left")
        return tails[idx]

    def convolve(self, other: "DiscreteRealLaw",
                 cap: int = DEFAULT_ATOM_CAP) -> "DiscreteRealLaw":
        size = self.values.size * other.values.size
        if size > cap:
            raise AtomExplosion(f"convolution needs {size} atoms (cap {cap})")
        v = np.add.outer(self.values, other.values).ravel()
        p = np.multiply.outer(self.probs, other.probs).ravel()
        keep = p > 0  # drop atoms whose mass underflowed
        v, p = v[keep], p[keep]
        order = np.argsort(v, kind="stable")
        v, p = _merge_sorted(v[order], p[order])
        neg_inf = self.neg_inf + other.neg_inf - self.neg_inf * other.neg_inf
        return DiscreteRealLaw(v, p, neg_inf)

    def shift(self, c: float) -> "DiscreteRealLaw":
        return DiscreteRealLaw(self.values + c, self.probs, self.neg_inf)

    def negate_shift(self, c: float) -> "DiscreteRealLaw":
        """Law of ``c - V``; requires no mass at -inf."""
        if self.neg_inf > 0:
            raise InfiniteAtom("c - V would put mass at +inf")
        return DiscreteRealLaw((c - self.values)[::-1].copy(), self.probs[::-1].copy(), 0.0)

    def mean(self) -> float:
        return law_moments(self)[0]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("value,prob\n")
        for v, p in self.atoms():
            buf.write(f"{v!r},{p!r}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "DiscreteRealLaw":
        rows = [ln.split(",") for ln in text.strip().splitlines()]
        if not rows or [c.strip() for c in rows[0]] != ["value", "prob"]:
            raise ValidationError("expected header 'value,prob'")
        vals = [float(r[0]) for r in rows[1:]]
        probs = [float(r[1]) for r in rows[1:]]
        return cls.from_atoms(vals, probs)


def law_moments(law: DiscreteRealLaw) -> tuple[float, float, float]:
    """(mean, variance, third absolute central moment)."""
    if law.neg_inf > 0:
        raise InfiniteAtom("moments undefined with mass at -inf")
    p, v = law.probs, law.values
    mass = p.sum()
    mean = float(np.dot(p, v) / mass)
    d = v - mean
    var = float(np.dot(p, d * d) / mass)
    t3 = float(np.dot(p, np.abs(d) ** 3) / mass)
    return mean, var, t3


def convolve_n(law: DiscreteRealLaw, n: int, cap: int = DEFAULT_ATOM_CAP) -> DiscreteRealLaw:
    """Exact law of the sum of ``n`` i.i.d. copies of ``law``."""
    if n < 0:
        raise ValidationError("n must be >= 0")
    return convolution_powers(law, n, cap)[-1]


def convolution_powers(law: DiscreteRealLaw, n: int,
                       cap: int = DEFAULT_ATOM_CAP) -> list[DiscreteRealLaw]:
    """``[law^{*0}, law^{*1}, ..., law^{*n}]`` built incrementally."""
    out = [DiscreteRealLaw.point(0.0)]
    for _ in range(n):
        out.append(out[-1].convolve(law, cap))
    return out
