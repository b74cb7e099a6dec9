"""Generalized information density, tilted conditionals and their spectra."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegenerateColumn, LengthMismatch, NormalizationFailure, ValidationError
from .laws import DiscreteRealLaw
from .scenario import Scenario


@dataclass(frozen=True, eq=False)
class DensityTable:
    """Per-letter i_s(x, y) (nats, ``-inf`` where q = 0) and V_s(x|y).

    Columns ``y`` that no input in the support of Q can reach carry
    ``reachable[y] = False``; their entries are meaningless.
    """

    s: float
    i: np.ndarray
    v: np.ndarray
    log_denominator: np.ndarray  # log sum_x Q(x) q(x, y)^s per column
    reachable: np.ndarray

    def column(self, y: int) -> tuple[np.ndarray, np.ndarray]:
        if not self.reachable[y]:
            raise DegenerateColumn(f"output {y} is unreachable from the support of Q")
        return self.i[:, y], self.v[:, y]


def _log_q_power(q: np.ndarray, s: float) -> np.ndarray:
    # log q^s with q^0 = 1 everywhere (including q = 0) and log 0^s = -inf for s > 0
    if s == 0:
        return np.zeros_like(q)
    with np.errstate(divide="ignore"):
        return s * np.log(q)


def build_density_table(sc: Scenario, s: float) -> DensityTable:
    if not (s >= 0 and math.isfinite(s)):
        raise ValidationError(f"s must be finite and >= 0, got {s!r}")
    lq = _log_q_power(sc.q, s)
    with np.errstate(divide="ignore"):
        logQ = np.log(sc.Q)
    weighted = logQ[:, None] + lq
    top = weighted.max(axis=0)
    reachable = np.isfinite(top)
    safe_top = np.where(reachable, top, 0.0)
    log_den = safe_top + np.log(np.exp(weighted - safe_top).sum(axis=0))
    log_den = np.where(reachable, log_den, -np.inf)
    with np.errstate(invalid="ignore"):
        i = np.where(reachable, lq - np.where(reachable, log_den, 0.0), -np.inf)
        v = np.where(reachable, np.exp(weighted - np.where(reachable, log_den, 0.0)), 0.0)
    for arr in (i, v, log_den, reachable):
        arr.setflags(write=False)
    return DensityTable(float(s), i, v, log_den, reachable)


def multiletter_density(table: DensityTable, x_seq: Sequence[int], y_seq: Sequence[int]) -> float:
    x = np.asarray(x_seq, dtype=np.int64)
    y = np.asarray(y_seq, dtype=np.int64)
    if x.shape != y.shape:
        raise LengthMismatch(f"sequence lengths differ: {x.size} vs {y.size}")
    if x.size == 0:
        return 0.0
    terms = table.i[x, y]
    if np.any(terms == -np.inf):
        return -math.inf
    return float(terms.sum())


def forward_spectrum(table: DensityTable, sc: Scenario) -> DiscreteRealLaw:
    """Law of i_s(X, Y) with (X, Y) ~ Q x W."""
    mask = sc.joint > 0
    return DiscreteRealLaw.from_atoms(table.i[mask], sc.joint[mask])


def conditional_forward_spectrum(table: DensityTable, sc: Scenario, y: int) -> DiscreteRealLaw:
    """Law of i_s(X, y) with X drawn from the posterior Q(x)W(y|x)/P_Y(y)."""
    col = sc.joint[:, y]
    py = col.sum()
    if py <= 0:
        raise DegenerateColumn(f"output {y} has zero probability")
    mask = col > 0
    return DiscreteRealLaw.from_atoms(table.i[mask, y], col[mask] / py)


def competitor_spectrum(table: DensityTable, sc: Scenario, y: int) -> DiscreteRealLaw:
    """Law of i_s(Xbar, y) with Xbar ~ Q."""
    iy, _ = table.column(y)
    mask = sc.Q > 0
    return DiscreteRealLaw.from_atoms(iy[mask], sc.Q[mask])


def reverse_spectrum(table: DensityTable, y: int) -> DiscreteRealLaw:
    """Law of i_s(X_s, y) with X_s ~ V_s(.|y)."""
    iy, vy = table.column(y)
    mask = vy > 0
    return DiscreteRealLaw.from_atoms(iy[mask], vy[mask])


# ---------------------------------------------------------------------------
# Exponential tilting
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TiltedLaw:
    base: DiscreteRealLaw
    rho_hat: float
    z: DiscreteRealLaw
    log_normalizer: float


def _tilt_probs(law: DiscreteRealLaw, rho: float, log_norm: float) -> np.ndarray:
    return np.exp(log_norm + rho * law.values + np.log(law.probs))


def tilt(law: DiscreteRealLaw, rho_hat: float, log_normalizer: float,
         tol: float = 1e-8) -> TiltedLaw:
    """Change of measure dF_Z = exp(log_normalizer + rho_hat t) dF(t).

    ``law`` is the law of R - i_s(X, Y); with ``rho_hat`` and ``s`` at their
    optimizers ``log_normalizer`` is E_r and the tilted law is a probability
    law.  Any other combination fails the mass check.
    """
    if law.neg_inf > 0 and rho_hat != 0:
        raise NormalizationFailure("cannot tilt a law with mass at -inf")
    with np.errstate(divide="ignore"):
        probs = _tilt_probs(law, rho_hat, log_normalizer)
    mass = probs.sum() + (law.neg_inf * math.exp(log_normalizer) if rho_hat == 0 else 0.0)
    if not abs(mass - 1.0) <= tol:
        raise NormalizationFailure(
            f"tilted mass is {mass!r}; rho_hat={rho_hat!r} and normalizer "
            f"{log_normalizer!r} are inconsistent with the law")
    neg_inf = law.neg_inf * math.exp(log_normalizer) if rho_hat == 0 else 0.0
    z = DiscreteRealLaw(law.values.copy(), probs, neg_inf)
    return TiltedLaw(law, float(rho_hat), z, float(log_normalizer))


def untilt(tl: TiltedLaw) -> DiscreteRealLaw:
    return tilt(tl.z, -tl.rho_hat, -tl.log_normalizer).z


def tilted_mgf(tl: TiltedLaw, tau: float) -> float:
    """E[exp(tau Z)] under the tilted law."""
    return float(np.dot(tl.z.probs, np.exp(tau * tl.z.values)))
