"""Regular/irregular classification and the type-exponent gap.

A triple (W, q, Q) is regular when some output symbol ``y`` can be reached
from two inputs in the support of Q whose metric values differ.  Such symbols
form the set ``y1``.  For regular triples the minimizer of
``D(P || Q x W) + rho E_P[i_s]`` is an exponential tilt of Q x W, and
constraining the mass P puts on ``y1`` strictly raises the minimum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InfeasibleDelta, IrregularScenario, NotInF, ValidationError
from .scenario import Scenario, empirical_type

METRIC_EQ_RTOL = 1e-12


def compute_y1(sc: Scenario) -> frozenset[int]:
    y1 = set()
    for y in range(sc.ny):
        supported = sc.joint[:, y] > 0
        if supported.sum() < 2:
            continue
        vals = sc.q[supported, y]
        if vals.max() - vals.min() > METRIC_EQ_RTOL * vals.max():
            y1.add(y)
    return frozenset(y1)


def is_regular(sc: Scenario) -> bool:
    return bool(compute_y1(sc))


def _y1_mask(sc: Scenario) -> np.ndarray:
    mask = np.zeros(sc.ny, dtype=bool)
    mask[list(compute_y1(sc))] = True
    return mask


def _require_regular(sc: Scenario) -> frozenset[int]:
    y1 = compute_y1(sc)
    if not y1:
        raise IrregularScenario("no output symbol distinguishes inputs under the metric")
    return y1


def _column_variances(sc: Scenario, s: float) -> np.ndarray:
    """Var[i_s(X_s, y)] with X_s ~ V_s(.|y), for every reachable y (nan otherwise)."""
    from .density import build_density_table  # local: density is heavier than this module

    table = build_density_table(sc, s)
    out = np.full(sc.ny, np.nan)
    for y in range(sc.ny):
        if not table.reachable[y]:
            continue
        iy, vy = table.i[:, y], table.v[:, y]
        m = vy > 0
        mean = np.dot(vy[m], iy[m])
        out[y] = np.dot(vy[m], (iy[m] - mean) ** 2)
    return out


def variance_floor(sc: Scenario, s: float) -> float:
    """min over y in y1 of Var[i_s(X_s, Y) | Y = y]; positive for s > 0."""
    if not s > 0:
        raise ValidationError("variance floor requires s > 0")
    y1 = _require_regular(sc)
    var = _column_variances(sc, s)
    return float(min(var[y] for y in y1))


def conditional_variance(sc: Scenario, s: float, y_seq: Sequence[int]) -> float:
    """Exact Var[i_s^n(X_s, y) | Y = y]: the per-letter variances add."""
    var = _column_variances(sc, s)
    return float(sum(var[y] for y in y_seq))


def in_typical_set(sc: Scenario, y_seq: Sequence[int], delta: float) -> bool:
    """Whether the fraction of letters of ``y_seq`` in y1 strictly exceeds delta."""
    ptype = empirical_type(y_seq, sc.ny)
    return bool(ptype[_y1_mask(sc)].sum() > delta)


def conditional_variance_lower_bound(sc: Scenario, s: float, y_seq: Sequence[int],
                                     delta: float) -> float:
    """Return n * delta * v_s after checking it lower-bounds the exact variance."""
    if not in_typical_set(sc, y_seq, delta):
        raise NotInF(f"fraction of y1 letters does not exceed delta={delta!r}")
    bound = len(y_seq) * delta * variance_floor(sc, s)
    exact = conditional_variance(sc, s, y_seq)
    if exact < bound * (1 - 1e-12):
        raise AssertionError(f"variance {exact!r} below the floor {bound!r}")
    return bound


# ---------------------------------------------------------------------------
# Type exponents
# ---------------------------------------------------------------------------

def _info_density(sc: Scenario, s: float) -> np.ndarray:
    from .density import build_density_table

    return build_density_table(sc, s).i


def type_objective(sc: Scenario, P: np.ndarray, rho: float, s: float) -> float:
    """D(P || Q x W) + rho E_P[i_s(X, Y)] for a joint distribution P."""
    P = np.asarray(P, dtype=float)
    base = sc.joint
    if np.any((P > 0) & (base == 0)):
        return math.inf
    m = P > 0
    i = _info_density(sc, s)
    return float(np.dot(P[m], np.log(P[m] / base[m])) + rho * np.dot(P[m], i[m]))


def optimal_joint_type(sc: Scenario, rho: float, s: float) -> np.ndarray:
    """Closed-form minimizer P* proportional to Q(x)W(y|x) exp(-rho i_s(x, y))."""
    m = sc.joint > 0
    i = _info_density(sc, s)
    logw = np.full(sc.joint.shape, -np.inf)
    logw[m] = np.log(sc.joint[m]) - rho * i[m]
    logw -= logw[m].max()
    w = np.exp(logw)
    return w / w.sum()


def type_exponent_unconstrained(sc: Scenario, rho: float, s: float) -> float:
    return type_objective(sc, optimal_joint_type(sc, rho, s), rho, s)


def constrained_minimizer(sc: Scenario, rho: float, s: float, delta: float) -> np.ndarray | None:
    """Minimizer subject to P_Y(y1) <= delta, or None when the set is empty.

    Writing the objective as D(P || P*) + const, the constrained minimizer
    rescales P* separately on the y1 columns and on the rest so that the y1
    block carries mass exactly delta.  This is the tilt
    P*(x, y) exp(-lam 1{y in y1}) with the multiplier in closed form.
    """
    if not delta > 0:
        raise InfeasibleDelta(f"delta must be > 0, got {delta!r}")
    p_star = optimal_joint_type(sc, rho, s)
    in_y1 = np.broadcast_to(_y1_mask(sc)[None, :], p_star.shape)
    a_star = p_star[in_y1].sum()
    if delta >= a_star:
        return p_star
    if a_star >= 1.0:
        return None
    out = np.where(in_y1, p_star * (delta / a_star), p_star * ((1 - delta) / (1 - a_star)))
    return out


def tilt_multiplier(sc: Scenario, rho: float, s: float, delta: float) -> float:
    """Lagrange multiplier of the y1-mass constraint (0 when slack)."""
    p_star = optimal_joint_type(sc, rho, s)
    a_star = p_star[:, _y1_mask(sc)].sum()
    if delta >= a_star:
        return 0.0
    if a_star >= 1.0:
        return math.inf
    return math.log(a_star * (1 - delta) / (delta * (1 - a_star)))


def type_exponent_constrained(sc: Scenario, rho: float, s: float, delta: float) -> float:
    """Minimum of the type objective over P with P_Y(y1) <= delta.

    Returns ``inf`` when every distribution absolutely continuous w.r.t.
    Q x W has all its output mass in y1 (e.g. a BSC), since the constraint
    set is then empty.
    """
    _require_regular(sc)
    p = constrained_minimizer(sc, rho, s, delta)
    if p is None:
        return math.inf
    return type_objective(sc, p, rho, s)


def select_delta(sc: Scenario, rho: float, s: float) -> tuple[float, int, float]:
    """(delta, y_star, exponent_gap) with delta half the largest P*_Y mass on y1."""
    y1 = sorted(_require_regular(sc))
    p_y = optimal_joint_type(sc, rho, s).sum(axis=0)
    y_star = max(y1, key=lambda y: (p_y[y], -y))
    delta = float(p_y[y_star] / 2)
    gap = (type_exponent_constrained(sc, rho, s, delta)
           - type_exponent_unconstrained(sc, rho, s))
    return delta, int(y_star), float(gap)


@dataclass(frozen=True)
class RegularityReport:
    y1: frozenset[int]
    regular: bool
    v_s: float | None = None
    p_star: np.ndarray | None = None
    y_star: int | None = None
    delta: float | None = None
    exponent_gap: float | None = None

    def to_dict(self) -> dict:
        return {
            "y1": sorted(self.y1),
            "regular": self.regular,
            "v_s": self.v_s,
            "p_star": None if self.p_star is None else self.p_star.tolist(),
            "y_star": self.y_star,
            "delta": self.delta,
            "exponent_gap": _json_float(self.exponent_gap),
        }


def _json_float(x):
    if x is None or math.isfinite(x):
        return x
    return "inf" if x > 0 else "-inf"


def regularity_report(sc: Scenario, rho: float, s: float,
                      delta: float | None = None) -> RegularityReport:
    """Full report at (rho, s); ``delta`` overrides the half-marginal rule."""
    y1 = compute_y1(sc)
    if not y1:
        return RegularityReport(y1, False)
    p_star = optimal_joint_type(sc, rho, s)
    v_s = variance_floor(sc, s) if s > 0 else None
    d, y_star, gap = select_delta(sc, rho, s)
    if delta is not None:
        d = float(delta)
        gap = (type_exponent_constrained(sc, rho, s, d)
               - type_exponent_unconstrained(sc, rho, s))
    return RegularityReport(y1, True, v_s, p_star, y_star, d, gap)
