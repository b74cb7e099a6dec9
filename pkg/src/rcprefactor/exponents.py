"""Random-coding exponent, GMI, critical rate and the prefactor regime.

Everything is evaluated exactly over the finite joint support.  For a fixed
``s`` the function ``rho -> E0(rho, s)`` is a cumulant generating function
(negated), so its rho-derivatives are tilted moments of i_s(X, Y); the
``s``-derivative is likewise a tilted expectation, which lets the optimizers
solve first-order conditions with a root finder instead of comparing noisy
function values.
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar
from scipy.special import logsumexp

from .regularity import is_regular
from .scenario import Scenario

S_GRID_POINTS = 64
S_GRID_MIN = 1e-3
S_MAX_START = 4.0
_ROOT_XTOL = 1e-15


class Regime(str, enum.Enum):
    REG_HIGH = "REG_HIGH"
    REG_LOW = "REG_LOW"
    IRR_HIGH = "IRR_HIGH"
    IRR_LOW = "IRR_LOW"


@dataclass(frozen=True)
class ExponentReport:
    rate: float
    e_r: float
    rho_hat: float
    s_star: float
    r_cr: float
    i_gmi: float
    regular: bool
    regime: Regime
    alpha_order: float

    def to_dict(self) -> dict:
        d = asdict(self)
        d["regime"] = self.regime.value
        return d


# ---------------------------------------------------------------------------
# Per-letter kernels
# ---------------------------------------------------------------------------

def _support(sc: Scenario):
    mask = sc.joint > 0
    return mask, sc.joint[mask]


def _density_terms(sc: Scenario, s: np.ndarray):
    """i_s and d i_s / ds on the support cells for an array of s values.

    Returns arrays of shape ``(len(s), n_cells)``.
    """
    s = np.atleast_1d(np.asarray(s, dtype=float))
    mask, _ = _support(sc)
    with np.errstate(divide="ignore", invalid="ignore"):
        return _density_terms_raw(sc, s, mask)


def _density_terms_raw(sc: Scenario, s: np.ndarray, mask: np.ndarray):
    logq = np.log(sc.q)
    logQ = np.log(sc.Q)
    # weighted[k, x, y] = log Q(x) + s_k log q(x, y); q = 0 cells drop out for s > 0
    lq_s = np.where(sc.q > 0, s[:, None, None] * np.where(sc.q > 0, logq, 0.0), -np.inf)
    lq_s = np.where(s[:, None, None] == 0, 0.0, lq_s)
    weighted = logQ[None, :, None] + lq_s
    log_den = logsumexp(weighted, axis=1)  # (k, y)
    v = np.exp(weighted - log_den[:, None, :])
    safe_logq = np.where(sc.q > 0, logq, 0.0)
    e_logq = np.einsum("kxy,xy->ky", np.where(v > 0, v, 0.0), safe_logq)
    i = lq_s - log_den[:, None, :]
    di = safe_logq[None] - e_logq[:, None, :]
    return i[:, mask], di[:, mask]


def _tilted_weights(logp: np.ndarray, i: np.ndarray, rho: float):
    a = logp - rho * i
    lse = logsumexp(a, axis=-1, keepdims=True)
    return np.exp(a - lse), -lse[..., 0]


def e0(sc: Scenario, rho: float, s: float) -> float:
    """E0(rho, s) = -log E[exp(-rho i_s(X, Y))], (X, Y) ~ Q x W."""
    _, p = _support(sc)
    i, _ = _density_terms(sc, [s])
    return float(-logsumexp(np.log(p) - rho * i[0]))


def _e0_grid(sc: Scenario, rho: float, s: np.ndarray) -> np.ndarray:
    _, p = _support(sc)
    i, _ = _density_terms(sc, s)
    return -logsumexp(np.log(p)[None] - rho * i, axis=1)


def _de0_ds(sc: Scenario, rho: float, s: float) -> float:
    _, p = _support(sc)
    i, di = _density_terms(sc, [s])
    w, _ = _tilted_weights(np.log(p), i[0], rho)
    return float(rho * np.dot(w, di[0]))


def e0_derivatives(sc: Scenario, rho: float, s: float) -> tuple[float, float]:
    """(dE0/drho, d^2E0/drho^2) at fixed s: tilted mean and minus tilted variance of i_s."""
    _, p = _support(sc)
    i, _ = _density_terms(sc, [s])
    w, _ = _tilted_weights(np.log(p), i[0], rho)
    mean = float(np.dot(w, i[0]))
    var = float(np.dot(w, (i[0] - mean) ** 2))
    return mean, -var


# ---------------------------------------------------------------------------
# Optimization over s
# ---------------------------------------------------------------------------

def _find_s_max(f) -> float:
    s = S_MAX_START
    prev = f(s)
    drops = 0
    while drops < 2 and s < 1e6:
        s *= 2
        cur = f(s)
        drops = drops + 1 if cur < prev else 0
        prev = cur
    return s


def _local_max(f, df, lo: float, hi: float) -> float:
    """Maximizer of ``f`` on [lo, hi] using the sign of ``df`` when it brackets a root."""
    dlo, dhi = df(lo), df(hi)
    if dlo > 0 > dhi:
        return brentq(df, lo, hi, xtol=_ROOT_XTOL, rtol=4 * np.finfo(float).eps)
    res = minimize_scalar(lambda t: -f(t), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-12})
    return float(res.x)


def _sup_over_s(f_scalar, f_grid, df) -> tuple[float, float]:
    s_max = _find_s_max(f_scalar)
    grid = np.geomspace(S_GRID_MIN, s_max, S_GRID_POINTS)
    vals = f_grid(grid)
    k = int(np.argmax(vals))
    lo = grid[k - 1] if k > 0 else 1e-9
    hi = grid[k + 1] if k + 1 < grid.size else grid[k]
    s_loc = _local_max(f_scalar, df, lo, hi)
    v_loc = f_scalar(s_loc)
    if v_loc >= vals[k]:
        return v_loc, s_loc
    return float(vals[k]), float(grid[k])


def e0_sup_s(sc: Scenario, rho: float) -> tuple[float, float]:
    """(sup_s E0(rho, s), maximizing s).

    Irregular scenarios make every s > 0 equivalent; s = 1 is returned.  At
    rho = 0 the objective is identically zero and s = 1 is returned as well.
    """
    if rho == 0:
        return 0.0, 1.0
    if not is_regular(sc):
        return e0(sc, rho, 1.0), 1.0
    return _sup_over_s(lambda s: e0(sc, rho, s),
                       lambda g: _e0_grid(sc, rho, g),
                       lambda s: _de0_ds(sc, rho, s))


def gmi_with_s(sc: Scenario) -> tuple[float, float]:
    """(I_GMI, maximizing s).  E[i_s(X, Y)] is concave in s."""
    _, p = _support(sc)

    def f(s):
        i, _ = _density_terms(sc, [s])
        return float(np.dot(p, i[0]))

    def df(s):
        _, di = _density_terms(sc, [s])
        return float(np.dot(p, di[0]))

    if not is_regular(sc):
        return f(1.0), 1.0
    lo = 1e-9
    if df(lo) <= 0:
        return max(f(lo), 0.0), lo
    hi = 1.0
    while df(hi) > 0:
        hi *= 2
        if hi > 1e8:
            return f(hi), hi
    s = brentq(df, lo if hi == 1.0 else hi / 2, hi, xtol=_ROOT_XTOL,
               rtol=4 * np.finfo(float).eps)
    return f(s), float(s)


def gmi(sc: Scenario) -> float:
    return gmi_with_s(sc)[0]


# ---------------------------------------------------------------------------
# Optimization over rho
# ---------------------------------------------------------------------------

def _slope_at(sc: Scenario, rho: float) -> tuple[float, float]:
    """Derivative of sup_s E0 at rho (envelope theorem) and the maximizing s."""
    _, s = e0_sup_s(sc, rho)
    return e0_derivatives(sc, rho, s)[0], s


def critical_rate(sc: Scenario) -> float:
    """Largest R with rho_hat(R) = 1, i.e. the slope of sup_s E0 at rho = 1."""
    return max(_slope_at(sc, 1.0)[0], 0.0)


def optimal_rho(sc: Scenario, i_gmi: float | None = None) -> float:
    R = sc.rate
    if i_gmi is None:
        i_gmi = gmi(sc)
    if R >= i_gmi:
        return 0.0
    if _slope_at(sc, 1.0)[0] >= R:
        return 1.0

    def h(rho):
        if rho == 0:
            return i_gmi - R
        return _slope_at(sc, rho)[0] - R

    return float(brentq(h, 0.0, 1.0, xtol=_ROOT_XTOL, rtol=4 * np.finfo(float).eps))


def prefactor_regime(regular: bool, rate: float, r_cr: float,
                     rho_hat: float) -> tuple[Regime, float]:
    """Regime and exponent of n in the prefactor.  R = R_cr belongs to the low-rate case."""
    low = rate <= r_cr
    if regular:
        return (Regime.REG_LOW, -0.5) if low else (Regime.REG_HIGH, -(1 + rho_hat) / 2)
    return (Regime.IRR_LOW, 0.0) if low else (Regime.IRR_HIGH, -0.5)


def error_exponent(sc: Scenario) -> ExponentReport:
    i_gmi = gmi(sc)
    rho_hat = optimal_rho(sc, i_gmi)
    value, s_star = e0_sup_s(sc, rho_hat)
    e_r = max(value - rho_hat * sc.rate, 0.0)
    if rho_hat == 0:
        e_r = 0.0
    r_cr = critical_rate(sc)
    regular = is_regular(sc)
    regime, alpha = prefactor_regime(regular, sc.rate, r_cr, rho_hat)
    return ExponentReport(sc.rate, e_r, rho_hat, s_star, r_cr, i_gmi,
                          regular, regime, alpha)


def mutual_information(sc: Scenario) -> float:
    p = sc.joint
    py = sc.output_marginal
    mask = p > 0
    ratio = p[mask] / (sc.Q[:, None] * py[None, :])[mask]
    return float(np.dot(p[mask], np.log(ratio)))
