"""Finite-blocklength upper bounds on the random-coding error probability.

The exact RCU evaluator groups output sequences by their type.  Given the
output type, the transmitted-codeword score i_s^n(X, y) and the competitor
score i_s^n(Xbar, y) are sums of independent per-letter terms whose laws only
depend on the output letter, so both conditional laws are convolutions of
per-symbol powers.  Powers are built once; partial convolutions are shared
along a depth-first walk over output types.
"""

from __future__ import annotations

import enum
import io
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import gammaln, logsumexp

from .density import (build_density_table, competitor_spectrum,
                      conditional_forward_spectrum)
from .errors import BudgetExceeded, ValidationError, ZeroVariance
from .exponents import ExponentReport, error_exponent
from .laws import (DEFAULT_ATOM_CAP, DiscreteRealLaw, convolution_powers,
                   convolve_n, law_moments)
from .scenario import Scenario, enumerate_joint_types, num_compositions

DEFAULT_TYPE_BUDGET = 2_000_000


class BoundKind(str, enum.Enum):
    RCU_EXACT = "RCU_EXACT"
    RCU_MC = "RCU_MC"
    GALLAGER = "GALLAGER"
    THEOREM_SHAPE = "THEOREM_SHAPE"


@dataclass(frozen=True)
class BoundCurve:
    n_values: tuple[int, ...]
    log_bound: tuple[float, ...]
    kind: BoundKind

    def __post_init__(self):
        if len(self.n_values) != len(self.log_bound):
            raise ValidationError("n_values and log_bound differ in length")
        if any(math.isnan(v) or v == math.inf for v in self.log_bound):
            raise ValidationError("log bounds must be finite or -inf")

    def to_csv(self, header: bool = True) -> str:
        buf = io.StringIO()
        if header:
            buf.write("n,log_bound,kind\n")
        for n, v in zip(self.n_values, self.log_bound):
            buf.write(f"{n},{v!r},{self.kind.value}\n")
        return buf.getvalue()


def _log_m_minus_1(M: int) -> float:
    return math.log(M - 1) if M > 1 else -math.inf


def _expected_min(fwd: DiscreteRealLaw, comp: DiscreteRealLaw, log_m1: float) -> float:
    """log E[min{1, (M-1) P[comp >= T]}] with T ~ fwd."""
    tails = comp.tail_ge(fwd.values)
    with np.errstate(divide="ignore"):
        inner = np.minimum(0.0, log_m1 + np.log(tails))
    with np.errstate(divide="ignore"):
        return float(logsumexp(inner + np.log(fwd.probs)))


def rcu_exact(sc: Scenario, s: float, n: int, M: int | None = None,
              type_budget: int = DEFAULT_TYPE_BUDGET,
              atom_cap: int = DEFAULT_ATOM_CAP) -> float:
    """log of E[min{1, (M-1) P[i_s^n(Xbar, Y) >= i_s^n(X, Y) | X, Y]}].

    ``M`` defaults to ceil(exp(nR)).  Returns ``-inf`` when M = 1.  Raises
    :class:`BudgetExceeded` when the number of output types exceeds
    ``type_budget`` or a convolution exceeds ``atom_cap`` atoms.
    """
    if n < 1:
        raise ValidationError("blocklength must be >= 1")
    M = sc.num_codewords(n) if M is None else int(M)
    log_m1 = _log_m_minus_1(M)
    if log_m1 == -math.inf:
        return -math.inf
    table = build_density_table(sc, s)
    p_y = sc.output_marginal
    ys = [y for y in range(sc.ny) if p_y[y] > 0]
    n_types = num_compositions(n, len(ys))
    if n_types > type_budget:
        raise BudgetExceeded(f"{n_types} output types exceed budget {type_budget}; "
                             "use the Monte Carlo RCU estimator")
    fwd_pow = [convolution_powers(conditional_forward_spectrum(table, sc, y), n, atom_cap)
               for y in ys]
    comp_pow = [convolution_powers(competitor_spectrum(table, sc, y), n, atom_cap)
                for y in ys]
    log_py = np.log(p_y[ys])
    log_terms: list[float] = []
    last = len(ys) - 1

    def walk(d: int, remaining: int, fwd: DiscreteRealLaw, comp: DiscreteRealLaw,
             logw: float) -> None:
        counts = [remaining] if d == last else range(remaining, -1, -1)
        for k in counts:
            f = fwd.convolve(fwd_pow[d][k], atom_cap)
            c = comp.convolve(comp_pow[d][k], atom_cap)
            w = logw + k * log_py[d] - gammaln(k + 1)
            if d == last:
                log_terms.append(w + _expected_min(f, c, log_m1))
            else:
                walk(d + 1, remaining - k, f, c, w)

    point = DiscreteRealLaw.point(0.0)
    walk(0, n, point, point, float(gammaln(n + 1)))
    return float(logsumexp(log_terms))


def rcu_joint_types(sc: Scenario, s: float, n: int, M: int | None = None) -> float:
    """Same quantity as :func:`rcu_exact`, by direct enumeration of joint types.

    The threshold is linear in the joint type and the competitor law depends
    only on the output type.  Practical for small n only.
    """
    from .scenario import joint_type_log_probability

    M = sc.num_codewords(n) if M is None else int(M)
    log_m1 = _log_m_minus_1(M)
    if log_m1 == -math.inf:
        return -math.inf
    table = build_density_table(sc, s)
    comp_cache: dict[tuple[int, ...], DiscreteRealLaw] = {}
    comp1 = {y: competitor_spectrum(table, sc, y)
             for y in range(sc.ny) if sc.output_marginal[y] > 0}
    terms = []
    for jt in enumerate_joint_types(sc, n):
        yc = tuple(int(c) for c in jt.y_counts())
        if yc not in comp_cache:
            law = DiscreteRealLaw.point(0.0)
            for y, k in enumerate(yc):
                if k:
                    law = law.convolve(convolve_n(comp1[y], k))
            comp_cache[yc] = law
        mask = jt.counts > 0
        t = float(np.dot(jt.counts[mask], table.i[mask]))
        tail = comp_cache[yc].tail_ge([t])[0]
        with np.errstate(divide="ignore"):
            inner = min(0.0, log_m1 + math.log(tail) if tail > 0 else -math.inf)
        terms.append(joint_type_log_probability(sc, jt) + inner)
    return float(logsumexp(terms))


def gallager_bound(report: ExponentReport | Scenario, n: int) -> float:
    """log of exp(-n E_r)."""
    if isinstance(report, Scenario):
        report = error_exponent(report)
    return -n * report.e_r


def berry_esseen_tail(law: DiscreteRealLaw, n: int, t: float,
                      atom_cap: int = DEFAULT_ATOM_CAP) -> tuple[float, float]:
    """Exact E[exp(-S) 1{S > t}] for S an n-fold i.i.d. sum, and its tail bound.

    The bound is 2 (log 2 / sqrt(2 pi) + 12 T / sigma^2) exp(-t) / sigma with
    sigma^2 = n Var and T = n E|Z - EZ|^3.  Raises AssertionError if violated.
    """
    if n < 1:
        raise ValidationError("n must be >= 1")
    _, var, t3 = law_moments(law)
    if var <= 0:
        raise ZeroVariance("tail bound needs a law with positive variance")
    total = convolve_n(law, n, atom_cap)
    sel = total.values > t
    if sel.any():
        lhs = float(np.exp(logsumexp(np.log(total.probs[sel]) - total.values[sel])))
    else:
        lhs = 0.0
    sigma2 = n * var
    T = n * t3
    sigma = math.sqrt(sigma2)
    rhs = 2 * (math.log(2) / math.sqrt(2 * math.pi) + 12 * T / sigma2) / sigma * math.exp(-t)
    if lhs > rhs:
        raise AssertionError(f"tail bound violated: {lhs!r} > {rhs!r}")
    return lhs, rhs


def theorem_shape(report: ExponentReport, n_values: Sequence[int]) -> BoundCurve:
    """alpha_order log n - n E_r, i.e. the prefactor shape with K = 1."""
    ns = tuple(int(n) for n in n_values)
    vals = tuple(report.alpha_order * math.log(n) - n * report.e_r for n in ns)
    return BoundCurve(ns, vals, BoundKind.THEOREM_SHAPE)


def gallager_curve(report: ExponentReport, n_values: Sequence[int]) -> BoundCurve:
    ns = tuple(int(n) for n in n_values)
    return BoundCurve(ns, tuple(gallager_bound(report, n) for n in ns), BoundKind.GALLAGER)


def rcu_curve(sc: Scenario, s: float, n_values: Sequence[int], **kw) -> BoundCurve:
    ns = tuple(int(n) for n in n_values)
    return BoundCurve(ns, tuple(rcu_exact(sc, s, n, **kw) for n in ns), BoundKind.RCU_EXACT)
