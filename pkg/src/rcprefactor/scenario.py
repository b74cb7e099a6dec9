"""Channels, decoding metrics, input distributions and joint types.

Alphabets are the index sets ``0..|X|-1`` and ``0..|Y|-1``; symbolic labels
only appear in scenario files.  Probabilities are stored in the linear domain
and every length-``n`` product is taken in the log domain.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import islice
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np
from scipy.special import gammaln

from .errors import (
    ImpossibleType,
    NegativeEntry,
    NotStochastic,
    SymbolOutOfRange,
    ValidationError,
    ZeroPatternMismatch,
)

STOCHASTIC_TOL = 1e-9

SCENARIO_FIELDS = ("W", "q", "Q", "R", "labels_x", "labels_y")


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


def _normalize_rows(mat: np.ndarray, what: str) -> np.ndarray:
    if np.any(mat < 0):
        raise NegativeEntry(f"{what} has a negative entry")
    sums = mat.sum(axis=-1)
    bad = np.abs(sums - 1.0) > STOCHASTIC_TOL
    if np.any(bad):
        idx = np.flatnonzero(np.atleast_1d(bad))[0]
        raise NotStochastic(
            f"{what} row {idx} sums to {np.atleast_1d(sums)[idx]!r}, not 1")
    return mat / sums[..., None] if mat.ndim == 2 else mat / sums


@dataclass(frozen=True)
class Channel:
    w: np.ndarray  # w[x, y] = W(y|x)

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float)
        if w.ndim != 2 or w.size == 0:
            raise ValidationError("channel matrix must be a nonempty 2-D array")
        object.__setattr__(self, "w", _frozen(_normalize_rows(w, "W")))

    @property
    def input_alphabet_size(self) -> int:
        return self.w.shape[0]

    @property
    def output_alphabet_size(self) -> int:
        return self.w.shape[1]


@dataclass(frozen=True)
class Metric:
    q: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float)
        if q.ndim != 2:
            raise ValidationError("metric must be a 2-D array")
        if np.any(q < 0) or not np.all(np.isfinite(q)):
            raise NegativeEntry("metric entries must be finite and nonnegative")
        object.__setattr__(self, "q", _frozen(q))

    def check_against(self, channel: Channel) -> None:
        if self.q.shape != channel.w.shape:
            raise ValidationError(
                f"metric shape {self.q.shape} != channel shape {channel.w.shape}")
        mismatch = (self.q > 0) != (channel.w > 0)
        if np.any(mismatch):
            x, y = np.argwhere(mismatch)[0]
            raise ZeroPatternMismatch(
                f"q({x},{y})={self.q[x, y]!r} but W({y}|{x})={channel.w[x, y]!r}")


@dataclass(frozen=True)
class InputDistribution:
    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise ValidationError("input distribution must be a nonempty vector")
        object.__setattr__(self, "probs", _frozen(_normalize_rows(p, "Q")))


@dataclass(frozen=True)
class Scenario:
    """A validated (W, q, Q) triple together with a rate in nats per use."""

    channel: Channel
    metric: Metric
    input: InputDistribution
    rate: float
    labels_x: tuple[str, ...] | None = None
    labels_y: tuple[str, ...] | None = None
    _joint: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self.metric.check_against(self.channel)
        if self.input.probs.shape[0] != self.channel.input_alphabet_size:
            raise ValidationError("Q length does not match the input alphabet")
        if not (self.rate >= 0 and math.isfinite(self.rate)):
            raise ValidationError(f"rate must be finite and >= 0, got {self.rate!r}")
        for name, labels, size in (("labels_x", self.labels_x, self.nx),
                                   ("labels_y", self.labels_y, self.ny)):
            if labels is not None and len(labels) != size:
                raise ValidationError(f"{name} has {len(labels)} entries, expected {size}")
        object.__setattr__(self, "_joint", _frozen(self.input.probs[:, None] * self.channel.w))

    @property
    def W(self) -> np.ndarray:
        return self.channel.w

    @property
    def q(self) -> np.ndarray:
        return self.metric.q

    @property
    def Q(self) -> np.ndarray:
        return self.input.probs

    @property
    def nx(self) -> int:
        return self.channel.input_alphabet_size

    @property
    def ny(self) -> int:
        return self.channel.output_alphabet_size

    @property
    def joint(self) -> np.ndarray:
        """Q(x)W(y|x) as an |X| x |Y| array."""
        return self._joint

    @property
    def output_marginal(self) -> np.ndarray:
        return self._joint.sum(axis=0)

    @property
    def support_cells(self) -> list[tuple[int, int]]:
        return [tuple(c) for c in np.argwhere(self._joint > 0)]

    def with_rate(self, rate: float) -> "Scenario":
        return Scenario(self.channel, self.metric, self.input, float(rate),
                        self.labels_x, self.labels_y)

    def num_codewords(self, n: int) -> int:
        """M = ceil(exp(nR))."""
        return math.ceil(math.exp(n * self.rate))


def validate_scenario(w, q, Q, rate: float, labels_x=None, labels_y=None) -> Scenario:
    w = np.asarray(w, dtype=float)
    q = np.asarray(q, dtype=float)
    Q = np.asarray(Q, dtype=float)
    if w.ndim != 2 or q.shape != w.shape or Q.shape != (w.shape[0],):
        raise ValidationError(
            f"inconsistent dimensions: W {w.shape}, q {q.shape}, Q {Q.shape}")
    return Scenario(
        Channel(w), Metric(q), InputDistribution(Q), float(rate),
        tuple(labels_x) if labels_x is not None else None,
        tuple(labels_y) if labels_y is not None else None,
    )


# ---------------------------------------------------------------------------
# Scenario files
# ---------------------------------------------------------------------------

def scenario_from_dict(doc: dict, rate: float | None = None) -> Scenario:
    if not isinstance(doc, dict):
        raise ValidationError("scenario document must be a JSON object")
    unknown = sorted(set(doc) - set(SCENARIO_FIELDS))
    if unknown:
        raise ValidationError(f"unknown scenario field(s): {', '.join(unknown)}")
    missing = [k for k in ("W", "q", "Q") if k not in doc]
    if missing:
        raise ValidationError(f"missing scenario field(s): {', '.join(missing)}")
    r = rate if rate is not None else doc.get("R")
    if r is None:
        raise ValidationError("no rate given (field R or explicit override)")
    try:
        return validate_scenario(doc["W"], doc["q"], doc["Q"], float(r),
                                 doc.get("labels_x"), doc.get("labels_y"))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"malformed numeric data: {exc}") from exc


def scenario_to_dict(sc: Scenario) -> dict:
    doc = {"W": sc.W.tolist(), "q": sc.q.tolist(), "Q": sc.Q.tolist(), "R": sc.rate}
    if sc.labels_x is not None:
        doc["labels_x"] = list(sc.labels_x)
    if sc.labels_y is not None:
        doc["labels_y"] = list(sc.labels_y)
    return doc


def load_scenario(path: str | Path, rate: float | None = None) -> Scenario:
    """Read a scenario JSON file.

    Raises ``OSError`` for I/O problems and :class:`ValidationError` (with the
    line and column for syntax errors) for malformed content.
    """
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(
            f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return scenario_from_dict(doc, rate)


def save_scenario(sc: Scenario, path: str | Path) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(sc), indent=2) + "\n")


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class JointType:
    counts: np.ndarray  # counts[x, y]

    def __post_init__(self):
        c = np.asarray(self.counts)
        if c.ndim != 2 or np.any(c < 0) or not np.all(c == np.floor(c)):
            raise ValidationError("joint type counts must be a 2-D array of nonnegative integers")
        object.__setattr__(self, "counts", _frozen(c.astype(np.int64)).astype(np.int64))

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    def y_counts(self) -> np.ndarray:
        return self.counts.sum(axis=0)


def joint_type_log_probability(sc: Scenario, jt: JointType, strict: bool = False) -> float:
    """log P[(X, Y) in T^n(P_XY)] under (Q x W)^n, exactly via multinomials.

    A type with positive count on a zero-probability cell has probability zero;
    ``-inf`` is returned, or :class:`ImpossibleType` raised when ``strict``.
    """
    c = jt.counts
    if c.shape != sc.joint.shape:
        raise ValidationError(f"type shape {c.shape} does not match alphabets {sc.joint.shape}")
    p = sc.joint
    if np.any((c > 0) & (p == 0)):
        if strict:
            raise ImpossibleType("type charges a cell with Q(x)W(y|x) = 0")
        return -math.inf
    n = c.sum()
    mask = c > 0
    log_multinomial = gammaln(n + 1) - gammaln(c[mask] + 1).sum()
    return float(log_multinomial + np.dot(c[mask], np.log(p[mask])))


def compositions(n: int, k: int) -> Iterator[tuple[int, ...]]:
    """All k-tuples of nonnegative integers summing to n, in lexicographic order."""
    if k == 0:
        if n == 0:
            yield ()
        return
    if k == 1:
        yield (n,)
        return
    for first in range(n, -1, -1):
        for rest in compositions(n - first, k - 1):
            yield (first,) + rest


def num_compositions(n: int, k: int) -> int:
    return math.comb(n + k - 1, k - 1) if k > 0 else int(n == 0)


def enumerate_joint_types(sc: Scenario, n: int, start: int = 0,
                          stop: int | None = None) -> Iterator[JointType]:
    """Yield every joint type of blocklength ``n`` over the support cells.

    ``start``/``stop`` select a contiguous index range of the (deterministic)
    enumeration order so disjoint ranges can be handed to different workers.
    """
    if n < 1:
        raise ValidationError("blocklength must be >= 1")
    cells = sc.support_cells
    for comp in islice(compositions(n, len(cells)), start, stop):
        counts = np.zeros(sc.joint.shape, dtype=np.int64)
        for (x, y), c in zip(cells, comp):
            counts[x, y] = c
        yield JointType(counts)


def empirical_type(sequence: Sequence[int], alphabet_size: int) -> np.ndarray:
    seq = np.asarray(sequence)
    if seq.size == 0:
        raise ValidationError("type of an empty sequence is undefined")
    if seq.ndim != 1 or np.any(seq < 0) or np.any(seq >= alphabet_size) \
            or not np.all(seq == np.floor(seq)):
        raise SymbolOutOfRange(f"symbols must lie in 0..{alphabet_size - 1}")
    return np.bincount(seq.astype(np.int64), minlength=alphabet_size) / seq.size


def label_sequence(labels: Sequence[str], symbols: Sequence[str]) -> list[int]:
    """Map symbolic labels (as used in scenario files) to indices."""
    index = {lab: i for i, lab in enumerate(labels)}
    try:
        return [index[s] for s in symbols]
    except KeyError as exc:
        raise SymbolOutOfRange(f"unknown symbol {exc.args[0]!r}") from None
