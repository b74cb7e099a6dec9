"""Reference channels used throughout the tests, the acceptance suite and the README."""

from __future__ import annotations

import numpy as np

from .scenario import Scenario, validate_scenario


def bsc(p: float = 0.11, rate: float = 0.3, q=None, Q=None) -> Scenario:
    w = np.array([[1 - p, p], [p, 1 - p]])
    return validate_scenario(w, w if q is None else q,
                             [0.5, 0.5] if Q is None else Q, rate)


def bec(eps: float = 0.5, rate: float = 0.15, q=None, Q=None) -> Scenario:
    """Binary erasure channel with outputs (0, 1, e)."""
    w = np.array([[1 - eps, 0.0, eps], [0.0, 1 - eps, eps]])
    return validate_scenario(w, w if q is None else q,
                             [0.5, 0.5] if Q is None else Q, rate,
                             labels_x=["0", "1"], labels_y=["0", "1", "e"])


def noiseless_binary(rate: float = 0.3) -> Scenario:
    w = np.eye(2)
    return validate_scenario(w, w, [0.5, 0.5], rate)


MISMATCHED_W = [[0.7, 0.2, 0.1], [0.1, 0.2, 0.7]]
MISMATCHED_Q = [[1.0, 0.5, 0.1], [0.1, 0.5, 1.0]]


def mismatched_2x3(rate: float = 0.1) -> Scenario:
    return validate_scenario(MISMATCHED_W, MISMATCHED_Q, [0.5, 0.5], rate)


def ml_2x3(rate: float = 0.1) -> Scenario:
    return validate_scenario(MISMATCHED_W, MISMATCHED_W, [0.5, 0.5], rate)
