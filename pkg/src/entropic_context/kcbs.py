"""Pentagram (KCBS) inequality in probability form: sum_i p(A_i = 1) <= 2."""

from __future__ import annotations

import itertools
from typing import NamedTuple

import numpy as np

from .graphs import JointDistribution, marginalize
from .quantum import PentagonConfig

CLASSICAL_BOUND = 2


class KcbsValue(NamedTuple):
    sum: float
    violation: float


def kcbs_value(config: PentagonConfig) -> KcbsValue:
    total = float(np.sum(config.probabilities()))
    return KcbsValue(total, total - CLASSICAL_BOUND)


def kcbs_sum_from_jpd(jpd: JointDistribution) -> float:
    """Expected number of clicks under a classical model of the five outcomes."""
    return float(sum(marginalize(jpd, (v,)).table[1] for v in jpd.variables))


def admissible_assignments(n: int = 5) -> list[tuple[int, ...]]:
    """Deterministic 0/1 assignments with no two cyclically adjacent ones."""
    return [
        bits
        for bits in itertools.product((0, 1), repeat=n)
        if not any(bits[i] and bits[(i + 1) % n] for i in range(n))
    ]


def classical_kcbs_bound_check(n: int = 5) -> int:
    """Maximum click count over admissible deterministic assignments (2 for n = 5)."""
    return max(sum(bits) for bits in admissible_assignments(n))
