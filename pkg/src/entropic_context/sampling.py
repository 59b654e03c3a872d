"""Finite-shot simulation of the five pair measurements and plug-in estimates of C.

Counts for a pair (A, B) are keyed by outcome tuples ``(a, b)``; only
(1, 0), (0, 1) and (0, 0) can occur for orthogonal projectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .entropy import evaluate_c_from_marginals
from .errors import ValidationError
from .quantum import PentagonConfig, PureState, Projector, pair_joint_distribution

OUTCOMES = ((1, 0), (0, 1), (0, 0))
CYCLE_EDGES = ((0, 1), (1, 2), (2, 3), (3, 4), (0, 4))


def sample_context(state: PureState, a: Projector, b: Projector, n_shots: int, seed=None) -> dict:
    """Multinomial draw of ``n_shots`` joint measurements of the pair (a, b)."""
    if int(n_shots) != n_shots or n_shots < 1:
        raise ValidationError("n_shots must be a positive integer")
    table = pair_joint_distribution(state, a, b)
    probs = np.array([table[o] for o in OUTCOMES])
    draw = np.random.default_rng(seed).multinomial(int(n_shots), probs / probs.sum())
    return {o: int(k) for o, k in zip(OUTCOMES, draw)}


def sample_pentagon(config: PentagonConfig, n_shots: int, seed=None) -> list[dict]:
    """Counts for the edges (1,2), (2,3), (3,4), (4,5), (1,5); each edge
    uses its own child of ``SeedSequence(seed)``."""
    children = np.random.SeedSequence(seed).spawn(len(CYCLE_EDGES))
    a = config.projectors
    return [
        sample_context(config.state, a[i], a[j], n_shots, child)
        for (i, j), child in zip(CYCLE_EDGES, children)
    ]


def counts_to_table(counts: Mapping) -> np.ndarray:
    t = np.zeros((2, 2))
    for (x, y), k in counts.items():
        if k < 0:
            raise ValidationError("counts must be non-negative")
        t[int(x), int(y)] += k
    total = t.sum()
    if total <= 0:
        raise ValidationError("empty counts")
    return t / total


def _miller_madow_c(tables: np.ndarray, shots: np.ndarray) -> np.ndarray:
    """First-order bias correction (m - 1) / (2 N ln 2) per entropy term."""

    def bins(x, axes):
        return np.sum(x > 0, axis=axes)

    n = shots.astype(float)
    scale = 1.0 / (2.0 * n * math.log(2))
    # H(A|B) = H(A,B) - H(B); correct each piece
    joint = (bins(tables, (-2, -1)) - 1) * scale
    cond_b = (bins(tables.sum(axis=-2), -1) - 1) * scale
    corr = joint - cond_b  # per edge, last axis indexes edges
    return corr[..., -1] - corr[..., :-1].sum(axis=-1)


@dataclass(frozen=True)
class Estimate:
    c_hat: float
    ci_low: float
    ci_high: float
    shots: tuple[int, ...]
    resamples: int

    @property
    def conclusive(self) -> bool:
        """True when the interval lies strictly above zero."""
        return self.ci_low > 0

    def to_dict(self) -> dict:
        return {
            "C_hat": float(f"{self.c_hat:.12g}"),
            "ci_low": float(f"{self.ci_low:.12g}"),
            "ci_high": float(f"{self.ci_high:.12g}"),
            "conclusive": self.conclusive,
            "shots": list(self.shots),
            "resamples": self.resamples,
        }


def estimate_c(
    edge_counts: Sequence[Mapping],
    bootstrap_resamples: int = 1000,
    seed=None,
    *,
    confidence: float = 0.95,
    miller_madow: bool = False,
) -> Estimate:
    """Plug-in estimate of C from cyclic edge counts with a percentile bootstrap CI.

    Counts may be non-integer (e.g. exact expectations); the bootstrap then
    uses the rounded total per edge. Resampling an edge's shots with
    replacement is a multinomial draw from its empirical frequencies.
    """
    if len(edge_counts) < 3:
        raise ValidationError("need counts for at least 3 edges")
    tables = np.array([counts_to_table(c) for c in edge_counts])
    totals = np.array([sum(c.values()) for c in edge_counts], dtype=float)
    c_hat = evaluate_c_from_marginals(list(tables))
    if miller_madow:
        c_hat += float(_miller_madow_c(tables, totals))

    shots = np.maximum(np.rint(totals).astype(int), 1)
    if bootstrap_resamples < 1:
        return Estimate(c_hat, c_hat, c_hat, tuple(int(s) for s in shots), 0)
    children = np.random.SeedSequence(seed).spawn(len(tables))
    boot = np.empty((bootstrap_resamples, len(tables), 2, 2))
    for k, (t, n, child) in enumerate(zip(tables, shots, children)):
        probs = np.array([t[o] for o in OUTCOMES])
        draws = np.random.default_rng(child).multinomial(n, probs / probs.sum(), size=bootstrap_resamples)
        boot[:, k] = 0.0
        for col, (x, y) in enumerate(OUTCOMES):
            boot[:, k, x, y] = draws[:, col] / n
    values = evaluate_c_from_marginals([boot[:, k] for k in range(len(tables))])
    if miller_madow:
        values = values + _miller_madow_c(boot, np.broadcast_to(shots, (bootstrap_resamples, len(tables))))
    alpha = (1.0 - confidence) / 2.0
    lo, hi = np.quantile(values, [alpha, 1.0 - alpha])
    return Estimate(float(c_hat), float(lo), float(hi), tuple(int(s) for s in shots), bootstrap_resamples)
