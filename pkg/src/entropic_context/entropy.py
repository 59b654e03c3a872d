"""Shannon entropies in bits and the entropic contextual inequality.

The kernels accept stacked inputs: a distribution is the last axis of an
array, a two-variable table the last two axes. This lets the grid scan and
the bootstrap evaluate many tables in one call.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import IncompatibleContextError, ValidationError
from .quantum import ORTHO_TOL, PentagonConfig, PureState, Projector, overlap, pair_joint_distribution

ZERO_CUTOFF = 1e-15
MASS_TOL = 1e-9


def _plogp(p: np.ndarray) -> np.ndarray:
    out = np.zeros_like(p)
    nz = p > ZERO_CUTOFF
    out[nz] = p[nz] * np.log2(p[nz])
    return out


def _validated(p, min_ndim: int) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim < min_ndim:
        raise ValidationError(f"expected at least {min_ndim} axes, got {p.ndim}")
    if not np.all(np.isfinite(p)) or p.size and p.min() < -1e-12:
        raise ValidationError("probabilities must be finite and non-negative")
    mass = p.sum(axis=tuple(range(p.ndim - min_ndim, p.ndim)))
    if np.any(np.abs(mass - 1.0) > MASS_TOL):
        raise ValidationError("distribution is not normalized")
    return np.clip(p, 0.0, None)


def shannon_entropy(d) -> float | np.ndarray:
    """H(X) = -sum p log2 p over the last axis, with 0 log 0 = 0."""
    p = _validated(d, 1)
    h = -_plogp(p).sum(axis=-1)
    return float(h) if h.ndim == 0 else h


def joint_entropy(joint) -> float | np.ndarray:
    p = _validated(joint, 2)
    h = -_plogp(p).sum(axis=(-2, -1))
    return float(h) if h.ndim == 0 else h


def conditional_entropy(joint) -> float | np.ndarray:
    """H(first | second) = sum_b p(b) H(first | second = b).

    ``joint[..., a, b]`` is p(first = a, second = b). Columns with
    p(b) = 0 contribute nothing.
    """
    p = _validated(joint, 2)
    pb = p.sum(axis=-2)
    safe = np.where(pb > ZERO_CUTOFF, pb, 1.0)
    cond = p / safe[..., None, :]
    h_given_b = -_plogp(cond).sum(axis=-2)
    h = np.where(pb > ZERO_CUTOFF, pb * h_given_b, 0.0).sum(axis=-1)
    return float(h) if h.ndim == 0 else h


@dataclass(frozen=True)
class EntropyReport:
    h_a1_given_a5: float
    rhs_terms: tuple[float, float, float, float]
    c_value: float

    @property
    def violated(self) -> bool:
        return self.c_value > 0

    def to_dict(self, digits: int = 12) -> dict:
        fmt = lambda x: float(f"{x:.{digits}g}")
        names = ["H(A1|A2)", "H(A2|A3)", "H(A3|A4)", "H(A4|A5)"]
        return {
            "H(A1|A5)": fmt(self.h_a1_given_a5),
            **{k: fmt(v) for k, v in zip(names, self.rhs_terms)},
            "C": fmt(self.c_value),
        }


def cyclic_tables(config: PentagonConfig) -> list[np.ndarray]:
    """Pair tables for edges (1,2), (2,3), (3,4), (4,5), (1,5) in that axis order."""
    s, a = config.state, config.projectors
    return [pair_joint_distribution(s, a[i], a[i + 1]) for i in range(4)] + [
        pair_joint_distribution(s, a[0], a[4])
    ]


def _c_from_tables(tables: Sequence[np.ndarray]) -> tuple[np.ndarray, list[np.ndarray]]:
    lhs = conditional_entropy(tables[-1])
    rhs = [conditional_entropy(t) for t in tables[:-1]]
    return lhs, rhs


def evaluate_c(config: PentagonConfig) -> EntropyReport:
    """C = H(A1|A5) - H(A1|A2) - H(A2|A3) - H(A3|A4) - H(A4|A5) in bits.

    A positive value certifies that no joint distribution of the five
    outcomes exists.
    """
    lhs, rhs = _c_from_tables(cyclic_tables(config))
    return EntropyReport(float(lhs), tuple(float(r) for r in rhs), float(lhs - sum(rhs)))


def _h(*ps: float) -> float:
    return -sum(p * math.log2(p) for p in ps if p > ZERO_CUTOFF)


def c_from_click_probabilities(p: Sequence[float]) -> float:
    """C for five cyclically orthogonal projectors given only p(A_i = 1).

    For an orthogonal pair the joint table is fixed by the two click
    probabilities, so H(A|B) = H(pa, pb, 1 - pa - pb) - H(pb, 1 - pb).
    Scalar fast path used inside optimizer loops.
    """
    def cond(pa: float, pb: float) -> float:
        return _h(pa, pb, max(0.0, 1.0 - pa - pb)) - _h(pb, 1.0 - pb)

    p1, p2, p3, p4, p5 = (min(max(float(x), 0.0), 1.0) for x in p)
    return cond(p1, p5) - cond(p1, p2) - cond(p2, p3) - cond(p3, p4) - cond(p4, p5)


def evaluate_c_from_marginals(pair_tables: Sequence) -> float | np.ndarray:
    """H(A1|An) - sum_{i<n} H(Ai|Ai+1) for an n-cycle of pair tables.

    ``pair_tables`` lists the edges (1,2), (2,3), ..., (n-1,n), (1,n); the
    first axis of each table belongs to the lower-numbered variable.
    Tables may carry leading batch axes.
    """
    tables = [np.asarray(t, dtype=float) for t in pair_tables]
    if len(tables) < 3:
        raise ValidationError("need at least 3 edges")
    for k, t in enumerate(tables):
        if t.shape[-2:] != (2, 2):
            raise ValidationError(f"table {k} has shape {t.shape}, expected (..., 2, 2)")
    lhs, rhs = _c_from_tables(tables)
    c = lhs - sum(rhs)
    return float(c) if np.ndim(c) == 0 else c


def coplanar_conditional_entropy_zero(state: PureState, a: Projector, b: Projector) -> tuple[bool, float]:
    """Whether psi lies in span{a, b}, and H(A|B) for the pair.

    Coplanarity forces p(A=1) + p(B=1) = 1, so each outcome of B fixes A and
    the conditional entropy vanishes.
    """
    if abs(overlap(a, b)) > ORTHO_TOL:
        raise IncompatibleContextError("a and b must be orthogonal")
    psi = state.vector
    resid = psi - a.vector * np.vdot(a.vector, psi) - b.vector * np.vdot(b.vector, psi)
    h = conditional_entropy(pair_joint_distribution(state, a, b))
    return bool(np.linalg.norm(resid) <= ORTHO_TOL), float(h)
