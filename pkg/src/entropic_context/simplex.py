"""Dense-tableau phase-1 simplex for feasibility of {x >= 0 : A x = b}."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PIVOT_TOL = 1e-10


class SimplexIterationLimit(RuntimeError):
    pass


@dataclass
class Phase1Result:
    x: np.ndarray
    residual: float
    basis: np.ndarray
    dual: np.ndarray
    iterations: int


def phase1(A, b, *, pivot_tol: float = PIVOT_TOL, max_iter: int = 100_000) -> Phase1Result:
    """Minimize the sum of artificial slacks s in A x + s = b, x, s >= 0.

    Uses Bland's rule for both entering and leaving variables, so the
    method terminates on degenerate problems. Redundant equality rows are
    fine: their artificials simply stay basic at zero.

    ``dual`` solves B^T y = c_B for the final basis. When the residual is
    positive it is a Farkas certificate: A^T y <= 0 and b . y > 0.
    """
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float)
    m, n = A.shape
    sign = np.where(b < 0, -1.0, 1.0)
    A = A * sign[:, None]
    b = b * sign

    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = b
    T[m, :n] = -A.sum(axis=0)
    T[m, -1] = -b.sum()
    basis = np.arange(n, n + m)

    it = 0
    while True:
        candidates = np.flatnonzero(T[m, :-1] < -pivot_tol)
        if candidates.size == 0:
            break
        if it >= max_iter:
            raise SimplexIterationLimit(f"no convergence after {max_iter} pivots")
        col = candidates[0]
        column = T[:m, col]
        rows = np.flatnonzero(column > pivot_tol)
        if rows.size == 0:
            # cannot happen for a bounded phase-1 objective
            raise RuntimeError("phase-1 objective unbounded")
        ratios = T[rows, -1] / column[rows]
        best = ratios.min()
        tied = rows[ratios <= best + 1e-12 * max(1.0, abs(best))]
        row = tied[np.argmin(basis[tied])]
        T[row] /= T[row, col]
        others = np.arange(m + 1) != row
        T[others] -= np.outer(T[others, col], T[row])
        basis[row] = col
        it += 1

    full = np.zeros(n + m)
    full[basis] = T[:m, -1]
    x = np.clip(full[:n], 0.0, None)
    residual = max(-T[m, -1], 0.0)

    B = np.hstack([A, np.eye(m)])[:, basis]
    c_b = (basis >= n).astype(float)
    y, *_ = np.linalg.lstsq(B.T, c_b, rcond=None)
    return Phase1Result(x=x, residual=float(residual), basis=basis.copy(), dual=y * sign, iterations=it)
