"""Does a global joint distribution reproduce the given pairwise tables?

The unknowns are the 2^n probabilities of a joint table; each edge adds
four marginal equations and one row fixes the total mass.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .entropy import cyclic_tables
from .errors import ValidationError
from .graphs import JointDistribution, marginalize
from .quantum import PentagonConfig
from .simplex import phase1

FEASIBILITY_TOL = 1e-7
MAX_VARIABLES = 12
FEASIBLE = "feasible"
INFEASIBLE = "infeasible"


@dataclass(frozen=True, eq=False)
class FeasibilityProblem:
    n: int
    edges: tuple[tuple[int, int], ...]
    tables: tuple[np.ndarray, ...]

    def __post_init__(self):
        if not 1 <= self.n <= MAX_VARIABLES:
            raise ValidationError(f"n must be in 1..{MAX_VARIABLES}")
        edges = tuple((int(i), int(j)) for i, j in self.edges)
        tables = tuple(np.array(t, dtype=float) for t in self.tables)
        if len(edges) != len(tables):
            raise ValidationError("one table per edge required")
        for (i, j), t in zip(edges, tables):
            if i == j or not (0 <= i < self.n and 0 <= j < self.n):
                raise ValidationError(f"bad edge ({i}, {j})")
            if t.shape != (2, 2) or not np.all(np.isfinite(t)) or t.min() < -1e-12:
                raise ValidationError(f"edge ({i}, {j}): table must be a non-negative 2x2 array")
            if abs(t.sum() - 1.0) > 1e-9:
                raise ValidationError(f"edge ({i}, {j}): table not normalized")
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "tables", tables)

    @classmethod
    def from_jpd(cls, jpd: JointDistribution, edges: Sequence[tuple[int, int]]) -> "FeasibilityProblem":
        if jpd.variables != tuple(range(len(jpd.variables))):
            raise ValidationError("joint distribution variables must be 0..n-1")
        return cls(len(jpd.variables), tuple(edges), tuple(marginalize(jpd, e).table for e in edges))

    @classmethod
    def from_config(cls, config: PentagonConfig) -> "FeasibilityProblem":
        tables = cyclic_tables(config)
        edges = ((0, 1), (1, 2), (2, 3), (3, 4), (0, 4))
        return cls(5, edges, tuple(tables))

    def constraints(self) -> tuple[np.ndarray, np.ndarray]:
        """Equality system A q = b over the 2^n joint probabilities."""
        outcomes = np.array(list(itertools.product((0, 1), repeat=self.n)), dtype=int)
        rows = [np.ones(len(outcomes))]
        rhs = [1.0]
        for (i, j), t in zip(self.edges, self.tables):
            for a, c in itertools.product((0, 1), repeat=2):
                rows.append(((outcomes[:, i] == a) & (outcomes[:, j] == c)).astype(float))
                rhs.append(t[a, c])
        return np.array(rows), np.array(rhs)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "edges": [list(e) for e in self.edges],
            "tables": [t.tolist() for t in self.tables],
        }

    @classmethod
    def from_dict(cls, data) -> "FeasibilityProblem":
        try:
            return cls(int(data["n"]), tuple(tuple(e) for e in data["edges"]), tuple(data["tables"]))
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed feasibility problem: {exc}") from exc


@dataclass(frozen=True, eq=False)
class FeasibilityResult:
    status: str
    residual: float
    witness: JointDistribution | None = None
    witness_residual: float | None = None
    certificate: np.ndarray | None = field(default=None, repr=False)

    @property
    def feasible(self) -> bool:
        return self.status == FEASIBLE

    def to_dict(self) -> dict:
        out = {"status": self.status, "residual": float(f"{self.residual:.3g}")}
        if self.witness is not None:
            out["witness"] = self.witness.to_dict()
            out["witness_residual"] = float(f"{self.witness_residual:.3g}")
        return out


def jpd_exists(p: FeasibilityProblem) -> FeasibilityResult:
    A, b = p.constraints()
    sol = phase1(A, b)
    if sol.residual > FEASIBILITY_TOL:
        return FeasibilityResult(INFEASIBLE, sol.residual, certificate=sol.dual)
    q = sol.x / sol.x.sum()
    witness = JointDistribution(tuple(range(p.n)), q.reshape((2,) * p.n))
    err = max(
        (float(np.max(np.abs(marginalize(witness, e).table - t))) for e, t in zip(p.edges, p.tables)),
        default=0.0,
    )
    return FeasibilityResult(FEASIBLE, sol.residual, witness, err)


def brute_force_feasibility_oracle(p: FeasibilityProblem, tol: float = 1e-9) -> str:
    """Decide feasibility by enumerating basic solutions of A q = b.

    If the polytope is non-empty it has a vertex, and every vertex is the
    unique solution on some set of rank(A) linearly independent columns.
    All such column sets are tried in one batched solve.
    """
    if p.n > 4:
        raise ValidationError("brute-force oracle supports n <= 4")
    outcomes = list(np.ndindex(*(2,) * p.n))
    A = [[1.0] * len(outcomes)]
    b = [1.0]
    for (i, j), t in zip(p.edges, p.tables):
        for a in (0, 1):
            for c in (0, 1):
                A.append([float(x[i] == a and x[j] == c) for x in outcomes])
                b.append(t[a][c])
    A, b = np.array(A), np.array(b)
    # keep a maximal independent set of rows
    rows: list[int] = []
    for r in range(A.shape[0]):
        if np.linalg.matrix_rank(A[rows + [r]]) > len(rows):
            rows.append(r)
    rank = len(rows)
    Ar, br = A[rows], b[rows]
    subsets = np.array(list(itertools.combinations(range(A.shape[1]), rank)))
    mats = Ar[:, subsets].transpose(1, 0, 2)
    ok = np.abs(np.linalg.det(mats)) > 1e-9
    mats, subsets = mats[ok], subsets[ok]
    if not len(mats):
        return INFEASIBLE
    sols = np.linalg.solve(mats, np.broadcast_to(br, (len(mats), rank))[..., None])[..., 0]
    q = np.zeros((len(mats), A.shape[1]))
    np.put_along_axis(q, subsets, sols, axis=1)
    nonneg = q.min(axis=1) >= -tol
    exact = np.max(np.abs(q @ A.T - b), axis=1) <= tol
    return FEASIBLE if np.any(nonneg & exact) else INFEASIBLE
