"""Search for the largest violation C of the entropic inequality.

Three levels: a grid over the two-parameter family, a Nelder-Mead polish
of the best grid node, and a multi-start search over all real (or complex)
pentagon configurations in a gauge where A_3 = (1, 0, 0) and psi lies in
the x-y plane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np
from scipy.optimize import minimize

from .entropy import c_from_click_probabilities, conditional_entropy, evaluate_c
from .errors import DegenerateConfigurationError, ParameterError
from .quantum import (
    PHI_MAX,
    FamilyParams,
    PentagonConfig,
    build_pentagon_family,
    check_symmetries,
    family_vectors,
    orthogonal_pair_tables,
)

BOUNDARY_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class Grid:
    thetas: np.ndarray
    phis: np.ndarray
    values: np.ndarray  # values[i, j] = C(thetas[i], phis[j])

    def rows(self) -> Iterator[tuple[float, float, float]]:
        for i, th in enumerate(self.thetas):
            for j, ph in enumerate(self.phis):
                yield float(th), float(ph), float(self.values[i, j])

    def argmax(self) -> tuple[float, float, float]:
        """Best node; the first in row-major order wins ties, i.e. the
        lexicographically smallest (theta, phi) for ascending ranges."""
        k = int(np.argmax(self.values))
        i, j = np.unravel_index(k, self.values.shape)
        return float(self.thetas[i]), float(self.phis[j]), float(self.values[i, j])

    def to_csv(self) -> str:
        lines = ["theta,phi,C"]
        lines += [f"{th:.12g},{ph:.12g},{c:.12g}" for th, ph, c in self.rows()]
        return "\n".join(lines) + "\n"


def family_c_values(theta, phi) -> np.ndarray:
    """C(theta, phi) for the two-parameter family, broadcasting over arrays."""
    return _c_from_vectors(family_vectors(theta, phi))


def _c_from_vectors(vecs: np.ndarray) -> np.ndarray:
    """C for stacked (psi, A_1, ..., A_5) arrays of shape (..., 6, 3)."""
    psi, proj = vecs[..., 0, :], vecs[..., 1:, :]
    p = np.clip(np.abs(np.einsum("...kd,...d->...k", proj.conj(), psi)) ** 2, 0.0, 1.0)
    tables = [orthogonal_pair_tables(p[..., i], p[..., i + 1]) for i in range(4)]
    lhs = conditional_entropy(orthogonal_pair_tables(p[..., 0], p[..., 4]))
    return lhs - sum(conditional_entropy(t) for t in tables)


def _axis(lo: float, hi: float, n: int, open_at: float | None = None) -> np.ndarray:
    endpoint = not (open_at is not None and hi >= open_at)
    return np.linspace(lo, hi, n, endpoint=endpoint)


def scan_grid(
    theta_range: tuple[float, float] = (0.0, math.pi / 2),
    phi_range: tuple[float, float] = (0.0, PHI_MAX),
    resolution: int | tuple[int, int] = 200,
) -> Grid:
    """Evaluate C on an evenly spaced (theta, phi) grid.

    Both ranges are inclusive, except that a phi range ending at pi/4 is
    half-open since the family degenerates there.
    """
    rt, rp = (resolution, resolution) if isinstance(resolution, int) else resolution
    if rt < 2 or rp < 2:
        raise ParameterError("resolution must be at least 2 per axis")
    (t0, t1), (p0, p1) = theta_range, phi_range
    if not all(math.isfinite(x) for x in (t0, t1, p0, p1)) or t1 < t0 or p1 < p0:
        raise ParameterError("ranges must be finite and ascending")
    if p0 < 0 or p1 > PHI_MAX:
        raise ParameterError("phi range must lie in [0, pi/4)")
    thetas = _axis(t0, t1, rt)
    phis = _axis(p0, p1, rp, open_at=PHI_MAX)
    values = family_c_values(thetas[:, None], phis[None, :])
    return Grid(thetas, phis, values)


@dataclass(frozen=True)
class TwoParamResult:
    params: FamilyParams
    c_star: float
    converged: bool
    on_boundary: bool
    iterations: int


def _family_objective(x: np.ndarray) -> float:
    th, ph = x
    if not 0.0 <= ph < PHI_MAX:
        return math.inf
    return -evaluate_c(build_pentagon_family(FamilyParams(float(th), float(ph)))).c_value


def optimize_two_param(
    initial: FamilyParams | tuple[float, float],
    tolerance: float = 1e-9,
    max_iter: int = 5000,
) -> TwoParamResult:
    """Nelder-Mead ascent of C over (theta, phi), phi kept inside [0, pi/4)."""
    if not isinstance(initial, FamilyParams):
        initial = FamilyParams(*initial)
    res = minimize(
        _family_objective,
        np.array([initial.theta, initial.phi]),
        method="Nelder-Mead",
        bounds=[(None, None), (0.0, PHI_MAX - 1e-9)],
        options={"xatol": tolerance, "fatol": 1e-15, "maxiter": max_iter, "maxfev": 4 * max_iter},
    )
    th, ph = (float(v) for v in res.x)
    return TwoParamResult(
        params=FamilyParams(th, ph),
        c_star=-float(res.fun),
        converged=bool(res.success),
        on_boundary=ph < BOUNDARY_TOL or ph > PHI_MAX - BOUNDARY_TOL,
        iterations=int(res.nit),
    )


def optimize_from_grid(resolution: int = 200, tolerance: float = 1e-9) -> tuple[Grid, TwoParamResult]:
    grid = scan_grid(resolution=resolution)
    th, ph, _ = grid.argmax()
    return grid, optimize_two_param(FamilyParams(th, ph), tolerance)


def general_vectors(angles, complex_search: bool = False) -> np.ndarray | None:
    """(psi, A_1, ..., A_5) from gauge-fixed angles, or None if degenerate.

    Real search uses (t, a, b, c): psi = (sin t, cos t, 0), A_3 = e_x,
    A_2 and A_4 at angles a and b in the y-z plane, A_1 = cos c e_x +
    sin c n_2 with n_2 the in-plane normal of A_2. The complex search adds
    relative phases (alpha, beta, gamma) on A_2, A_4 and A_1.
    A_5 is fixed by orthogonality to A_4 and A_1.
    """
    if complex_search:
        t, a, alpha, b, beta, c, gamma = angles
        ea, eb, eg = np.exp(1j * alpha), np.exp(1j * beta), np.exp(1j * gamma)
    else:
        t, a, b, c = angles
        ea = eb = eg = 1.0
    psi = np.array([math.sin(t), math.cos(t), 0.0], dtype=complex)
    a3 = np.array([1.0, 0.0, 0.0], dtype=complex)
    a2 = np.array([0.0, math.cos(a), ea * math.sin(a)])
    n2 = np.array([0.0, -math.sin(a), ea * math.cos(a)])
    a4 = np.array([0.0, math.cos(b), eb * math.sin(b)])
    a1 = math.cos(c) * a3 + eg * math.sin(c) * n2
    cross = np.array([
        a4[1] * a1[2] - a4[2] * a1[1],
        a4[2] * a1[0] - a4[0] * a1[2],
        a4[0] * a1[1] - a4[1] * a1[0],
    ]).conj()
    norm = math.sqrt(float(np.vdot(cross, cross).real))
    if norm < 1e-12:
        return None
    vecs = np.array([psi, a1, a2, a3, a4, cross / norm])
    return vecs / np.sqrt(np.sum(np.abs(vecs) ** 2, axis=1))[:, None]


def general_vectors_batch(angles: np.ndarray, complex_search: bool = False) -> np.ndarray:
    """Stacked version of :func:`general_vectors`; degenerate rows are NaN."""
    if complex_search:
        t, a, alpha, b, beta, c, gamma = np.moveaxis(angles, -1, 0)
    else:
        t, a, b, c = np.moveaxis(angles, -1, 0)
        alpha = beta = gamma = np.zeros_like(t)
    ea, eb, eg = np.exp(1j * alpha), np.exp(1j * beta), np.exp(1j * gamma)
    zero, one = np.zeros_like(t), np.ones_like(t)
    psi = np.stack([np.sin(t), np.cos(t), zero], axis=-1).astype(complex)
    a3 = np.stack([one, zero, zero], axis=-1).astype(complex)
    a2 = np.stack([zero, np.cos(a), ea * np.sin(a)], axis=-1)
    n2 = np.stack([zero, -np.sin(a), ea * np.cos(a)], axis=-1)
    a4 = np.stack([zero, np.cos(b), eb * np.sin(b)], axis=-1)
    a1 = np.cos(c)[..., None] * a3 + (eg * np.sin(c))[..., None] * n2
    cross = np.cross(a4, a1).conj()
    norm = np.linalg.norm(cross, axis=-1, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        a5 = np.where(norm >= 1e-12, cross / norm, np.nan)
    vecs = np.stack([psi, a1, a2, a3, a4, a5], axis=-2)
    return vecs / np.linalg.norm(vecs, axis=-1, keepdims=True)


def general_config(angles, complex_search: bool = False) -> PentagonConfig:
    vecs = general_vectors(angles, complex_search)
    if vecs is None:
        raise DegenerateConfigurationError("A_4 x A_1 vanishes")
    if not complex_search:
        vecs = vecs.real
    return PentagonConfig.from_vectors(vecs[0], vecs[1:])


def _general_objective(x: np.ndarray, complex_search: bool) -> float:
    vecs = general_vectors(x, complex_search)
    if vecs is None:
        return math.inf
    psi = vecs[0]
    return -c_from_click_probabilities(np.abs(vecs[1:].conj() @ psi) ** 2)


@dataclass(frozen=True, eq=False)
class GeneralResult:
    config: PentagonConfig
    c_star: float
    angles: tuple[float, ...]
    symmetries: tuple[bool, bool, bool]
    restart_values: tuple[float, ...]


def optimize_general(
    seed: int = 0,
    restarts: int = 50,
    complex_search: bool = False,
    tolerance: float = 1e-10,
    symmetry_tol: float = 1e-3,
    screen: int = 1024,
) -> GeneralResult:
    """Multi-start Nelder-Mead over gauge-fixed pentagon configurations.

    Each restart evaluates ``screen`` random angle vectors and polishes the
    best one. Restart k draws from the k-th child of ``SeedSequence(seed)``,
    so each restart is reproducible on its own. The best value wins; ties go
    to the lexicographically smallest angle vector.
    """
    if restarts < 1:
        raise ParameterError("restarts must be >= 1")
    dim = 7 if complex_search else 4
    children = np.random.SeedSequence(seed).spawn(restarts)
    candidates = []
    for child in children:
        rng = np.random.default_rng(child)
        starts = rng.uniform(0.0, math.pi, (screen, dim))
        if complex_search:
            starts[:, [2, 4, 6]] *= 2.0
        # most random starts sit in the flat C = 0 basin; begin from the best of a batch
        screened = _c_from_vectors(general_vectors_batch(starts, complex_search))
        x0 = starts[int(np.nanargmax(screened))]
        res = minimize(
            _general_objective,
            x0,
            args=(complex_search,),
            method="Nelder-Mead",
            options={"xatol": tolerance, "fatol": 1e-15, "maxiter": 20000, "maxfev": 40000},
        )
        if math.isfinite(res.fun):
            candidates.append((-float(res.fun), tuple(float(v) for v in res.x)))
    if not candidates:
        raise DegenerateConfigurationError("every restart ended in a degenerate configuration")
    _, best_x = max(candidates, key=lambda item: (item[0], tuple(-v for v in item[1])))
    config = general_config(best_x, complex_search)
    return GeneralResult(
        config=config,
        c_star=evaluate_c(config).c_value,
        angles=best_x,
        symmetries=check_symmetries(config, symmetry_tol),
        restart_values=tuple(c for c, _ in candidates),
    )
