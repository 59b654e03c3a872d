"""Qutrit states, rank-1 projectors and the pentagon measurement families."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DegenerateConfigurationError,
    IncompatibleContextError,
    NormalizationError,
    ParameterError,
    ValidationError,
)

NORM_TOL = 1e-12
ORTHO_TOL = 1e-9
PHI_MAX = math.pi / 4


def _as_vector(values) -> np.ndarray:
    vec = np.array(values, dtype=complex).reshape(-1)
    if vec.shape != (3,):
        raise ValidationError(f"expected 3 amplitudes, got shape {vec.shape}")
    if not np.all(np.isfinite(vec)):
        raise ValidationError("amplitudes must be finite")
    norm = np.linalg.norm(vec)
    if abs(norm - 1.0) > NORM_TOL:
        raise NormalizationError(f"vector norm {norm!r} differs from 1")
    vec.setflags(write=False)
    return vec


def normalized(values) -> np.ndarray:
    """Return ``values`` scaled to unit norm as a complex array."""
    vec = np.asarray(values, dtype=complex).reshape(-1)
    norm = np.linalg.norm(vec)
    if norm < NORM_TOL:
        raise DegenerateConfigurationError("cannot normalize a null vector")
    return vec / norm


def overlap(u, v) -> complex:
    """Inner product <u|v> (conjugate-linear in the first slot)."""
    return complex(np.vdot(_raw(u), _raw(v)))


def _raw(x) -> np.ndarray:
    if isinstance(x, (PureState, Projector)):
        return x.vector
    return np.asarray(x, dtype=complex)


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized qutrit state |psi>."""

    vector: np.ndarray

    def __init__(self, amplitudes):
        object.__setattr__(self, "vector", _as_vector(amplitudes))

    @classmethod
    def from_unnormalized(cls, amplitudes) -> "PureState":
        return cls(normalized(amplitudes))

    @property
    def amplitudes(self) -> np.ndarray:
        return self.vector

    def __eq__(self, other):
        if not isinstance(other, PureState):
            return NotImplemented
        return _same_ray(self.vector, other.vector)

    __hash__ = None

    def __repr__(self):
        return f"PureState({np.array2string(self.vector, precision=6)})"


@dataclass(frozen=True, eq=False)
class Projector:
    """Rank-1 projector |A><A| stored through its unit vector.

    Two projectors compare equal when their vectors differ by a global phase.
    """

    vector: np.ndarray

    def __init__(self, vector):
        object.__setattr__(self, "vector", _as_vector(vector))

    @classmethod
    def from_unnormalized(cls, vector) -> "Projector":
        return cls(normalized(vector))

    def matrix(self) -> np.ndarray:
        return np.outer(self.vector, self.vector.conj())

    def __eq__(self, other):
        if not isinstance(other, Projector):
            return NotImplemented
        return _same_ray(self.vector, other.vector)

    __hash__ = None

    def __repr__(self):
        return f"Projector({np.array2string(self.vector, precision=6)})"


def _same_ray(u: np.ndarray, v: np.ndarray, tol: float = ORTHO_TOL) -> bool:
    return abs(abs(np.vdot(u, v)) - 1.0) <= tol


@dataclass(frozen=True, eq=False)
class PentagonConfig:
    """A state together with five cyclically orthogonal projectors."""

    state: PureState
    projectors: tuple[Projector, ...]

    def __post_init__(self):
        projectors = tuple(self.projectors)
        if len(projectors) != 5:
            raise ValidationError(f"need 5 projectors, got {len(projectors)}")
        object.__setattr__(self, "projectors", projectors)
        for i, res in enumerate(self.orthogonality_residuals()):
            if res > ORTHO_TOL:
                raise IncompatibleContextError(
                    f"|<A{i + 1}|A{(i + 1) % 5 + 1}>| = {res:.3e} exceeds {ORTHO_TOL}"
                )

    @classmethod
    def from_vectors(cls, state, vectors: Sequence) -> "PentagonConfig":
        return cls(PureState(state), tuple(Projector(v) for v in vectors))

    def orthogonality_residuals(self) -> list[float]:
        p = self.projectors
        return [abs(overlap(p[i], p[(i + 1) % 5])) for i in range(5)]

    def probabilities(self) -> np.ndarray:
        """Click probabilities p(A_i = 1) for i = 1..5."""
        return np.array([outcome_probability(self.state, a) for a in self.projectors])

    def gram(self) -> np.ndarray:
        """Moduli of all pairwise overlaps among (psi, A_1, ..., A_5)."""
        vecs = np.array([self.state.vector] + [a.vector for a in self.projectors])
        return np.abs(vecs.conj() @ vecs.T)


@dataclass(frozen=True)
class FamilyParams:
    theta: float
    phi: float

    def __post_init__(self):
        if not (math.isfinite(self.theta) and math.isfinite(self.phi)):
            raise ParameterError("theta and phi must be finite")
        if not 0.0 <= self.phi < PHI_MAX:
            raise ParameterError(f"phi={self.phi!r} outside [0, pi/4)")


def outcome_probability(state: PureState, a: Projector) -> float:
    """Born-rule probability |<A|psi>|^2 that projector ``a`` clicks."""
    if not isinstance(state, PureState) or not isinstance(a, Projector):
        state, a = PureState(_raw(state)), Projector(_raw(a))
    p = abs(np.vdot(a.vector, state.vector)) ** 2
    return float(min(max(p, 0.0), 1.0))


def clique_joint_distribution(state: PureState, projectors: Sequence[Projector]) -> np.ndarray:
    """Joint outcome table for mutually orthogonal projectors.

    Returns an array of shape ``(2,) * k``; at most one projector clicks, so
    only the all-zero tuple and the one-hot tuples carry weight.
    """
    k = len(projectors)
    for i in range(k):
        for j in range(i + 1, k):
            res = abs(overlap(projectors[i], projectors[j]))
            if res > ORTHO_TOL:
                raise IncompatibleContextError(
                    f"projectors {i} and {j} are not orthogonal (|<a|b>| = {res:.3e})"
                )
    table = np.zeros((2,) * k)
    clicks = [outcome_probability(state, a) for a in projectors]
    for i, p in enumerate(clicks):
        idx = [0] * k
        idx[i] = 1
        table[tuple(idx)] = p
    table[(0,) * k] = max(0.0, 1.0 - sum(clicks))
    table = np.clip(table, 0.0, 1.0)
    return table / table.sum()


def pair_joint_distribution(state: PureState, a: Projector, b: Projector) -> np.ndarray:
    """2x2 table ``t[x, y] = p(A = x, B = y)`` for an orthogonal pair."""
    return clique_joint_distribution(state, [a, b])


def family_vectors(theta, phi) -> np.ndarray:
    """Real vectors (psi, A_1, ..., A_5) of the two-parameter family.

    Broadcasts over array-valued ``theta`` and ``phi``; the result has shape
    ``broadcast_shape + (6, 3)``. A_5 is NaN where A_1 x A_4 vanishes.
    """
    th, ph = np.broadcast_arrays(np.asarray(theta, dtype=float), np.asarray(phi, dtype=float))
    c, s = np.cos(ph), np.sin(ph)
    zero, one = np.zeros_like(th), np.ones_like(th)
    psi = np.stack([np.sin(th), np.cos(th), zero], axis=-1)
    a1 = np.stack([np.sqrt(np.cos(2 * ph)) / (np.sqrt(2) * c), np.tan(ph) / np.sqrt(2), one / np.sqrt(2)], axis=-1)
    a2 = np.stack([zero, c, -s], axis=-1)
    a3 = np.stack([one, zero, zero], axis=-1)
    a4 = np.stack([zero, c, s], axis=-1)
    cross = np.cross(a1, a4)
    norm = np.linalg.norm(cross, axis=-1, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        a5 = np.where(norm >= NORM_TOL, cross / norm, np.nan)
    vecs = np.stack([psi, a1, a2, a3, a4, a5], axis=-2)
    # absorb rounding in the closed-form entries
    return vecs / np.linalg.norm(vecs, axis=-1, keepdims=True)


def build_pentagon_family(params: FamilyParams | tuple[float, float]) -> PentagonConfig:
    """Two-parameter family of pentagon configurations.

    psi = (sin theta, cos theta, 0), A_3 = (1, 0, 0), A_2 and A_4 tilted by
    -/+ phi in the y-z plane, A_1 orthogonal to A_2 and A_5 the normalized
    cross product A_1 x A_4.
    """
    if not isinstance(params, FamilyParams):
        params = FamilyParams(*params)
    vecs = family_vectors(params.theta, params.phi)
    if not np.all(np.isfinite(vecs)):
        raise DegenerateConfigurationError(f"A1 x A4 vanishes at phi={params.phi!r}")
    return PentagonConfig.from_vectors(vecs[0], vecs[1:])


def orthogonal_pair_tables(pa, pb) -> np.ndarray:
    """Tables ``t[..., x, y]`` for orthogonal projectors with click
    probabilities ``pa`` and ``pb`` (both clicking is impossible)."""
    pa, pb = np.broadcast_arrays(np.asarray(pa, dtype=float), np.asarray(pb, dtype=float))
    t = np.zeros(pa.shape + (2, 2))
    t[..., 1, 0] = pa
    t[..., 0, 1] = pb
    t[..., 0, 0] = 1.0 - pa - pb
    t = np.clip(t, 0.0, 1.0)
    return t / t.sum(axis=(-2, -1), keepdims=True)


def build_symmetric_pentagram() -> PentagonConfig:
    """KCBS pentagram: five rays on a cone around psi = (0, 0, 1)."""
    c5 = math.cos(math.pi / 5)
    cos_a = math.sqrt(c5 / (1 + c5))
    sin_a = math.sqrt(1 / (1 + c5))
    vecs = [
        (sin_a * math.cos(4 * math.pi * j / 5), sin_a * math.sin(4 * math.pi * j / 5), cos_a)
        for j in range(5)
    ]
    return PentagonConfig.from_vectors((0.0, 0.0, 1.0), vecs)


def complete_basis(v) -> np.ndarray:
    """Unitary matrix whose first column is exactly ``v`` (Gram-Schmidt)."""
    v = np.asarray(_raw(v), dtype=complex)
    basis = [v / np.linalg.norm(v)]
    for e in np.eye(3, dtype=complex)[np.argsort(np.abs(v))]:
        w = e - sum(np.vdot(b, e) * b for b in basis)
        n = np.linalg.norm(w)
        if n > 1e-6:
            basis.append(w / n)
        if len(basis) == 3:
            break
    return np.column_stack(basis)


def rotate_to_state(config: PentagonConfig, target: PureState) -> PentagonConfig:
    """Apply a unitary taking ``config.state`` to ``target`` to every vector."""
    if not isinstance(target, PureState):
        target = PureState(target)
    u = complete_basis(target.vector) @ complete_basis(config.state.vector).conj().T
    return PentagonConfig(
        PureState(normalized(u @ config.state.vector)),
        tuple(Projector(normalized(u @ a.vector)) for a in config.projectors),
    )


def check_symmetries(config: PentagonConfig, tol: float = 1e-6) -> tuple[bool, bool, bool]:
    """Compare |<A5|psi>|, |<A5|A2>|, |<A5|A3>| with |<A1|psi>|, |<A1|A4>|, |<A1|A3>|."""
    a1, a2, a3, a4, a5 = config.projectors
    psi = config.state
    pairs = [
        (overlap(a5, psi), overlap(a1, psi)),
        (overlap(a5, a2), overlap(a1, a4)),
        (overlap(a5, a3), overlap(a1, a3)),
    ]
    return tuple(bool(abs(abs(x) - abs(y)) <= tol) for x, y in pairs)


def four_cycle_collapse(b: Projector, d: Projector) -> Projector:
    """The ray orthogonal to both ``b`` and ``d``.

    In a 4-cycle A-B-C-D-A of rank-1 projectors on a qutrit, both A and C
    must equal this ray, so the cycle collapses to three distinct projectors.
    """
    bv, dv = _raw(b), _raw(d)
    if abs(abs(np.vdot(bv, dv)) - 1.0) <= ORTHO_TOL:
        raise DegenerateConfigurationError("b and d are parallel; no 4-cycle of distinct projectors")
    # conj(b x d) is orthogonal to b and d under the Hermitian inner product
    return Projector(normalized(np.cross(bv, dv).conj()))


def random_state(rng: np.random.Generator, real: bool = False) -> PureState:
    z = rng.normal(size=3)
    if not real:
        z = z + 1j * rng.normal(size=3)
    return PureState.from_unnormalized(z)


def random_orthogonal_partner(v, rng: np.random.Generator, real: bool = True) -> Projector:
    """A random unit vector orthogonal to ``v``."""
    v = np.asarray(_raw(v), dtype=complex)
    z = rng.normal(size=3) + (0 if real else 1j * rng.normal(size=3))
    z = z - np.vdot(v, z) * v
    return Projector.from_unnormalized(z)
