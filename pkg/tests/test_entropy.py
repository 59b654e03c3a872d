import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entropic_context.entropy import (
    c_from_click_probabilities,
    conditional_entropy,
    coplanar_conditional_entropy_zero,
    cyclic_tables,
    evaluate_c,
    evaluate_c_from_marginals,
    joint_entropy,
    shannon_entropy,
)
from entropic_context.errors import IncompatibleContextError, ValidationError
from entropic_context.graphs import marginalize, random_jpd
from entropic_context.quantum import (
    PentagonConfig,
    Projector,
    PureState,
    build_pentagon_family,
    pair_joint_distribution,
    random_orthogonal_partner,
    random_state,
    rotate_to_state,
)

H_QUARTER = 0.81127812445913286391  # mpmath, 40 digits
CYCLE5 = [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]


def cond_entropy_by_definition(table):
    """H(A|B) = sum_b p(b) H(A | B=b) with explicit loops, exact where possible."""
    total = 0.0
    for b in range(2):
        pb = sum(Fraction(table[a][b]) for a in range(2))
        if pb == 0:
            continue
        h = 0.0
        for a in range(2):
            q = Fraction(table[a][b]) / pb
            if q > 0:
                h -= float(q) * math.log2(float(q))
        total += float(pb) * h
    return total


def random_table(rng):
    return rng.dirichlet(np.ones(4) * rng.choice([0.2, 1.0, 5.0])).reshape(2, 2)


def test_shannon_examples():
    assert shannon_entropy([1.0, 0.0]) == 0.0
    assert shannon_entropy([0.5, 0.5]) == pytest.approx(1.0, abs=1e-15)
    assert shannon_entropy([0.25, 0.75]) == pytest.approx(H_QUARTER, abs=1e-15)


def test_shannon_rejects_bad_input():
    with pytest.raises(ValidationError):
        shannon_entropy([0.5, 0.6])
    with pytest.raises(ValidationError):
        shannon_entropy([-0.1, 1.1])


def test_conditional_examples():
    assert conditional_entropy(np.full((2, 2), 0.25)) == pytest.approx(1.0, abs=1e-15)
    assert conditional_entropy([[0.5, 0.0], [0.0, 0.5]]) == 0.0
    table = [[0.5, 0.25], [0.0, 0.25]]
    assert conditional_entropy(table) == pytest.approx(cond_entropy_by_definition(table), abs=1e-15)
    assert cond_entropy_by_definition(table) == 0.5


def test_chain_rule_and_monotonicity():
    rng = np.random.default_rng(1)
    tables = np.array([random_table(rng) for _ in range(10_000)])
    tables[::7, 1, :] = 0  # exact zeros
    tables /= tables.sum(axis=(1, 2), keepdims=True)
    hab = joint_entropy(tables)
    hb = shannon_entropy(tables.sum(axis=1))
    ha = shannon_entropy(tables.sum(axis=2))
    h_a_given_b = conditional_entropy(tables)
    assert np.max(np.abs(hab - (h_a_given_b + hb))) <= 1e-12
    assert np.all(h_a_given_b <= ha + 1e-12)
    assert np.all(ha <= hab + 1e-12)


def test_batched_equals_scalar():
    rng = np.random.default_rng(2)
    tables = np.array([random_table(rng) for _ in range(50)])
    batched = conditional_entropy(tables)
    for t, h in zip(tables, batched):
        assert conditional_entropy(t) == h


def test_orthogonal_pair_identity():
    rng = np.random.default_rng(3)
    for _ in range(500):
        psi = random_state(rng)
        b = Projector.from_unnormalized(rng.normal(size=3) + 1j * rng.normal(size=3))
        a = random_orthogonal_partner(b.vector, rng, real=False)
        t = pair_joint_distribution(psi, a, b)
        pb0 = t[:, 0].sum()
        h_given_b0 = shannon_entropy(t[:, 0] / pb0) if pb0 > 0 else 0.0
        assert conditional_entropy(t) == pytest.approx(pb0 * h_given_b0, abs=1e-12)


def test_evaluate_c_at_optimum(optimal):
    rep = evaluate_c(optimal)
    assert rep.c_value == pytest.approx(0.091, abs=1e-3)
    assert rep.c_value == pytest.approx(rep.h_a1_given_a5 - sum(rep.rhs_terms), abs=1e-12)
    assert rep.violated


def test_state_equal_to_a1(optimal):
    cfg = PentagonConfig(PureState(optimal.projectors[0].vector), optimal.projectors)
    rep = evaluate_c(cfg)
    assert rep.h_a1_given_a5 == 0.0
    assert rep.c_value <= 0


def test_state_equal_to_a3(optimal):
    cfg = PentagonConfig(PureState([1, 0, 0]), optimal.projectors)
    rep = evaluate_c(cfg)
    # A2, A3, A4 are deterministic, so only H(A1|A2) = H(A1) survives on the right
    p1 = cfg.probabilities()[0]
    assert rep.rhs_terms[1:] == pytest.approx((0, 0, 0), abs=1e-15)
    assert rep.rhs_terms[0] == pytest.approx(shannon_entropy([1 - p1, p1]), abs=1e-12)
    assert rep.c_value <= 0


def test_fast_path_matches_tables():
    rng = np.random.default_rng(4)
    for _ in range(200):
        cfg = build_pentagon_family((rng.uniform(-3, 3), rng.uniform(0, 0.78)))
        assert c_from_click_probabilities(cfg.probabilities()) == pytest.approx(evaluate_c(cfg).c_value, abs=1e-12)


def test_marginals_path_matches_config(optimal):
    assert evaluate_c_from_marginals(cyclic_tables(optimal)) == pytest.approx(0.091, abs=1e-3)
    assert evaluate_c_from_marginals(cyclic_tables(optimal)) == evaluate_c(optimal).c_value


def test_marginals_validation():
    with pytest.raises(ValidationError):
        evaluate_c_from_marginals([np.full((2, 2), 0.25)] * 2)
    with pytest.raises(ValidationError):
        evaluate_c_from_marginals([np.full((3,), 1 / 3)] * 5)


def test_noncontextual_bound_1000_jpds():
    worst = max(
        evaluate_c_from_marginals([marginalize(random_jpd(5, seed=s), e).table for e in CYCLE5])
        for s in range(1000)
    )
    assert worst <= 1e-12


@pytest.mark.parametrize("n", [3, 4, 6, 7])
def test_noncontextual_bound_other_cycles(n):
    edges = [(i, i + 1) for i in range(n - 1)] + [(0, n - 1)]
    for s in range(100):
        jpd = random_jpd(n, seed=s)
        assert evaluate_c_from_marginals([marginalize(jpd, e).table for e in edges]) <= 1e-12


def hexagon_vectors(th, ph):
    """Pentagon family with a sixth ray: A5 is A1 mirrored in z, A6 = A5 x A1."""
    c, s = math.cos(ph), math.sin(ph)
    a1 = (math.sqrt(math.cos(2 * ph)) / (math.sqrt(2) * c), math.tan(ph) / math.sqrt(2), 1 / math.sqrt(2))
    a5 = (a1[0], a1[1], -a1[2])
    x = np.cross(a5, a1)
    return (math.sin(th), math.cos(th), 0.0), [a1, (0, c, -s), (1, 0, 0), (0, c, s), a5, tuple(x / np.linalg.norm(x))]


def hexagon_c_oracle(th, ph):
    """Direct scalar evaluation, independent of the table kernels."""
    psi, vecs = hexagon_vectors(th, ph)
    p = [sum(a * b for a, b in zip(v, psi)) ** 2 for v in vecs]
    h = lambda *ps: -sum(q * math.log2(q) for q in ps if q > 1e-15)
    cond = lambda pa, pb: h(pa, pb, max(0.0, 1 - pa - pb)) - h(pb, 1 - pb)
    return cond(p[0], p[5]) - sum(cond(p[i], p[i + 1]) for i in range(5))


def test_hexagon_family_scan():
    # oracle scan on a 40 x 40 grid: maximum 0 at (0, 0), no violation anywhere
    best = -math.inf
    for th in np.linspace(0, math.pi / 2, 40):
        for ph in np.linspace(0, math.pi / 4, 40, endpoint=False):
            psi, vecs = hexagon_vectors(th, ph)
            state = PureState(psi)
            projs = [Projector(v) for v in vecs]
            pairs = [(i, i + 1) for i in range(5)] + [(0, 5)]
            tables = [pair_joint_distribution(state, projs[i], projs[j]) for i, j in pairs]
            value = evaluate_c_from_marginals(tables)
            assert value == pytest.approx(hexagon_c_oracle(th, ph), abs=1e-12)
            best = max(best, value)
    assert best == pytest.approx(0.0, abs=1e-12)


def test_coplanarity_examples():
    a, b = Projector([1, 0, 0]), Projector([0, 1, 0])
    assert coplanar_conditional_entropy_zero(PureState([1, 0, 0]), a, b) == (True, 0.0)
    ok, h = coplanar_conditional_entropy_zero(PureState(np.array([1, 1, 0]) / math.sqrt(2)), a, b)
    assert ok and h <= 1e-9
    off = np.array([0.6, math.sqrt(1 - 0.36 - 0.09), 0.3])
    ok, h = coplanar_conditional_entropy_zero(PureState(off), a, b)
    assert not ok and h > 0
    with pytest.raises(IncompatibleContextError):
        coplanar_conditional_entropy_zero(PureState([1, 0, 0]), a, Projector(np.array([1, 1, 0]) / math.sqrt(2)))


def test_coplanar_triples_have_zero_conditional_entropy():
    rng = np.random.default_rng(5)
    for _ in range(1000):
        a = Projector.from_unnormalized(rng.normal(size=3) + 1j * rng.normal(size=3))
        b = random_orthogonal_partner(a.vector, rng, real=False)
        coeff = rng.normal(size=2) + 1j * rng.normal(size=2)
        psi = PureState.from_unnormalized(coeff[0] * a.vector + coeff[1] * b.vector)
        ok, h = coplanar_conditional_entropy_zero(psi, a, b)
        assert ok and h <= 1e-9


@given(st.floats(-math.pi, math.pi), st.floats(0, 0.78), st.integers(0, 2**32 - 1))
@settings(max_examples=100, deadline=None)
def test_c_is_unitarily_invariant(theta, phi, seed):
    cfg = build_pentagon_family((theta, phi))
    out = rotate_to_state(cfg, random_state(np.random.default_rng(seed)))
    assert evaluate_c(out).c_value == pytest.approx(evaluate_c(cfg).c_value, abs=1e-9)
