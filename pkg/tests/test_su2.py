import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hsikit.errors import SingularLog
from hsikit.su2 import (
    CUT_RADIUS,
    IDENTITY,
    MINUS_IDENTITY,
    SU2,
    Su2Vector,
    adjoint,
    commutator,
    conjugacy_angle,
    exp,
    log,
    random_su2,
    random_su2_vector,
)

seeds = st.integers(0, 2**32 - 1)


def as_matrix(g):
    return g.to_matrix()


def test_quaternion_units_match_pauli_convention():
    i, j, k = SU2(0, 1, 0, 0), SU2(0, 0, 1, 0), SU2(0, 0, 0, 1)
    assert (i * j).dist(k) < 1e-15
    # [i, j] = i j i^-1 j^-1 = -I
    assert commutator(i, j).dist(MINUS_IDENTITY) < 1e-15
    assert np.allclose(k.to_matrix(), np.diag([1j, -1j]))


def test_exp_of_quarter_turn_is_diag_i():
    assert np.allclose(exp(Su2Vector(0, 0, math.pi / 2)).to_matrix(), np.diag([1j, -1j]))


def test_norm_is_trace_form():
    xi = Su2Vector(0.3, -0.2, 0.7)
    m = xi.to_matrix()
    assert xi.norm**2 == pytest.approx(-np.trace(m @ m).real)
    assert xi.dot(xi) == pytest.approx(xi.norm**2)


def test_log_minus_identity_is_singular():
    with pytest.raises(SingularLog):
        log(MINUS_IDENTITY)
    # the supremum of |log| is pi*sqrt(2)
    near = exp(Su2Vector(0, 0, math.pi - 1e-6))
    assert log(near).norm == pytest.approx(CUT_RADIUS, abs=1e-5)


def test_log_identity_is_zero():
    assert log(IDENTITY).euclid == 0.0


@given(seeds)
def test_multiplication_matches_matrices(seed):
    rng = np.random.default_rng(seed)
    a, b = random_su2(rng), random_su2(rng)
    assert np.allclose((a * b).to_matrix(), a.to_matrix() @ b.to_matrix(), atol=1e-12)
    assert np.allclose(a.inv().to_matrix(), np.linalg.inv(a.to_matrix()), atol=1e-12)


@given(seeds)
def test_exp_matches_matrix_exponential(seed):
    from scipy.linalg import expm

    xi = random_su2_vector(np.random.default_rng(seed))
    assert np.allclose(exp(xi).to_matrix(), expm(xi.to_matrix()), atol=1e-10)


@given(seeds)
def test_log_inverts_exp_inside_ball(seed):
    rng = np.random.default_rng(seed)
    xi = random_su2_vector(rng, 0.999 * CUT_RADIUS)
    assert (log(exp(xi)) - xi).euclid < 1e-9


@given(seeds)
def test_adjoint_is_conjugation(seed):
    rng = np.random.default_rng(seed)
    g, xi = random_su2(rng), random_su2_vector(rng, 2.0)
    lhs = exp(adjoint(g, xi))
    rhs = g * exp(xi) * g.inv()
    assert lhs.dist(rhs) < 1e-12
    assert adjoint(g, xi).norm == pytest.approx(xi.norm, abs=1e-12)


@settings(max_examples=50)
@given(st.floats(0, math.pi))
def test_conjugacy_angle_of_diagonal(t):
    assert conjugacy_angle(exp(Su2Vector(0, 0, t))) == pytest.approx(t, abs=1e-12)


def test_from_tuple_normalises_and_rejects_zero():
    assert SU2.from_tuple((2, 0, 0, 0)).dist(IDENTITY) == 0.0
    with pytest.raises(ValueError):
        SU2.from_tuple((0, 0, 0, 0))


def test_random_vector_stays_in_ball(rng):
    assert max(random_su2_vector(rng, 1.0).norm for _ in range(500)) <= 1.0 + 1e-12
