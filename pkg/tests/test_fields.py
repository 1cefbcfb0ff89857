import numpy as np
import pytest
from hypothesis import given, strategies as st

from sylvnls import SchemeParams, StatePair, bar_average, g_eval, g_field, l2_norm

P = SchemeParams()
cplx = st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False)


def rand_field(rng, n=3):
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


@pytest.mark.parametrize("a, b, expected", [(1, 0, 1.0), (0, 2, 4.0), (2, 1, 3.8284271247461903)])
def test_g_eval_examples(a, b, expected):
    assert g_eval(a, b, P) == pytest.approx(expected, rel=1e-14)


def test_g_field_examples():
    Z = np.zeros((4, 4))
    assert np.all(g_field(Z, Z, P) == 0)
    assert np.all(g_field(np.ones((4, 4)), Z, P) == 1)
    rng = np.random.default_rng(1)
    U, V = rand_field(rng), rand_field(rng)
    G = g_field(U, V, P)
    for i in range(3):
        for j in range(3):
            assert G[i, j] == pytest.approx(g_eval(U[i, j], V[i, j], P), rel=1e-14)


def test_g_field_shape_mismatch():
    with pytest.raises(ValueError):
        g_field(np.zeros((3, 3)), np.zeros((4, 4)), P)


def test_bar_average_examples():
    X = rand_field(np.random.default_rng(2))
    np.testing.assert_allclose(bar_average(X, X, X, P), X, rtol=1e-15)
    ones = np.ones((3, 3))
    np.testing.assert_allclose(bar_average(2 * ones, ones, 0 * ones, P), ones, rtol=1e-15)


@given(a=cplx, b=cplx, theta=st.floats(0, 2 * np.pi), phi=st.floats(0, 2 * np.pi))
def test_g_nonnegative_and_phase_invariant(a, b, theta, phi):
    g = g_eval(a, b, P)
    assert g >= 0
    rotated = g_eval(a * np.exp(1j * theta), b * np.exp(1j * phi), P)
    assert rotated == pytest.approx(g, rel=1e-12, abs=1e-300)


@given(seed=st.integers(0, 2**32 - 1), alpha=st.floats(-10, 10))
def test_bar_average_linear(seed, alpha):
    rng = np.random.default_rng(seed)
    A = [rand_field(rng) for _ in range(3)]
    B = [rand_field(rng) for _ in range(3)]
    lhs = bar_average(*[alpha * a + b for a, b in zip(A, B)], P)
    rhs = alpha * bar_average(*A, P) + bar_average(*B, P)
    np.testing.assert_allclose(lhs, rhs, atol=1e-12 * (1 + abs(alpha)))


def test_l2_norm_examples():
    assert l2_norm(np.zeros((10, 10))) == 0.0
    Z = np.zeros((3, 3), dtype=complex)
    Z[1, 2] = 3 + 4j
    assert l2_norm(Z) == 5.0
    assert l2_norm(np.ones((10, 10))) == 10.0


scales = st.one_of(st.just(0j), st.complex_numbers(min_magnitude=1e-100, max_magnitude=1e3,
                                                   allow_nan=False, allow_infinity=False))


@given(seed=st.integers(0, 2**32 - 1), alpha=scales)
def test_l2_norm_axioms(seed, alpha):
    rng = np.random.default_rng(seed)
    X, Y = rand_field(rng, 5), rand_field(rng, 5)
    assert l2_norm(X + Y) <= l2_norm(X) + l2_norm(Y) + 1e-12
    assert l2_norm(alpha * X) == pytest.approx(abs(alpha) * l2_norm(X), rel=1e-12, abs=1e-300)


def test_state_pair():
    W = StatePair(np.ones((3, 3)), np.zeros((3, 3)))
    assert W.U.dtype == complex and W.J == 2
    assert W.is_finite
    with pytest.raises(ValueError):
        StatePair(np.ones((3, 3)), np.ones((2, 2)))


def test_f_eval_is_g_times_a():
    from sylvnls import f_eval
    a, b = 2 - 1j, 0.5j
    assert f_eval(a, b, P) == pytest.approx(g_eval(a, b, P) * a, rel=1e-14)
