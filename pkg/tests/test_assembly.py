import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sylvnls import MatrixMode, SchemeParams, StatePair, ThreeLevelState
from sylvnls.assembly import (
    assemble_matrices,
    diag_coefficients,
    gamma_coefficients,
    nonlinear_term,
    step_rhs,
    two_sided,
)
from sylvnls.fields import g_field

P = SchemeParams()


def state_of(U, V=None, Uprev=None):
    U = np.asarray(U, dtype=complex)
    V = np.zeros_like(U) if V is None else V
    Up = np.zeros_like(U) if Uprev is None else Uprev
    return ThreeLevelState(StatePair(Up, np.zeros_like(U)), StatePair(U, V), n=1, t=0.0)


def random_state(rng, J, amp=0.3):
    def f():
        return amp * (rng.standard_normal((J + 1, J + 1)) + 1j * rng.standard_normal((J + 1, J + 1)))
    return ThreeLevelState(StatePair(f(), f()), StatePair(f(), f()), n=1, t=0.0)


def test_gamma_uniform_thirds():
    p = SchemeParams(mu1=1 / 3, mu2=1 / 3, mu3=1 / 3, kappa=1)
    np.testing.assert_allclose(gamma_coefficients(p, 1.0).values, np.full((2, 3), 1 / 3))


@pytest.mark.parametrize("kappa, expected", [(1, 0.1), (2, 0.2)])
def test_gamma_entry(kappa, expected):
    p = SchemeParams(sigma1=2.0, kappa=kappa)
    assert gamma_coefficients(p, 0.1)[1, 2] == pytest.approx(expected, rel=1e-14)


def test_diag_zero_state():
    c = diag_coefficients(state_of(np.zeros((4, 4))), P, 0.3, weight=0.2)
    np.testing.assert_allclose(c.Gamma1, -2 * P.kappa * P.sigma1 * 0.3)


def test_diag_cancellation():
    # g = 1 at the one-hot node; weight chosen so weight * g = 4 kappa sigma1 sigma
    sigma = 0.3
    U = np.zeros((3, 3))
    U[1, 1] = 1.0
    weight = 4 * P.kappa * P.sigma1 * sigma
    c = diag_coefficients(state_of(U), P, sigma, weight)
    assert c.Gamma1[1, 1] == 0
    assert c.Lambda[1, 1] == 0.5j


def test_diag_entrywise():
    rng = np.random.default_rng(3)
    st_ = random_state(rng, 3)
    sigma, w = 0.4, 0.05
    c = diag_coefficients(st_, P, sigma, w)
    U, V = st_.W_curr.U, st_.W_curr.V
    for i in range(4):
        for j in range(4):
            g1 = abs(U[i, j]) ** (P.p - 1) + P.lam * abs(V[i, j]) ** 2
            G1 = 0.5 * (w * g1 - 4 * P.kappa * P.sigma1 * sigma)
            assert c.Gamma1[i, j] == pytest.approx(G1, rel=1e-13)
            assert c.Lambda[i, j] == pytest.approx(0.5 * (1j + 2 * P.mu1 * G1), rel=1e-13)
            assert c.LambdaTilde[i, j] == pytest.approx(0.5 * (-1j + 2 * P.mu3 * G1), rel=1e-13)


def tridiag(d, off):
    n = len(d)
    M = np.diag(np.asarray(d, dtype=complex))
    for k in range(n - 1):
        M[k, k + 1] = M[k + 1, k] = off
    M[0, 1] *= 2
    M[n - 1, n - 2] *= 2
    return M


def test_J2_explicit_split():
    sigma, l = 0.5, 0.1
    m = assemble_matrices(state_of(np.zeros((3, 3))), P, sigma, l)
    # kappa=2, sigma1=1: Gamma_1j = 2*0.5*mu_j, diagonal base -2
    g11, g12, g13 = 0.25, 0.5, 0.25
    A1 = np.array([[0.5j - 0.5, 2 * g11, 0], [g11, 0.5j - 0.5, g11], [0, 2 * g11, 0.5j - 0.5]])
    A2 = np.array([[-1, 2 * g12, 0], [g12, -1, g12], [0, 2 * g12, -1]], dtype=complex)
    A3 = np.array([[-0.5j - 0.5, 2 * g13, 0], [g13, -0.5j - 0.5, g13], [0, 2 * g13, -0.5j - 0.5]])
    np.testing.assert_array_equal(m.A1, A1)
    np.testing.assert_array_equal(m.A2, A2)
    np.testing.assert_array_equal(m.A3, A3)
    assert m.A1[0, 1] == 2 * m.A1[1, 0] and m.A1[2, 1] == 2 * m.A1[1, 2]


def test_literal_J4_handwritten():
    rng = np.random.default_rng(4)
    s = random_state(rng, 4)
    sigma, l = 0.2, 0.05
    w = P.kappa * l
    m = assemble_matrices(s, P, sigma, l, MatrixMode.LITERAL)
    U, V = s.W_curr.U, s.W_curr.V
    g_diag = np.array([abs(U[j, j]) ** 1.5 + abs(V[j, j]) ** 2 for j in range(5)])
    G = 0.5 * w * g_diag - 2 * P.kappa * sigma
    off = [P.kappa * sigma * mu for mu in P.mu]
    np.testing.assert_allclose(m.A1, tridiag(0.5 * (1j + 2 * P.mu1 * G), off[0]), rtol=1e-14)
    np.testing.assert_allclose(m.A2, tridiag(P.mu2 * G, off[1]), rtol=1e-14)
    np.testing.assert_allclose(m.A3, tridiag(0.5 * (-1j + 2 * P.mu3 * G), off[2]), rtol=1e-14)
    h_diag = np.array([abs(V[j, j]) ** 1.5 + abs(U[j, j]) ** 2 for j in range(5)])
    Gb = 0.5 * w * h_diag - 2 * P.kappa * sigma
    np.testing.assert_allclose(m.B1, tridiag(0.5 * (1j + 2 * P.mu1 * Gb), off[0]), rtol=1e-14)


def test_symmetric_pair_gives_equal_B():
    rng = np.random.default_rng(5)
    U = rng.standard_normal((5, 5)) + 0j
    s = state_of(U, V=U.copy())
    for mode in MatrixMode:
        m = assemble_matrices(s, P, 0.3, 0.1, mode)
        for a, b in zip(m.A, m.B):
            np.testing.assert_array_equal(a, b)


def test_modes_agree_without_nonlinearity():
    p0 = SchemeParams(g_weight=0.0)
    s = random_state(np.random.default_rng(6), 5)
    ms = assemble_matrices(s, p0, 0.3, 0.1, MatrixMode.SPLIT)
    ml = assemble_matrices(s, p0, 0.3, 0.1, MatrixMode.LITERAL)
    for a, b in zip(ms.A + ms.B, ml.A + ml.B):
        np.testing.assert_array_equal(a, b)
    zs = state_of(np.zeros((4, 4)))
    ms = assemble_matrices(zs, P, 0.3, 0.1, MatrixMode.SPLIT)
    ml = assemble_matrices(zs, P, 0.3, 0.1, MatrixMode.LITERAL)
    for a, b in zip(ms.A + ms.B, ml.A + ml.B):
        np.testing.assert_array_equal(a, b)


@settings(max_examples=30, deadline=None)
@given(J=st.integers(2, 20), sigma=st.floats(0.01, 5), mode=st.sampled_from(list(MatrixMode)),
       seed=st.integers(0, 2**16))
def test_structure(J, sigma, mode, seed):
    s = random_state(np.random.default_rng(seed), J)
    m = assemble_matrices(s, P, sigma, 0.1, mode)
    for M in m.A + m.B:
        assert np.count_nonzero(M) == 3 * (J + 1) - 2
        assert M[0, 1] == 2 * M[1, 0]
        assert M[J, J - 1] == 2 * M[J - 1, J]


@given(J=st.integers(2, 12), sigma=st.floats(0.01, 5))
def test_level_sum_is_laplacian(J, sigma):
    m = assemble_matrices(state_of(np.zeros((J + 1, J + 1))), P, sigma, 0.1)
    S = m.A1 + m.A2 + m.A3
    k = P.kappa * P.sigma1 * sigma
    np.testing.assert_allclose(S, tridiag(np.full(J + 1, -2 * k), k), rtol=1e-13, atol=1e-15)


def test_zero_rhs():
    s = state_of(np.zeros((4, 4)))
    m = assemble_matrices(s, P, 0.3, 0.1)
    R = step_rhs(s, m, nonlinear_term(s, 0 * s.W_curr.U, 0 * s.W_curr.V, P, m.weight))
    assert np.all(R.U == 0) and np.all(R.V == 0)


def test_one_hot_rhs_J2():
    U = np.zeros((3, 3))
    U[1, 1] = 1.0
    s = state_of(U)
    m = assemble_matrices(s, P, 0.5, 0.1)
    Z = np.zeros((3, 3))
    R = step_rhs(s, m, nonlinear_term(s, Z, Z, P, m.weight))
    # Gamma_12 = 0.5, A2 diagonal -1, weight*g*mu2 = 0.2*0.5 at the centre
    expected = -np.array([[0, 1, 0], [1, -2 + 0.1, 1], [0, 1, 0]])
    np.testing.assert_allclose(R.U, expected, atol=1e-15)
    assert np.all(R.V == 0)


def test_literal_rhs_has_no_explicit_nonlinearity():
    s = random_state(np.random.default_rng(7), 3)
    m = assemble_matrices(s, P, 0.5, 0.1, MatrixMode.LITERAL)
    R = step_rhs(s, m)
    expected = -(two_sided(m.A2, s.W_curr.U) + two_sided(m.A3, s.W_prev.U))
    np.testing.assert_allclose(R.U, expected, rtol=1e-15)


def test_nonlinear_term_uses_bar_average():
    s = random_state(np.random.default_rng(8), 3)
    X = np.ones((4, 4), dtype=complex)
    N = nonlinear_term(s, X, X, P, 0.2)
    ubar = P.mu1 * X + P.mu2 * s.W_curr.U + P.mu3 * s.W_prev.U
    np.testing.assert_allclose(N.U, 0.2 * g_field(s.W_curr.U, s.W_curr.V, P) * ubar, rtol=1e-14)


def test_shape_mismatch():
    s = state_of(np.zeros((4, 4)))
    m = assemble_matrices(state_of(np.zeros((5, 5))), P, 0.3, 0.1)
    with pytest.raises(ValueError):
        step_rhs(s, m)
