"""Step-matrix assembly for the three-level Lyapunov scheme.

Each level of the scheme contributes a two-sided term ``A X + X A^T``.
The transpose on the right places the Neumann ghost-point doubling on the
first/last column for the y-direction, mirroring what ``A X`` does for the
first/last row; in the interior A is symmetric and the two forms agree.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .fields import StatePair, bar_average, g_field


class MatrixMode(str, Enum):
    SPLIT = "split"  # field-independent matrices, g on the right-hand side
    LITERAL = "literal"  # g sampled on the grid diagonal inside the matrices


@dataclass(frozen=True)
class GammaTable:
    """Off-diagonal weights kappa * sigma_i * mu_j * (l/h^2), 1-based (i, j)."""

    values: np.ndarray  # shape (2, 3)

    def __getitem__(self, key):
        i, j = key
        return self.values[i - 1, j - 1]


@dataclass(frozen=True)
class DiagCoefficients:
    Gamma1: np.ndarray
    Gamma2: np.ndarray
    Lambda: np.ndarray
    LambdaTilde: np.ndarray
    Theta: np.ndarray
    ThetaTilde: np.ndarray
    base1: float  # Gamma1 with g = 0
    base2: float
    mu: tuple


@dataclass(frozen=True)
class SchemeMatrices:
    A1: np.ndarray
    A2: np.ndarray
    A3: np.ndarray
    B1: np.ndarray
    B2: np.ndarray
    B3: np.ndarray
    mode: MatrixMode
    weight: float

    @property
    def A(self):
        return (self.A1, self.A2, self.A3)

    @property
    def B(self):
        return (self.B1, self.B2, self.B3)


def gamma_coefficients(params, ratio):
    sigma = ratio.sigma if hasattr(ratio, "sigma") else float(ratio)
    table = params.kappa * sigma * np.outer(params.sigmas, params.mu)
    return GammaTable(table.astype(complex))


def diag_coefficients(state, params, ratio, weight):
    """Diagonal scheme coefficients from the level-n fields of ``state``."""
    sigma = ratio.sigma if hasattr(ratio, "sigma") else float(ratio)
    U, V = state.W_curr.U, state.W_curr.V
    base1 = -2.0 * params.kappa * params.sigma1 * sigma
    base2 = -2.0 * params.kappa * params.sigma2 * sigma
    Gamma1 = 0.5 * weight * g_field(U, V, params) + base1
    Gamma2 = 0.5 * weight * g_field(V, U, params) + base2
    mu1, _, mu3 = params.mu
    return DiagCoefficients(
        Gamma1=Gamma1,
        Gamma2=Gamma2,
        Lambda=0.5 * (1j + 2 * mu1 * Gamma1),
        LambdaTilde=0.5 * (-1j + 2 * mu3 * Gamma1),
        Theta=0.5 * (1j + 2 * mu1 * Gamma2),
        ThetaTilde=0.5 * (-1j + 2 * mu3 * Gamma2),
        base1=base1,
        base2=base2,
        mu=params.mu,
    )


def neumann_tridiag(diag, off, n=None):
    """Tridiagonal matrix with entries (0,1) and (J,J-1) doubled."""
    diag = np.asarray(diag, dtype=complex)
    if diag.ndim == 0:
        if n is None:
            raise ValueError("n is required for a scalar diagonal")
        diag = np.full(n, diag, dtype=complex)
    n = diag.size
    M = np.diag(diag)
    idx = np.arange(n - 1)
    M[idx, idx + 1] = off
    M[idx + 1, idx] = off
    M[0, 1] = 2 * off
    M[n - 1, n - 2] = 2 * off
    return M


def _diagonal(level, field_diag, gamma_base, mu, mode):
    mu1, mu2, mu3 = mu
    if mode is MatrixMode.SPLIT:
        G = gamma_base
    else:
        G = np.diag(field_diag).real
    if level == 1:
        return 0.5 * (1j + 2 * mu1 * G)
    if level == 2:
        return mu2 * G + 0j
    if level == 3:
        return 0.5 * (-1j + 2 * mu3 * G)
    raise ValueError(f"level must be 1, 2 or 3, got {level}")


def assemble_A(level, coeffs, gamma, mode=MatrixMode.SPLIT):
    mode = MatrixMode(mode)
    n = coeffs.Gamma1.shape[0]
    d = _diagonal(level, coeffs.Gamma1, coeffs.base1, coeffs.mu, mode)
    return neumann_tridiag(d, gamma[1, level], n)


def assemble_B(level, coeffs, gamma, mode=MatrixMode.SPLIT):
    mode = MatrixMode(mode)
    n = coeffs.Gamma2.shape[0]
    d = _diagonal(level, coeffs.Gamma2, coeffs.base2, coeffs.mu, mode)
    return neumann_tridiag(d, gamma[2, level], n)


def assemble_matrices(state, params, ratio, l, mode=MatrixMode.SPLIT):
    mode = MatrixMode(mode)
    weight = params.weight(l)
    coeffs = diag_coefficients(state, params, ratio, weight)
    gamma = gamma_coefficients(params, ratio)
    A = [assemble_A(k, coeffs, gamma, mode) for k in (1, 2, 3)]
    B = [assemble_B(k, coeffs, gamma, mode) for k in (1, 2, 3)]
    return SchemeMatrices(*A, *B, mode=mode, weight=weight)


def two_sided(A, X):
    return A @ X + X @ A.T


def nonlinear_term(state, X, Y, params, weight):
    """weight * g(W^n) * (mu-average with trial level n+1 values X, Y)."""
    U, V = state.W_curr.U, state.W_curr.V
    ubar = bar_average(X, U, state.W_prev.U, params)
    vbar = bar_average(Y, V, state.W_prev.V, params)
    return StatePair(
        weight * g_field(U, V, params) * ubar,
        weight * g_field(V, U, params) * vbar,
    )


def step_rhs(state, mats, nonlinear=None, source=None):
    """Right-hand sides R_U, R_V of A1 X + X A1^T = R_U and B1 Y + Y B1^T = R_V.

    ``nonlinear`` is the explicit g-term pair (zero in literal mode, where g
    lives in the matrices); ``source`` holds the PDE forcing values G1, G2.
    """
    Wc, Wp = state.W_curr, state.W_prev
    if Wc.U.shape != mats.A1.shape:
        raise ValueError(f"state shape {Wc.U.shape} does not match matrices {mats.A1.shape}")
    RU = two_sided(mats.A2, Wc.U) + two_sided(mats.A3, Wp.U)
    RV = two_sided(mats.B2, Wc.V) + two_sided(mats.B3, Wp.V)
    if nonlinear is not None:
        RU = RU + nonlinear.U
        RV = RV + nonlinear.V
    RU, RV = -RU, -RV
    if source is not None:
        RU = RU + mats.weight * source.U
        RV = RV + mats.weight * source.V
    return StatePair(RU, RV)


def step_residual(state, W_next, mats, nonlinear=None, source=None):
    """Defect of the step equations when level n+1 is ``W_next``."""
    R = step_rhs(state, mats, nonlinear, source)
    return StatePair(
        two_sided(mats.A1, W_next.U) - R.U,
        two_sided(mats.B1, W_next.V) - R.V,
    )
