"""Dense solver for the equal-coefficient Sylvester equation A X + X A = C.

The solver triangularises A once (complex Schur form) and back-substitutes
column by column, i.e. Bartels-Stewart with both coefficient matrices
equal. With ``transposed=True`` it solves A X + X A^T = C from the same
factorisation, which is the form the time stepper uses.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from scipy.sparse.linalg import LinearOperator, svds

from .errors import SingularOperator

RESIDUAL_TOL = 1e-10
SINGULAR_RTOL = 1e-12
_DENSE_NORM_MAX = 256
_INVERSE_CACHE_MAX = 160


def _pair_sums(eigs):
    return np.abs(eigs[:, None] + eigs[None, :])


class LyapunovOperator:
    """Factorised operator X -> A X + X A (or A X + X A^T).

    Parameters
    ----------
    A : (n, n) array_like
        Complex square coefficient matrix.
    transposed : bool
        Use A^T as the right coefficient.
    check : bool
        Verify the relative residual of every solve against
        ``RESIDUAL_TOL`` and raise if it is exceeded.
    """

    def __init__(self, A, transposed=False, check=True):
        A = np.asarray(A, dtype=complex)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError(f"A must be square, got shape {A.shape}")
        self.A = A
        self.transposed = bool(transposed)
        self.check = check
        self.T, self.Q = sla.schur(A, output="complex")
        self.eigenvalues = np.diag(self.T).copy()
        self.norm = float(np.linalg.norm(A, 2)) if A.size else 0.0
        self.min_pair_sum = float(_pair_sums(self.eigenvalues).min())
        self.threshold = SINGULAR_RTOL * max(self.norm, np.finfo(float).tiny)
        self.invertible = self.min_pair_sum > self.threshold
        self._inverses = None

    @property
    def n(self):
        return self.A.shape[0]

    def right(self):
        return self.A.T if self.transposed else self.A

    def apply(self, X):
        return self.A @ X + X @ self.right()

    def _shifted_inverses(self):
        """Inverses of T + t_kk I, cached for small operators."""
        n = self.n
        if n > _INVERSE_CACHE_MAX:
            return None
        if self._inverses is None:
            eye = np.eye(n)
            self._inverses = np.stack([
                sla.solve_triangular(self.T + self.T[k, k] * eye, eye.astype(complex))
                for k in range(n)
            ])
        return self._inverses

    def _shifted_solve(self, shifted, k, rhs):
        if shifted is not None:
            return shifted[k] @ rhs
        return sla.solve_triangular(self.T + self.T[k, k] * np.eye(self.n), rhs,
                                    check_finite=False)

    def solve(self, C):
        if not self.invertible:
            raise SingularOperator(self.min_pair_sum, self.threshold)
        C = np.asarray(C, dtype=complex)
        if C.shape != self.A.shape:
            raise ValueError(f"C has shape {C.shape}, expected {self.A.shape}")
        T, Q = self.T, self.Q
        n = self.n
        shifted = self._shifted_inverses()
        Y = np.empty((n, n), dtype=complex)
        if not self.transposed:
            # T Y + Y T = Q^H C Q, columns left to right
            Ct = Q.conj().T @ C @ Q
            for k in range(n):
                rhs = Ct[:, k] - Y[:, :k] @ T[:k, k]
                Y[:, k] = self._shifted_solve(shifted, k, rhs)
            X = Q @ Y @ Q.conj().T
        else:
            # T Y + Y T^T = Q^H C conj(Q), columns right to left
            Ct = Q.conj().T @ C @ Q.conj()
            for k in range(n - 1, -1, -1):
                rhs = Ct[:, k] - Y[:, k + 1:] @ T[k, k + 1:]
                Y[:, k] = self._shifted_solve(shifted, k, rhs)
            X = Q @ Y @ Q.T
        if self.check:
            res = relative_residual(self.A, X, C, self.transposed)
            if not res <= RESIDUAL_TOL:
                raise np.linalg.LinAlgError(
                    f"Lyapunov solve residual {res:.3e} exceeds {RESIDUAL_TOL:.0e}"
                )
        return X


def relative_residual(A, X, C, transposed=False):
    B = A.T if transposed else A
    r = np.linalg.norm(A @ X + X @ B - C)
    return float(r / max(np.linalg.norm(C), np.finfo(float).eps))


def solve_lyapunov(A, C, transposed=False):
    """Solve A X + X A = C (or A X + X A^T = C with ``transposed``)."""
    return LyapunovOperator(A, transposed=transposed).solve(C)


def kronecker_matrix(A, transposed=False):
    """Matrix of X -> A X + X B on row-major vec(X)."""
    A = np.asarray(A, dtype=complex)
    n = A.shape[0]
    B = A.T if transposed else A
    eye = np.eye(n)
    return np.kron(A, eye) + np.kron(eye, B.T)


def kronecker_oracle(A, C, transposed=False):
    """Reference solution by dense elimination on the vectorised system."""
    A = np.asarray(A, dtype=complex)
    n = A.shape[0]
    if n * n > 4096:
        raise ValueError(f"Kronecker oracle limited to (J+1)^2 <= 4096, got {n * n}")
    M = kronecker_matrix(A, transposed)
    x = np.linalg.solve(M, np.asarray(C, dtype=complex).reshape(-1))
    return x.reshape(n, n)


@dataclass(frozen=True)
class SolvabilityReport:
    min_pair_sum: float
    invertible: bool
    deviation_from_iId: float
    threshold: float


def deviation_from_identity(A, shift=1j, transposed=True):
    """Operator 2-norm of X -> A X + X B - shift X, relative to |shift|.

    Dense singular values for small grids, Lanczos (fixed start vector)
    otherwise.
    """
    A = np.asarray(A, dtype=complex)
    n = A.shape[0]
    B = A.T if transposed else A
    scale = abs(shift) if shift else 1.0
    if n * n <= _DENSE_NORM_MAX:
        M = kronecker_matrix(A, transposed) - shift * np.eye(n * n)
        return float(np.linalg.norm(M, 2) / scale)
    Ah, Bh = A.conj().T, B.conj().T

    def mv(x):
        X = x.reshape(n, n)
        return (A @ X + X @ B - shift * X).reshape(-1)

    def rmv(y):
        Y = y.reshape(n, n)
        return (Ah @ Y + Y @ Bh - np.conj(shift) * Y).reshape(-1)

    op = LinearOperator((n * n, n * n), matvec=mv, rmatvec=rmv, dtype=complex)
    # fixed seed: deterministic start vector away from the constant null mode
    v0 = np.random.default_rng(0).standard_normal(n * n).astype(complex)
    s = svds(op, k=1, v0=v0, return_singular_vectors=False, tol=1e-8)
    return float(s[0] / scale)


def solvability_report(A, sigma=None, params=None, transposed=True):
    """Invertibility and distance-from-i*Id diagnostics for A X + X A^T.

    ``sigma`` and ``params`` are accepted for call-site symmetry with the
    scheme assembly; the diagnostics depend on A alone.
    """
    op = LyapunovOperator(A, transposed=transposed, check=False)
    return SolvabilityReport(
        min_pair_sum=op.min_pair_sum,
        invertible=op.invertible,
        deviation_from_iId=deviation_from_identity(op.A, transposed=transposed),
        threshold=op.threshold,
    )
