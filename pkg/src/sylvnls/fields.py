"""Grid fields, the mixed nonlinearity g and the three-level average.

Fields are plain ``(J+1, J+1)`` complex numpy arrays, indexed ``[j, m]``
with j along x and m along y.
"""

from dataclasses import dataclass

import numpy as np


def as_field(X, name="field"):
    X = np.asarray(X, dtype=complex)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise ValueError(f"{name} must be a square 2D array, got shape {X.shape}")
    return X


def _check_same_shape(*arrays):
    shapes = {np.shape(a) for a in arrays}
    if len(shapes) != 1:
        raise ValueError(f"shape mismatch: {sorted(shapes)}")


@dataclass(frozen=True)
class StatePair:
    U: np.ndarray
    V: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "U", as_field(self.U, "U"))
        object.__setattr__(self, "V", as_field(self.V, "V"))
        _check_same_shape(self.U, self.V)

    @property
    def J(self):
        return self.U.shape[0] - 1

    def is_finite(self):
        return bool(np.isfinite(self.U).all() and np.isfinite(self.V).all())

    def scaled(self, alpha):
        return StatePair(alpha * self.U, alpha * self.V)

    @classmethod
    def zeros(cls, J):
        z = np.zeros((J + 1, J + 1), dtype=complex)
        return cls(z, z.copy())


@dataclass(frozen=True)
class ThreeLevelState:
    """Levels n-1 and n of the leapfrog recursion."""

    W_prev: StatePair
    W_curr: StatePair
    n: int
    t: float

    def __post_init__(self):
        if self.W_prev.U.shape != self.W_curr.U.shape:
            raise ValueError("W_prev and W_curr have different grid sizes")

    @property
    def J(self):
        return self.W_curr.J


def g_eval(a, b, params):
    """|a|^(p-1) + lambda |b|^2."""
    return np.abs(a) ** (params.p - 1) + params.lam * np.abs(b) ** 2


def f_eval(a, b, params):
    """The full nonlinear term g(a, b) a."""
    return g_eval(a, b, params) * a


def g_field(U, V, params):
    _check_same_shape(U, V)
    return g_eval(np.asarray(U), np.asarray(V), params)


def bar_average(next_, curr, prev, params):
    """mu1 next + mu2 curr + mu3 prev."""
    _check_same_shape(next_, curr, prev)
    return params.mu1 * next_ + params.mu2 * curr + params.mu3 * prev


def l2_norm(X):
    """Unscaled Frobenius norm over all grid entries."""
    return float(np.linalg.norm(np.asarray(X).ravel()))
