"""Space/time discretisation and scheme constants."""

from dataclasses import dataclass

import numpy as np

MU_SUM_TOL = 1e-12
SIGMA_WARN = 1.0


@dataclass(frozen=True)
class SpatialGrid:
    """Uniform grid x_j = L0 + j h, j = 0..J, with h = (L1 - L0)/(J + 1).

    The last node sits at L1 - h; rows/columns 0 and J carry the boundary
    closure of the step matrices.
    """

    L0: float
    L1: float
    J: int

    @property
    def h(self):
        return (self.L1 - self.L0) / (self.J + 1)

    @property
    def size(self):
        return self.J + 1

    def node(self, j):
        return self.L0 + j * self.h

    @property
    def nodes(self):
        return self.L0 + np.arange(self.J + 1) * self.h

    def mesh(self):
        """Return (X, Y) with X[j, m] = x_j and Y[j, m] = y_m."""
        x = self.nodes
        return np.meshgrid(x, x, indexing="ij")


def build_grid(L0, L1, J):
    if not L1 > L0:
        raise ValueError(f"need L1 > L0, got L0={L0}, L1={L1}")
    if int(J) != J or J < 2:
        raise ValueError(f"J must be an integer >= 2, got {J}")
    return SpatialGrid(float(L0), float(L1), int(J))


@dataclass(frozen=True)
class TimeGrid:
    t0: float
    l: float
    n_steps: int

    def __post_init__(self):
        if not self.l > 0:
            raise ValueError(f"time step must be positive, got {self.l}")
        if int(self.n_steps) != self.n_steps or self.n_steps < 0:
            raise ValueError(f"n_steps must be a non-negative integer, got {self.n_steps}")

    def t(self, n):
        return self.t0 + n * self.l


@dataclass(frozen=True)
class SchemeParams:
    """Physical constants and scheme weights.

    ``kappa`` selects the time-difference denominator: 2 is the centred
    leapfrog (u^{n+1} - u^{n-1})/(2l); 1 keeps the literal 1/l coefficient.
    ``g_weight`` is the factor multiplying g in the step matrices; ``None``
    means kappa * l (the scaling consistent with the PDE).
    """

    sigma1: float = 1.0
    sigma2: float = 1.0
    lam: float = 1.0
    p: float = 2.5
    mu1: float = 0.25
    mu2: float = 0.5
    mu3: float = 0.25
    kappa: int = 2
    g_weight: float | None = None

    def __post_init__(self):
        if not (self.sigma1 > 0 and self.sigma2 > 0):
            raise ValueError("sigma1 and sigma2 must be positive")
        if not self.lam > 0:
            raise ValueError(f"lambda must be positive, got {self.lam}")
        if not self.p > 1:
            raise ValueError(f"p must exceed 1, got {self.p}")
        for name in ("mu1", "mu2", "mu3"):
            mu = getattr(self, name)
            if not 0 < mu < 1:
                raise ValueError(f"{name}={mu} outside (0, 1)")
        if abs(self.mu1 + self.mu2 + self.mu3 - 1.0) > MU_SUM_TOL:
            raise ValueError(
                f"mu weights must sum to 1, got {self.mu1 + self.mu2 + self.mu3!r}"
            )
        if self.kappa not in (1, 2):
            raise ValueError(f"kappa must be 1 or 2, got {self.kappa}")

    @property
    def mu(self):
        return (self.mu1, self.mu2, self.mu3)

    @property
    def sigmas(self):
        return (self.sigma1, self.sigma2)

    def weight(self, l):
        """Factor multiplying g (and the source) in the multiplied-through step."""
        return self.kappa * l if self.g_weight is None else self.g_weight


@dataclass(frozen=True)
class MeshRatio:
    sigma: float
    warning: bool = False


def validate_step_ratio(grid, time):
    """Return l/h^2, flagged when it exceeds 1."""
    sigma = time.l / grid.h**2
    return MeshRatio(sigma, sigma > SIGMA_WARN)
