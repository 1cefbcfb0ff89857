"""Leapfrog time stepping of the coupled scheme.

Every step solves one Lyapunov equation per component,

    A1 U^{n+1} + U^{n+1} A1^T = R_U,    B1 V^{n+1} + V^{n+1} B1^T = R_V.

In split mode the matrices do not depend on the fields, so A1 and B1 are
factorised once per run and the implicit part of the nonlinear term is
resolved by fixed-point iteration.
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .assembly import MatrixMode, assemble_matrices, nonlinear_term, step_rhs
from .errors import FixedPointDivergence
from .fields import StatePair, ThreeLevelState, g_field, l2_norm
from .grid import validate_step_ratio, TimeGrid
from .lyapunov import LyapunovOperator

FP_TOL = 1e-12
FP_MAX = 50
BLOWUP_FACTOR = 1e6


class BootstrapMode(str, Enum):
    TAYLOR = "taylor"
    EXACT = "exact"


def bootstrap(W0, W1_velocity, l, t0=0.0, mode=BootstrapMode.TAYLOR, exact=None):
    """Build levels 0 and 1.

    ``exact`` is a callable t -> StatePair, required for ``EXACT`` mode.
    """
    mode = BootstrapMode(mode)
    if mode is BootstrapMode.EXACT:
        if exact is None:
            raise ValueError("exact bootstrap needs an attached exact solution")
        W1 = exact(t0 + l)
    else:
        if W1_velocity is None or W1_velocity.U.shape != W0.U.shape:
            raise ValueError("initial data and velocity have different shapes")
        W1 = StatePair(W0.U + l * W1_velocity.U, W0.V + l * W1_velocity.V)
    if W1.U.shape != W0.U.shape:
        raise ValueError("bootstrap levels have different shapes")
    return ThreeLevelState(W0, W1, n=1, t=t0 + l)


def two_level_check(W0, W1_velocity, W2, l):
    """Max deviation of W^2 from W^0 + 2 l W_1."""
    dU = l2_norm(W2.U - W0.U - 2 * l * W1_velocity.U)
    dV = l2_norm(W2.V - W0.V - 2 * l * W1_velocity.V)
    return max(dU, dV)


def advance(state, mats, solvers, params, l, source=None, fp_tol=FP_TOL, fp_max=FP_MAX):
    """One leapfrog step from levels (n-1, n) to (n, n+1).

    ``solvers`` is the pair of factorised operators for A1 and B1 (built
    with ``transposed=True``); ``source`` holds the forcing at level n.
    Returns ``(next_state, fixed_point_iterations)``.
    """
    opA, opB = solvers
    if mats.mode is MatrixMode.LITERAL:
        R = step_rhs(state, mats, None, source)
        X, Y = opA.solve(R.U), opB.solve(R.V)
        iters = 1
    else:
        Uc, Vc = state.W_curr.U, state.W_curr.V
        zero = np.zeros_like(Uc)
        # R(X) = R0 - weight * mu1 * g(W^n) * X
        R0 = step_rhs(state, mats, nonlinear_term(state, zero, zero, params, mats.weight), source)
        cU = mats.weight * params.mu1 * g_field(Uc, Vc, params)
        cV = mats.weight * params.mu1 * g_field(Vc, Uc, params)
        X, Y = Uc, Vc
        for iters in range(1, fp_max + 1):
            Xn = opA.solve(R0.U - cU * X)
            Yn = opB.solve(R0.V - cV * Y)
            dX, dY = l2_norm(Xn - X), l2_norm(Yn - Y)
            done = dX <= fp_tol * l2_norm(X) and dY <= fp_tol * l2_norm(Y)
            X, Y = Xn, Yn
            if done:
                break
        else:
            scale = max(l2_norm(X), l2_norm(Y), np.finfo(float).tiny)
            raise FixedPointDivergence(fp_max, max(dX, dY) / scale)
    nxt = ThreeLevelState(state.W_curr, StatePair(X, Y), n=state.n + 1, t=state.t + l)
    return nxt, iters


class Stepper:
    """Scheme configuration bound to one grid and time step.

    Parameters
    ----------
    grid : SpatialGrid
    params : SchemeParams
    l : float
        Time step.
    mode : MatrixMode
    source_fn : callable, optional
        ``t -> StatePair`` of forcing values on the grid.
    """

    def __init__(self, grid, params, l, mode=MatrixMode.SPLIT, source_fn=None,
                 fp_tol=FP_TOL, fp_max=FP_MAX):
        self.grid = grid
        self.params = params
        self.l = float(l)
        self.mode = MatrixMode(mode)
        self.source_fn = source_fn
        self.fp_tol = fp_tol
        self.fp_max = fp_max
        self.ratio = validate_step_ratio(grid, TimeGrid(0.0, self.l, 1))
        self._cached = None
        self.assembled = []  # every (A1, B1) pair factorised, for diagnostics

    def matrices(self, state):
        if self.mode is MatrixMode.SPLIT and self._cached is not None:
            return self._cached
        mats = assemble_matrices(state, self.params, self.ratio, self.l, self.mode)
        solvers = (LyapunovOperator(mats.A1, transposed=True),
                   LyapunovOperator(mats.B1, transposed=True))
        self.assembled.append((mats.A1, mats.B1))
        if self.mode is MatrixMode.SPLIT:
            self._cached = (mats, solvers)
        return mats, solvers

    def step(self, state):
        mats, solvers = self.matrices(state)
        source = self.source_fn(state.t) if self.source_fn is not None else None
        return advance(state, mats, solvers, self.params, self.l, source,
                       self.fp_tol, self.fp_max)


@dataclass
class RunMonitor:
    norm_history: list = field(default_factory=list)  # (n, |U^n|, |V^n|)
    max_fp_iters: int = 0
    diverged: bool = False
    divergence_step: int | None = None
    reason: str | None = None

    def max_ratio(self):
        """max_n |U^n| / |U^0| over the recorded history."""
        u0 = self.norm_history[0][1]
        return max(r[1] for r in self.norm_history) / u0


@dataclass(frozen=True)
class Snapshot:
    n: int
    t: float
    W: StatePair


def run(initial, n_steps, stepper, snapshot_every=10, blowup_factor=BLOWUP_FACTOR,
        on_step=None, strict=False):
    """Advance ``n_steps`` steps or until blow-up.

    Snapshots are taken at levels divisible by ``snapshot_every`` and at the
    final level; ``snapshot_every=0`` keeps only the first and last levels.
    A fixed-point failure is recorded as divergence unless ``strict``.
    Returns ``(final_state, monitor, snapshots)``.
    """
    if n_steps < 0:
        raise ValueError("n_steps must be non-negative")
    monitor = RunMonitor()
    snaps = []
    l = stepper.l
    t_prev = initial.t - l
    n0 = initial.n - 1
    U0norm = l2_norm(initial.W_prev.U)
    V0norm = l2_norm(initial.W_prev.V)
    threshold = blowup_factor * (max(U0norm, V0norm) + 1.0)

    def record(n, t, W):
        nu, nv = l2_norm(W.U), l2_norm(W.V)
        monitor.norm_history.append((n, nu, nv))
        if snapshot_every and n % snapshot_every == 0:
            snaps.append(Snapshot(n, t, W))
        return nu, nv

    record(n0, t_prev, initial.W_prev)
    if not snapshot_every:
        snaps.append(Snapshot(n0, t_prev, initial.W_prev))
    record(initial.n, initial.t, initial.W_curr)
    state = initial
    for _ in range(n_steps):
        try:
            state, iters = stepper.step(state)
        except FixedPointDivergence:
            monitor.diverged = True
            monitor.divergence_step = state.n + 1
            monitor.reason = "fixed point"
            if strict:
                raise
            break
        monitor.max_fp_iters = max(monitor.max_fp_iters, iters)
        nu, nv = record(state.n, state.t, state.W_curr)
        if on_step is not None:
            on_step(state)
        if not (nu <= threshold and nv <= threshold):
            monitor.diverged = True
            monitor.divergence_step = state.n
            monitor.reason = "blow-up"
            break
    if not snaps or snaps[-1].n != state.n:
        snaps.append(Snapshot(state.n, state.t, state.W_curr))
    return state, monitor, snaps
