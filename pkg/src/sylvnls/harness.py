"""Manufactured-solution error metrics, refinement studies and CSV tables."""

import csv
import io
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .assembly import MatrixMode, assemble_matrices, nonlinear_term, step_residual
from .errors import DivergenceError
from .fields import StatePair, ThreeLevelState, bar_average, l2_norm
from .grid import TimeGrid, build_grid, validate_step_ratio
from .integrator import BootstrapMode, Stepper, bootstrap, run
from .solitons import (
    ExperimentKind,
    exact_gradient,
    exact_state,
    forcing,
    probe_grid,
    residual_oracle,
)

CSV_HEADER = ("experiment", "J", "h", "l", "mu1", "mu2", "mu3", "kappa",
              "Er", "RelEr", "observed_order")
ORACLE_TOL = 1e-5


class Regime(str, Enum):
    SPACE = "space"
    TIME = "time"


class ManufacturedProblem:
    """Exact pair and grid forcing for one manufactured run.

    With ``boundary_flux`` the forcing also carries the exact normal flux
    through the boundary, so that the ghost-point closure is consistent with
    an exact solution whose normal derivative does not vanish there.
    """

    def __init__(self, kind, sp, params, grid, l, boundary_flux=True, forcing_form="derived"):
        self.kind = ExperimentKind(kind)
        self.sp = sp
        self.params = params
        self.grid = grid
        self.l = float(l)
        self.boundary_flux = boundary_flux
        self.forcing_form = forcing_form
        self.X, self.Y = grid.mesh()

    def exact(self, t):
        return StatePair(*exact_state(self.kind, self.sp, self.X, self.Y, t))

    def velocity(self, t, step=1e-5):
        a, b = self.exact(t + step), self.exact(t - step)
        return StatePair((a.U - b.U) / (2 * step), (a.V - b.V) / (2 * step))

    def _flux_correction(self, t):
        """sigma_i times the stencil terms dropped by the homogeneous closure."""
        mu = self.params.mu
        h = self.grid.h
        grads = [np.zeros_like(self.X, dtype=complex) for _ in range(4)]
        for w, dt in zip(mu, (self.l, 0.0, -self.l)):
            for acc, gval in zip(grads, exact_gradient(self.kind, self.sp, self.X, self.Y, t + dt)):
                acc += w * gval
        ux, uy, vx, vy = grads

        def corr(gx, gy):
            C = np.zeros_like(gx)
            C[0, :] -= 2 * gx[0, :] / h
            C[-1, :] += 2 * gx[-1, :] / h
            C[:, 0] -= 2 * gy[:, 0] / h
            C[:, -1] += 2 * gy[:, -1] / h
            return C

        return (self.params.sigma1 * corr(ux, uy), self.params.sigma2 * corr(vx, vy))

    def source(self, t):
        G1, G2 = forcing(self.kind, self.sp, self.X, self.Y, t, self.params, self.forcing_form)
        if self.boundary_flux:
            c1, c2 = self._flux_correction(t)
            G1, G2 = G1 - c1, G2 - c2
        return StatePair(G1, G2)

    def certify(self, t=0.0, tol=ORACLE_TOL):
        L0, L1 = self.grid.L0, self.grid.L1
        PX, PY = probe_grid(L0, L1, 50)
        r = residual_oracle(self.kind, self.sp, PX, PY, t, self.params, self.forcing_form)
        return r, r <= tol


@dataclass
class ErrorReport:
    Er: float
    RelEr: float
    per_step_errors: list = field(default_factory=list)  # (n, |U-u|, |V-v|)


def compute_errors(snapshots, exact_fn):
    """Er = max_n max(|U^n - u^n|, |V^n - v^n|); RelEr the same relative to |u^n|."""
    if not snapshots:
        raise ValueError("no snapshots to compare")
    per_step = []
    Er = RelEr = 0.0
    for s in snapshots:
        ex = exact_fn(s.t)
        eu, ev = l2_norm(s.W.U - ex.U), l2_norm(s.W.V - ex.V)
        per_step.append((s.n, eu, ev))
        Er = max(Er, eu, ev)
        nu, nv = l2_norm(ex.U), l2_norm(ex.V)
        RelEr = max(RelEr, eu / nu if nu else (math.inf if eu else 0.0),
                    ev / nv if nv else (math.inf if ev else 0.0))
    return ErrorReport(Er, RelEr, per_step)


@dataclass
class ResultRow:
    experiment: str
    J: int
    h: float
    l: float
    mu1: float
    mu2: float
    mu3: float
    kappa: int
    Er: float
    RelEr: float
    observed_order: float | None = None


@dataclass
class OrderEstimate:
    grid_levels: list  # (h, l, error measure)
    observed_orders: list
    regime: Regime
    rows: list = field(default_factory=list)
    assembled: list = field(default_factory=list)  # (A1, B1) per level
    reports: list = field(default_factory=list)


def observed_orders(values):
    return [math.log2(values[k] / values[k + 1]) for k in range(len(values) - 1)]


def _attach_orders(rows, values):
    orders = observed_orders(values)
    for row, o in zip(rows[1:], orders):
        row.observed_order = o
    return orders


def _residual_field(problem, state, W_next, mode):
    params = problem.params
    ratio = validate_step_ratio(problem.grid, TimeGrid(0.0, problem.l, 1))
    mats = assemble_matrices(state, params, ratio, problem.l, mode)
    if mode is MatrixMode.SPLIT:
        N = nonlinear_term(state, W_next.U, W_next.V, params, mats.weight)
    else:
        N = None
    r = step_residual(state, W_next, mats, N, problem.source(state.t))
    scale = params.kappa * problem.l
    return StatePair(r.U / scale, r.V / scale), mats


def scheme_residual(problem, t, mode=MatrixMode.SPLIT):
    """Discrete operator applied to exact samples at levels t-l, t, t+l.

    Normalised by kappa*l so that it is the truncation error of the
    differential form.
    """
    l = problem.l
    state = ThreeLevelState(problem.exact(t - l), problem.exact(t), n=1, t=t)
    return _residual_field(problem, state, problem.exact(t + l), MatrixMode(mode))


def _interior_max(R):
    return float(max(np.abs(R.U[1:-1, 1:-1]).max(), np.abs(R.V[1:-1, 1:-1]).max()))


def truncation_order_study(kind, sp, params, grids=(15, 31, 63), domain=(-20.0, 25.0),
                           regime=Regime.SPACE, mode=MatrixMode.SPLIT, t_eval=20.0,
                           step_scale=1.0, ref_divisor=64):
    """Empirical consistency orders of the scheme on exact soliton samples.

    SPACE: level k uses grid J_k and l = step_scale * h_k.
    TIME: every level uses the finest grid and l_k = step_scale * h_k; the
    residual at l_ref = min(l_k)/ref_divisor is subtracted pointwise so the
    fixed spatial error does not mask the time order.
    Residuals are measured on interior nodes.
    """
    regime = Regime(regime)
    mode = MatrixMode(mode)
    L0, L1 = domain
    grids = list(grids)
    if len(grids) < 2:
        raise ValueError("a refinement study needs at least two levels")
    steps = [step_scale * build_grid(L0, L1, J).h for J in grids]
    levels, rows, assembled = [], [], []
    ref = None
    if regime is Regime.TIME:
        fine = build_grid(L0, L1, max(grids))
        ref_problem = ManufacturedProblem(kind, sp, params, fine, min(steps) / ref_divisor)
        ref, _ = scheme_residual(ref_problem, t_eval, mode)
    for J, l in zip(grids, steps):
        grid = build_grid(L0, L1, max(grids) if regime is Regime.TIME else J)
        problem = ManufacturedProblem(kind, sp, params, grid, l)
        R, mats = scheme_residual(problem, t_eval, mode)
        assembled.append((mats.A1, mats.B1))
        if ref is not None:
            R = StatePair(R.U - ref.U, R.V - ref.V)
        err = _interior_max(R)
        ex = problem.exact(t_eval)
        amp = float(max(np.abs(ex.U).max(), np.abs(ex.V).max()))
        levels.append((grid.h, l, err))
        rows.append(ResultRow(f"truncation-{regime.value}:{ExperimentKind(kind).value}",
                              grid.J, grid.h, l, *params.mu, params.kappa, err, err / amp))
    orders = _attach_orders(rows, [lv[2] for lv in levels])
    return OrderEstimate(levels, orders, regime, rows, assembled)


def simulate(problem, t_final, bootstrap_mode=BootstrapMode.EXACT, mode=MatrixMode.SPLIT,
             snapshot_every=1, source=True, t0=0.0):
    """Run a manufactured problem from t0 to t_final (rounded to whole steps)."""
    n_total = max(int(round((t_final - t0) / problem.l)), 1)
    W0 = problem.exact(t0)
    init = bootstrap(W0, problem.velocity(t0), problem.l, t0, bootstrap_mode, problem.exact)
    stepper = Stepper(problem.grid, problem.params, problem.l, mode,
                      problem.source if source else None)
    final, monitor, snaps = run(init, n_total - 1, stepper, snapshot_every=snapshot_every)
    return final, monitor, snaps, stepper


def convergence_study(kind, sp, params, ladder=(15, 31, 63), domain=(-20.0, 25.0),
                      sigma=0.1, t_final=20.0, mode=MatrixMode.SPLIT,
                      bootstrap_mode=BootstrapMode.EXACT, boundary_flux=True):
    """Full solves on a grid ladder with l = sigma h^2.

    The forcing must first pass the residual oracle. Orders are computed
    from RelEr, which is independent of the number of grid nodes (Er grows
    with the node count for a fixed pointwise error).
    """
    ladder = sorted(ladder)
    if len(ladder) < 2:
        raise ValueError("a convergence ladder needs at least two levels")
    if not t_final > 0:
        raise ValueError("t_final must be positive")
    L0, L1 = domain
    levels, rows, assembled, reports = [], [], [], []
    for J in ladder:
        grid = build_grid(L0, L1, J)
        l = sigma * grid.h**2
        n = max(int(round(t_final / l)), 1)
        l = t_final / n
        problem = ManufacturedProblem(kind, sp, params, grid, l, boundary_flux)
        if not problem.certify()[1]:
            raise ValueError("forcing failed residual-oracle certification")
        _, monitor, snaps, stepper = simulate(problem, t_final, bootstrap_mode, mode)
        assembled.extend(stepper.assembled)
        if monitor.diverged:
            raise DivergenceError(f"J={J} diverged at step {monitor.divergence_step}",
                                  monitor.divergence_step)
        rep = compute_errors(snaps, problem.exact)
        reports.append(rep)
        levels.append((grid.h, l, rep.RelEr))
        rows.append(ResultRow(f"convergence:{ExperimentKind(kind).value}", J, grid.h, l,
                              *params.mu, params.kappa, rep.Er, rep.RelEr))
    orders = _attach_orders(rows, [lv[2] for lv in levels])
    return OrderEstimate(levels, orders, Regime.SPACE, rows, assembled, reports)


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def format_results(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in sorted(rows, key=lambda r: -r.h):
        w.writerow([_fmt(getattr(r, name)) for name in CSV_HEADER])
    return buf.getvalue()


def emit_results(rows, destination):
    """Write ``rows`` as CSV (UTF-8, LF) sorted by h descending."""
    path = Path(destination)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(format_results(rows))
    return path


def parse_results(text):
    out = []
    for rec in csv.DictReader(io.StringIO(text)):
        kw = {}
        for name, raw in rec.items():
            if name == "experiment":
                kw[name] = raw
            elif name in ("J", "kappa"):
                kw[name] = int(raw)
            elif raw == "":
                kw[name] = None
            else:
                kw[name] = float(raw)
        out.append(ResultRow(**kw))
    return out


def emit_snapshot(snapshot, directory, prefix="snapshot"):
    """Write real/imag CSV grids for U and V of one snapshot."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, F in (("U", snapshot.W.U), ("V", snapshot.W.V)):
        for part, A in (("re", F.real), ("im", F.imag)):
            p = directory / f"{prefix}_{snapshot.n:06d}_{name}_{part}.csv"
            with open(p, "w", encoding="utf-8", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                for row in A:
                    w.writerow([repr(float(x)) for x in row])
            paths.append(p)
    return paths
