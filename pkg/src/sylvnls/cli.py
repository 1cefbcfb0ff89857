"""Command-line entry point: run, convergence, truncation, oracle."""

import argparse
import csv
import logging
import sys
from pathlib import Path

from .config import ExperimentSpec, load_config
from .errors import ConfigError, DivergenceError, FixedPointDivergence, SingularOperator
from .harness import (
    ManufacturedProblem,
    ResultRow,
    compute_errors,
    convergence_study,
    emit_results,
    emit_snapshot,
    truncation_order_study,
)
from .integrator import Stepper, bootstrap, run
from .solitons import fit_omega, probe_grid, residual_oracle

EXIT_OK = 0
EXIT_DIVERGED = 2
EXIT_CONFIG = 3

log = logging.getLogger("sylvnls")


def _write_rows(path, header, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def cmd_run(cfg, out, snapshots):
    grid = cfg.grid()
    params = cfg.scheme_params()
    problem = ManufacturedProblem(cfg.experiment, cfg.soliton_params(), params, grid,
                                  cfg.l, cfg.boundary_flux)
    W0 = problem.exact(cfg.t0)
    init = bootstrap(W0, problem.velocity(cfg.t0), cfg.l, cfg.t0, cfg.bootstrap,
                     problem.exact)
    stepper = Stepper(grid, params, cfg.l, cfg.mode,
                      problem.source if cfg.forcing else None, cfg.fp_tol, cfg.fp_max)
    if stepper.ratio.warning:
        log.warning("l/h^2 = %.3g exceeds 1", stepper.ratio.sigma)
    final, monitor, snaps = run(init, max(cfg.n_steps - 1, 0), stepper,
                                snapshot_every=snapshots)
    rep = compute_errors(snaps, problem.exact)
    row = ResultRow(f"run:{cfg.experiment.value}", grid.J, grid.h, cfg.l, *params.mu,
                    params.kappa, rep.Er, rep.RelEr)
    emit_results([row], out / "run.csv")
    _write_rows(out / "norms.csv", ("n", "norm_U", "norm_V"),
                [(n, repr(a), repr(b)) for n, a, b in monitor.norm_history])
    _write_rows(out / "errors.csv", ("n", "err_U", "err_V"),
                [(n, repr(a), repr(b)) for n, a, b in rep.per_step_errors])
    if snapshots:
        for s in snaps:
            emit_snapshot(s, out / "snapshots")
    print(f"J={grid.J} h={grid.h:g} l={cfg.l:g} steps={final.n}  Er={rep.Er:.6e} "
          f"RelEr={rep.RelEr:.6e} fp_iters<={monitor.max_fp_iters}")
    if monitor.diverged:
        print(f"diverged at step {monitor.divergence_step} ({monitor.reason})")
        return EXIT_DIVERGED
    return EXIT_OK


def cmd_convergence(cfg, out, snapshots):
    est = convergence_study(cfg.experiment, cfg.soliton_params(), cfg.scheme_params(),
                            cfg.ladder, cfg.domain, cfg.sigma, cfg.t_final, cfg.mode,
                            cfg.bootstrap, cfg.boundary_flux)
    emit_results(est.rows, out / "convergence.csv")
    for row in est.rows:
        print(f"J={row.J:4d} h={row.h:.6g} l={row.l:.6g} Er={row.Er:.6e} "
              f"RelEr={row.RelEr:.6e} order={row.observed_order}")
    return EXIT_OK


def cmd_truncation(cfg, out, snapshots):
    est = truncation_order_study(cfg.experiment, cfg.soliton_params(), cfg.scheme_params(),
                                 cfg.ladder, cfg.domain, cfg.regime, cfg.mode,
                                 cfg.t_eval, cfg.step_scale)
    emit_results(est.rows, out / "truncation.csv")
    for row in est.rows:
        print(f"J={row.J:4d} h={row.h:.6g} l={row.l:.6g} residual={row.Er:.6e} "
              f"order={row.observed_order}")
    return EXIT_OK


def cmd_oracle(cfg, out, snapshots):
    sp = cfg.soliton_params()
    params = cfg.scheme_params()
    X, Y = probe_grid(cfg.L0, cfg.L1, 50)
    rows = []
    for form in ("derived", "printed"):
        r = residual_oracle(cfg.experiment, sp, X, Y, cfg.t0, params, form)
        rows.append((cfg.experiment.value, form, repr(sp.omega), repr(r), str(r <= 1e-5).lower()))
        print(f"{form:8s} omega={sp.omega:.10g} max residual={r:.3e}")
    w, r = fit_omega(cfg.experiment, sp, X, Y, cfg.t0, params, "printed")
    rows.append((cfg.experiment.value, "printed-best-omega", repr(w), repr(r),
                 str(r <= 1e-5).lower()))
    print(f"printed forcing, best omega={w:.10g}: max residual={r:.3e}")
    _write_rows(out / "oracle.csv", ("experiment", "forcing", "omega", "max_residual",
                                     "certified"), rows)
    return EXIT_OK


COMMANDS = {
    "run": cmd_run,
    "convergence": cmd_convergence,
    "truncation": cmd_truncation,
    "oracle": cmd_oracle,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="sylvnls", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        p = sub.add_parser(name, help=fn.__doc__)
        p.add_argument("--config", type=Path, help="key = value experiment file")
        p.add_argument("--out", type=Path, default=Path("results"), help="output directory")
        p.add_argument("--snapshots", type=int, default=None,
                       help="snapshot cadence in steps (0: first and last only)")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config) if args.config else ExperimentSpec()
        snapshots = cfg.snapshots if args.snapshots is None else args.snapshots
        if snapshots < 0:
            raise ConfigError("--snapshots must be non-negative")
        return COMMANDS[args.command](cfg, args.out, snapshots)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DivergenceError, FixedPointDivergence) as exc:
        print(f"diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except SingularOperator as exc:
        print(f"singular step operator: {exc}", file=sys.stderr)
        return EXIT_DIVERGED


if __name__ == "__main__":
    sys.exit(main())
