"""Lyapunov-Sylvester finite-difference solver for a coupled 2D NLS system."""

from .assembly import (
    MatrixMode,
    SchemeMatrices,
    assemble_A,
    assemble_B,
    assemble_matrices,
    diag_coefficients,
    gamma_coefficients,
    step_rhs,
)
from .errors import (
    ConfigError,
    DivergenceError,
    FixedPointDivergence,
    SingularOperator,
)
from .fields import (
    StatePair,
    ThreeLevelState,
    bar_average,
    f_eval,
    g_eval,
    g_field,
    l2_norm,
)
from .grid import MeshRatio, SchemeParams, SpatialGrid, TimeGrid, build_grid, validate_step_ratio
from .integrator import BootstrapMode, RunMonitor, Stepper, advance, bootstrap, run
from .lyapunov import (
    LyapunovOperator,
    SolvabilityReport,
    kronecker_oracle,
    solvability_report,
    solve_lyapunov,
)
from .solitons import ExperimentKind, SolitonParams, exact_state, forcing, residual_oracle

__version__ = "0.1.0"
