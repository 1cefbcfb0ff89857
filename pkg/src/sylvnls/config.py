"""Flat ``key = value`` experiment configuration."""

from dataclasses import dataclass, fields
from pathlib import Path

from .assembly import MatrixMode
from .errors import ConfigError
from .grid import SchemeParams, build_grid
from .harness import Regime
from .integrator import FP_MAX, FP_TOL, BootstrapMode
from .solitons import ExperimentKind, SolitonParams

# config key -> attribute name where they differ
_ALIASES = {"lambda": "lam"}


@dataclass(frozen=True)
class ExperimentSpec:
    experiment: ExperimentKind = ExperimentKind.AXIS_ALIGNED
    # soliton family
    a: float = 0.01
    c: float = 0.1
    phi_u: float = 0.0
    phi_v: float = 0.0
    omega: float | None = None
    # domain and steps
    L0: float = -80.0
    L1: float = 100.0
    J: int = 63
    l: float = 0.1
    t0: float = 0.0
    n_steps: int = 100
    # scheme
    sigma1: float = 1.0
    sigma2: float = 1.0
    lam: float = 1.0
    p: float = 2.5
    mu1: float = 0.25
    mu2: float = 0.5
    mu3: float = 0.25
    kappa: int = 2
    g_weight: float | None = None
    mode: MatrixMode = MatrixMode.SPLIT
    bootstrap: BootstrapMode = BootstrapMode.EXACT
    forcing: bool = True
    boundary_flux: bool = True
    fp_tol: float = FP_TOL
    fp_max: int = FP_MAX
    snapshots: int = 10
    # studies
    ladder: tuple = (15, 31, 63)
    sigma: float = 0.1
    t_final: float = 20.0
    regime: Regime = Regime.SPACE
    step_scale: float = 1.0
    t_eval: float = 20.0

    def scheme_params(self):
        return SchemeParams(self.sigma1, self.sigma2, self.lam, self.p,
                            self.mu1, self.mu2, self.mu3, self.kappa, self.g_weight)

    def soliton_params(self):
        return SolitonParams.default(self.experiment, a=self.a, c=self.c, phi_u=self.phi_u,
                                     phi_v=self.phi_v, omega=self.omega)

    def grid(self):
        return build_grid(self.L0, self.L1, self.J)

    @property
    def domain(self):
        return (self.L0, self.L1)

    def validate(self):
        try:
            self.scheme_params()
            self.soliton_params()
            self.grid()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if not self.l > 0:
            raise ConfigError(f"l must be positive, got {self.l}")
        if self.n_steps < 0:
            raise ConfigError("n_steps must be non-negative")
        if self.snapshots < 0:
            raise ConfigError("snapshots must be non-negative")
        return self


def _parse_bool(raw):
    v = raw.strip().lower()
    if v in ("true", "yes", "1", "on"):
        return True
    if v in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def _convert(name, raw, default):
    raw = raw.strip()
    if name in ("omega", "g_weight"):
        return None if raw.lower() in ("", "none", "auto") else float(raw)
    if name == "ladder":
        return tuple(int(x) for x in raw.replace(",", " ").split())
    if isinstance(default, bool):
        return _parse_bool(raw)
    if isinstance(default, (ExperimentKind, MatrixMode, BootstrapMode, Regime)):
        return type(default)(raw)
    if isinstance(default, int):
        return int(raw)
    if isinstance(default, float):
        return float(raw)
    return raw


def parse_config(text, source="<config>"):
    defaults = ExperimentSpec()
    known = {f.name for f in fields(ExperimentSpec)}
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        key, raw = (s.strip() for s in line.split("=", 1))
        name = _ALIASES.get(key, key)
        if name not in known or key in _ALIASES.values():
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if name in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        try:
            values[name] = _convert(name, raw, getattr(defaults, name))
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: bad value for {key!r}: {exc}") from exc
    return ExperimentSpec(**values).validate()


def load_config(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, str(path))
