"""Run configuration: flat ``section.key = value`` files."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from pathlib import Path

from .domain import BOX, TORUS, ExternalPotentialSpec, GridSpec, InteractionSpec, ModeBasis
from .fock import DEFAULT_CAP, EDConfig
from .hartree import ScfParams

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_CONFIG = 2
EXIT_NOINPUT = 66


class ConfigError(ValueError):
    exit_code = EXIT_CONFIG


def _floats(text: str) -> tuple:
    return tuple(float(x) for x in _split_list(text))


def _ints(text: str) -> tuple:
    return tuple(int(x) for x in _split_list(text))


def _split_list(text: str) -> list[str]:
    text = text.strip()
    if text.startswith("[") and text.endswith("]"):
        text = text[1:-1]
    return [t for t in (p.strip() for p in text.replace(";", ",").split(",")) if t]


SCHEMA = {
    "model.kind": str,
    "grid.L": float,
    "grid.n": int,
    "modes.d": int,
    "modes.K": int,
    "potential.kind": str,
    "potential.omega": float,
    "potential.kappa": float,
    "interaction.kind": str,
    "interaction.g": float,
    "interaction.s": float,
    "interaction.coefficients": _floats,
    "scf.eta": float,
    "scf.tol": float,
    "scf.max_iter": int,
    "spectrum.m_modes": int,
    "spectrum.xi": float,
    "ed.M": int,
    "ed.N_list": _ints,
    "ed.k_states": int,
    "ed.cap": int,
    "output.dir": str,
    "output.format": str,
}


@dataclass
class RunConfig:
    kind: str
    L: float = 8.0
    n: int = 256
    d: int = 1
    K: int = 2
    potential: str = "harmonic"
    omega: float = 1.0
    kappa: float = 1.0
    interaction: str = "gaussian"
    g: float = 1.0
    s: float = 0.5
    coefficients: tuple = ()
    eta: float = 0.5
    tol: float = 1e-10
    max_iter: int = 500
    m_modes: int = 32
    xi: float = 200.0
    M: int = 4
    N_list: tuple = (4, 8, 16, 32)
    k_states: int = 6
    cap: int = DEFAULT_CAP
    out_dir: str = "results"
    format: str = "csv"
    raw: dict = field(default_factory=dict, repr=False)

    @property
    def grid(self) -> GridSpec:
        if self.kind == "torus":
            return GridSpec(TORUS, self.n)
        return GridSpec(BOX, self.n, self.L)

    @property
    def mode_basis(self) -> ModeBasis:
        return ModeBasis(self.d, self.K)

    @property
    def external(self) -> ExternalPotentialSpec:
        return ExternalPotentialSpec(self.potential, omega=self.omega, kappa=self.kappa)

    @property
    def v(self) -> InteractionSpec:
        if self.interaction == "gaussian":
            return InteractionSpec.gaussian(self.g, self.s)
        if self.interaction == "cosine_torus":
            return InteractionSpec.cosine_torus(self.g)
        if self.interaction == "cosine_series":
            return InteractionSpec.cosine_series(self.coefficients)
        return InteractionSpec.zero()

    @property
    def scf(self) -> ScfParams:
        return ScfParams(self.eta, self.tol, self.max_iter)

    @property
    def ed(self) -> EDConfig:
        return EDConfig(M=self.M, N_list=tuple(self.N_list), k_states=self.k_states, cap=self.cap)

    def echo(self) -> dict:
        out = asdict(self)
        out.pop("raw")
        return out


_FIELD = {
    "model.kind": "kind", "grid.L": "L", "grid.n": "n", "modes.d": "d", "modes.K": "K",
    "potential.kind": "potential", "potential.omega": "omega", "potential.kappa": "kappa",
    "interaction.kind": "interaction", "interaction.g": "g", "interaction.s": "s",
    "interaction.coefficients": "coefficients", "scf.eta": "eta", "scf.tol": "tol",
    "scf.max_iter": "max_iter", "spectrum.m_modes": "m_modes", "spectrum.xi": "xi",
    "ed.M": "M", "ed.N_list": "N_list", "ed.k_states": "k_states", "ed.cap": "cap",
    "output.dir": "out_dir", "output.format": "format",
}


def parse_config(text: str) -> RunConfig:
    raw: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'section.key = value'")
        key, value = (p.strip() for p in line.split("=", 1))
        if key not in SCHEMA:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            raw[key] = SCHEMA[key](value)
        except ValueError:
            raise ConfigError(f"line {lineno}: cannot parse {key} = {value!r}") from None
    if "model.kind" not in raw:
        raise ConfigError("missing required key 'model.kind'")
    return build_config(raw)


def build_config(raw: dict) -> RunConfig:
    kind = raw["model.kind"]
    if kind not in ("trap", "torus"):
        raise ConfigError(f"model.kind must be 'trap' or 'torus', got {kind!r}")
    defaults: dict = {}
    if kind == "torus":
        defaults.update(potential="none", interaction="cosine_torus")
    cfg = RunConfig(kind=kind, **defaults)
    for key, value in raw.items():
        setattr(cfg, _FIELD[key], value)
    if kind == "torus" and "spectrum.m_modes" not in raw:
        cfg.m_modes = 2 * cfg.K + 1
    cfg.raw = dict(raw)
    validate_config(cfg)
    return cfg


def _require(cond: bool, key: str, msg: str):
    if not cond:
        raise ConfigError(f"{key}: {msg}")


def validate_config(cfg: RunConfig) -> None:
    _require(cfg.L > 0, "grid.L", "must be positive")
    _require(cfg.n >= 8, "grid.n", "must be >= 8")
    _require(cfg.d in (1, 2, 3), "modes.d", "must be 1, 2 or 3")
    _require(cfg.K >= 1, "modes.K", "must be >= 1")
    _require(cfg.potential in ("harmonic", "quartic", "none"), "potential.kind", f"unknown kind {cfg.potential!r}")
    _require(cfg.omega > 0, "potential.omega", "must be positive")
    _require(cfg.kappa > 0, "potential.kappa", "must be positive")
    _require(cfg.interaction in ("gaussian", "cosine_torus", "cosine_series", "zero"),
             "interaction.kind", f"unknown kind {cfg.interaction!r}")
    _require(cfg.g >= 0, "interaction.g", "must be non-negative (repulsive interaction)")
    _require(cfg.s > 0, "interaction.s", "must be positive")
    if cfg.interaction == "cosine_series":
        _require(len(cfg.coefficients) > 0, "interaction.coefficients", "required for cosine_series")
    if cfg.kind == "trap":
        _require(cfg.interaction in ("gaussian", "zero"), "interaction.kind",
                 "the trap model needs a gaussian or zero interaction")
        _require(cfg.potential != "none", "potential.kind", "the trap model needs a confining potential")
    else:
        _require(cfg.n >= 4 * cfg.K + 4, "grid.n", f"must be >= 4K+4 = {4 * cfg.K + 4} on the torus")
    _require(0 < cfg.eta <= 1, "scf.eta", "must lie in (0, 1]")
    _require(cfg.tol > 0, "scf.tol", "must be positive")
    _require(cfg.max_iter >= 1, "scf.max_iter", "must be >= 1")
    _require(2 <= cfg.m_modes <= cfg.grid.size, "spectrum.m_modes", f"must lie in [2, {cfg.grid.size}]")
    _require(cfg.xi >= 0, "spectrum.xi", "must be non-negative")
    _require(cfg.M >= 1, "ed.M", "must be >= 1")
    _require(cfg.M + 1 <= cfg.grid.size, "ed.M", "exceeds the grid size")
    _require(len(cfg.N_list) > 0 and min(cfg.N_list) >= 2, "ed.N_list", "every N must be >= 2")
    _require(list(cfg.N_list) == sorted(set(cfg.N_list)), "ed.N_list", "must be strictly ascending")
    _require(cfg.k_states >= 1, "ed.k_states", "must be >= 1")
    _require(cfg.cap >= 1, "ed.cap", "must be positive")
    _require(cfg.format in ("csv", "json", "both"), "output.format", "must be csv, json or both")


def load_config(path) -> RunConfig:
    """Read and validate a config file.

    Raises ``FileNotFoundError`` for a missing file and ``ConfigError`` for
    unknown keys or out-of-range values.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"config file not found: {path}")
    return parse_config(path.read_text(encoding="utf-8"))
