"""Run configuration: defaults, flat key-value config files, CLI overrides.

The file format is one ``section.key = value`` assignment per line with ``#``
comments, chosen for diff-friendliness. Every run echoes its effective
configuration into the output directory, and re-running from that echo
reproduces all outputs byte-identically (the whole pipeline is seedless).
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from pathlib import Path

from .errors import ConfigurationError
from .model import InteractionKind, InteractionSpec, PotentialSpec


@dataclass
class RunConfig:
    # potential geometry [L, 1/L^2]
    well_length: float = 50.0
    barrier_width: float = 3.0
    barrier_height: float = 0.3
    # interaction
    kind: str = "hard_coulomb"
    softening: float = 1.0
    strength: float = 0.0
    # mesh
    h: float = 0.5
    # solver
    num_pairs: int = 200
    tol: float = 1e-8
    norm_floor: float = 0.999
    # scan
    u_min: float = -0.5
    u_max: float = 1.0
    num_u: int = 301
    refine: bool = True
    refine_du: float = 1e-4
    # quench
    quench_u: float = 0.3638
    time_horizon: float = 0.0   # 0 = auto: 1.25 periods of the slowest beat
    num_times: int = 2048
    # oracle
    oracle_grid: int = 72
    # execution
    outdir: str = "run"
    workers: int = 1

    _KEYMAP = {
        "potential.well_length": "well_length",
        "potential.barrier_width": "barrier_width",
        "potential.barrier_height": "barrier_height",
        "interaction.kind": "kind",
        "interaction.softening": "softening",
        "interaction.strength": "strength",
        "mesh.h": "h",
        "solver.num_pairs": "num_pairs",
        "solver.tol": "tol",
        "solver.norm_floor": "norm_floor",
        "scan.u_min": "u_min",
        "scan.u_max": "u_max",
        "scan.num_u": "num_u",
        "scan.refine": "refine",
        "scan.refine_du": "refine_du",
        "quench.u": "quench_u",
        "quench.time_horizon": "time_horizon",
        "quench.num_times": "num_times",
        "oracle.grid": "oracle_grid",
        "output.dir": "outdir",
        "workers": "workers",
    }

    def potential_spec(self) -> PotentialSpec:
        return PotentialSpec(self.well_length, self.barrier_width, self.barrier_height)

    def interaction_spec(self) -> InteractionSpec:
        return InteractionSpec(
            InteractionKind.from_string(self.kind), self.softening, self.strength
        )

    def validate(self) -> "RunConfig":
        if self.h <= 0:
            raise ConfigurationError("mesh.h must be positive")
        if self.num_pairs < 1:
            raise ConfigurationError("solver.num_pairs must be at least 1")
        if not 0 < self.norm_floor <= 1:
            raise ConfigurationError("solver.norm_floor must be in (0, 1]")
        if self.num_u < 2:
            raise ConfigurationError("scan.num_u must be at least 2")
        if self.u_min >= self.u_max:
            raise ConfigurationError("scan.u_min must be below scan.u_max")
        if self.num_times < 2:
            raise ConfigurationError("quench.num_times must be at least 2")
        self.potential_spec()
        self.interaction_spec()
        return self


def _parse_value(name: str, raw: str, target_type: type):
    raw = raw.strip()
    try:
        if target_type is bool:
            if raw.lower() in ("true", "1", "yes", "on"):
                return True
            if raw.lower() in ("false", "0", "no", "off"):
                return False
            raise ValueError(raw)
        if target_type is int:
            return int(raw)
        if target_type is float:
            return float(raw)
        return raw
    except ValueError as err:
        raise ConfigurationError(f"bad value for {name}: {raw!r}") from err


def load_config(path) -> RunConfig:
    """Parse a flat dotted-key config file into a RunConfig."""
    cfg = RunConfig()
    types = {f.name: f.type for f in fields(RunConfig)}
    text = Path(path).read_text()
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigurationError(f"{path}:{lineno}: expected 'key = value'")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        attr = RunConfig._KEYMAP.get(key)
        if attr is None:
            raise ConfigurationError(f"{path}:{lineno}: unknown key {key!r}")
        target = {"float": float, "int": int, "str": str, "bool": bool}[types[attr]] \
            if isinstance(types[attr], str) else types[attr]
        setattr(cfg, attr, _parse_value(key, raw, target))
    return cfg.validate()


def save_config(cfg: RunConfig, path) -> None:
    """Echo the effective configuration in the same flat format."""
    lines = []
    for key, attr in RunConfig._KEYMAP.items():
        value = getattr(cfg, attr)
        if isinstance(value, bool):
            rendered = "true" if value else "false"
        elif isinstance(value, float):
            rendered = repr(value)
        else:
            rendered = str(value)
        lines.append(f"{key} = {rendered}")
    Path(path).write_text("\n".join(lines) + "\n")
