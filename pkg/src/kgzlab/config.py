"""Experiment configuration: strict key = value files with full validation.

Format: `[section]` headers, `key = value` lines, `#` comments.  Parsing is
not fail-fast: syntax problems carry line numbers, duplicate keys cite both
lines, unknown sections/keys are rejected, and all semantic violations are
aggregated into one error.
"""

from __future__ import annotations

from dataclasses import dataclass, fields


class ConfigError(ValueError):
    def __init__(self, errors: list[str]):
        super().__init__("invalid configuration:\n  " + "\n  ".join(errors))
        self.errors = errors


@dataclass
class ExperimentConfig:
    # [grid]
    nr: int = 0  # 0 = derive from dr, t_max, and the data support
    dr: float = 0.02
    # [time]
    cfl: float = 0.9
    t0: float = 0.0
    t_max: float = 100.0
    snapshot_stride: int = 56
    # [data]
    family: str = "gaussian"
    eps: float = 0.01
    sigma: float = 1.0
    center: float = 0.0
    amp_e0: float = 1.0
    amp_e1: float = 0.0
    amp_n0: float = 1.0
    amp_n1: float = 0.0
    # [ghost]
    delta: float = 0.05
    # [picard]
    k_max: int = 6
    tier: int = 1
    eps_list: tuple[float, ...] = (0.04, 0.02, 0.01, 0.005)
    picard_t_max: float = 50.0
    picard_dr: float = 0.04
    # [foliation]
    foliation_dr: float = 0.04
    foliation_t_max: float = 800.0
    # [output]
    out_dir: str = "out"
    formats: str = "csv"

    @property
    def amps(self) -> tuple[float, float, float, float]:
        return (self.amp_e0, self.amp_e1, self.amp_n0, self.amp_n1)


_SCHEMA = {
    "grid": {"nr": int, "dr": float},
    "time": {"cfl": float, "t0": float, "t_max": float, "snapshot_stride": int},
    "data": {
        "family": str, "eps": float, "sigma": float, "center": float,
        "amp_e0": float, "amp_e1": float, "amp_n0": float, "amp_n1": float,
    },
    "ghost": {"delta": float},
    "picard": {
        "k_max": int, "tier": int, "eps_list": "float_list",
        "picard_t_max": float, "picard_dr": float,
    },
    "foliation": {"foliation_dr": float, "foliation_t_max": float},
    "output": {"out_dir": str, "formats": str},
}


def _validate(cfg: ExperimentConfig) -> list[str]:
    errs = []

    def check(cond, msg):
        if not cond:
            errs.append(msg)

    check(cfg.nr == 0 or cfg.nr >= 16, f"grid.nr must be 0 (auto) or >= 16, got {cfg.nr}")
    check(cfg.dr > 0.0, f"grid.dr must be positive, got {cfg.dr}")
    check(0.0 < cfg.cfl <= 1.0, f"time.cfl must be in (0, 1], got {cfg.cfl}")
    check(cfg.t_max > cfg.t0, f"time.t_max must exceed t0, got {cfg.t_max}")
    check(cfg.snapshot_stride >= 1, f"time.snapshot_stride must be >= 1, got {cfg.snapshot_stride}")
    check(cfg.family in ("gaussian", "bump"), f"data.family unknown: {cfg.family!r}")
    check(cfg.eps >= 0.0, f"data.eps must be >= 0, got {cfg.eps}")
    check(cfg.sigma > 0.0, f"data.sigma must be positive, got {cfg.sigma}")
    check(cfg.sigma >= 8.0 * cfg.dr, f"data.sigma={cfg.sigma} under-resolved at dr={cfg.dr}")
    check(0.0 < cfg.delta <= 1.0, f"ghost.delta must be in (0, 1], got {cfg.delta}")
    check(cfg.k_max >= 3, f"picard.k_max must be >= 3, got {cfg.k_max}")
    check(cfg.tier in (0, 1, 2), f"picard.tier must be 0, 1 or 2, got {cfg.tier}")
    check(len(cfg.eps_list) >= 1, "picard.eps_list must not be empty")
    check(all(e > 0 for e in cfg.eps_list), "picard.eps_list entries must be positive")
    check(cfg.picard_dr > 0.0, "picard.picard_dr must be positive")
    check(cfg.foliation_dr > 0.0, "foliation.foliation_dr must be positive")
    check(cfg.foliation_t_max <= 1000.0, "foliation.foliation_t_max is capped at 1000")
    return errs


def parse_config(path) -> ExperimentConfig:
    """Parse and fully validate; raises ConfigError listing every problem."""
    errors: list[str] = []
    values: dict[str, object] = {}
    seen: dict[str, int] = {}
    section = None
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("[") and line.endswith("]"):
                section = line[1:-1].strip()
                if section not in _SCHEMA:
                    errors.append(f"line {lineno}: unknown section [{section}]")
                    section = None
                continue
            if "=" not in line:
                errors.append(f"line {lineno}: expected 'key = value', got {line!r}")
                continue
            if section is None:
                errors.append(f"line {lineno}: key outside any [section]")
                continue
            key, _, val = (s.strip() for s in line.partition("="))
            schema = _SCHEMA.get(section, {})
            if key not in schema:
                errors.append(f"line {lineno}: unknown key {key!r} in [{section}]")
                continue
            if key in seen:
                errors.append(
                    f"line {lineno}: duplicate key {key!r} (first set on line {seen[key]})"
                )
                continue
            seen[key] = lineno
            kind = schema[key]
            try:
                if kind is int:
                    values[key] = int(val)
                elif kind is float:
                    values[key] = float(val)
                elif kind == "float_list":
                    values[key] = tuple(float(x) for x in val.split(",") if x.strip())
                else:
                    values[key] = val
            except ValueError:
                errors.append(f"line {lineno}: cannot parse {key} = {val!r}")
    if errors:
        raise ConfigError(errors)
    cfg = ExperimentConfig(**values)
    sem = _validate(cfg)
    if sem:
        raise ConfigError(sem)
    return cfg


def config_fingerprint(cfg: ExperimentConfig) -> str:
    import hashlib

    parts = []
    for f in fields(cfg):
        parts.append(f"{f.name}={getattr(cfg, f.name)!r}")
    return hashlib.sha256(";".join(parts).encode()).hexdigest()[:16]
