"""Flat key = value experiment configuration.

The format is line-based with dotted sections, diff-friendly and free of
any markup dependencies::

    model.d = 3
    model.gamma = 0
    model.alpha = 3
    model.a = -1
    grid.nodes = 512
    time.T = 16
    data.kind = homogeneous
    data.amplitude = 0.05
    checks = selfsimilar
    check.selfsimilar.tolerance = 0.02
    output_dir = out/selfsimilar

Values parse as int, float, fraction (``2/3``), ``inf``, booleans, or a
bare string; ``checks`` is a comma list.  Validation is fail-fast: index
admissibility is checked against the exponent conditions before any
solver time is spent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .exponents import ModelParams, SpaceIndex, kato_pair_admissible
from .grid import RadialGrid
from .solver import SolverConfig


class ConfigError(ValueError):
    """Invalid experiment configuration; names the offending key."""


def _parse_scalar(text: str):
    text = text.strip()
    low = text.lower()
    if low in ("inf", "+inf", "infinity"):
        return math.inf
    if low in ("true", "yes"):
        return True
    if low in ("false", "no"):
        return False
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    if "/" in text:
        try:
            num, den = text.split("/")
            return Fraction(int(num), int(den))
        except (ValueError, ZeroDivisionError):
            pass
    return text


def parse_flat(text: str) -> dict:
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        if key == "checks":
            out[key] = [v.strip() for v in value.split(",") if v.strip()]
        else:
            out[key] = _parse_scalar(value)
    return out


KNOWN_CHECKS = (
    "wellposed-contraction",
    "selfsimilar",
    "nonlinear-asymptotics",
    "linear-asymptotics",
    "stability",
    "complex-case3",
    "complex-case4",
    "nonexistence",
    "theta-feasibility",
    "smoothing-estimates",
    "steady-state",
)

DATA_KINDS = ("homogeneous", "gaussian", "mixed_complex", "steady_state")


@dataclass
class ExperimentConfig:
    model: ModelParams
    grid_spec: dict  # r_min, r_max, nodes
    solver: SolverConfig
    data: dict  # kind, sigma(s), amplitude(s), perturbation fields
    checks: list[str]
    check_options: dict[str, dict]
    output_dir: str
    seed: int = 0
    raw: dict = field(default_factory=dict)

    def make_grid(self) -> RadialGrid:
        return RadialGrid.log(
            self.model.d,
            float(self.grid_spec["r_min"]),
            float(self.grid_spec["r_max"]),
            int(self.grid_spec["nodes"]),
        )

    def echo(self) -> dict:
        return {k: str(v) for k, v in sorted(self.raw.items())}


_DEFAULT_GRID = {"r_min": 1e-3, "r_max": 1e3, "nodes": 512}


def materialize(flat: dict) -> ExperimentConfig:
    """Build and validate an ExperimentConfig from parsed flat keys."""

    def take(key, default=None, required=False):
        if key in flat:
            return flat[key]
        if required:
            raise ConfigError(f"missing required key {key!r}")
        return default

    try:
        model = ModelParams(
            d=int(take("model.d", required=True)),
            gamma=take("model.gamma", 0),
            alpha=take("model.alpha", required=True),
            a=int(take("model.a", -1)),
        )
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"model.*: {exc}") from exc

    grid_spec = {
        "r_min": float(take("grid.r_min", _DEFAULT_GRID["r_min"])),
        "r_max": float(take("grid.r_max", _DEFAULT_GRID["r_max"])),
        "nodes": int(take("grid.nodes", _DEFAULT_GRID["nodes"])),
    }
    if not 0 < grid_spec["r_min"] < grid_spec["r_max"]:
        raise ConfigError("grid.r_min/r_max: need 0 < r_min < r_max")

    kato = SpaceIndex(take("solver.kato_k", 0), take("solver.kato_p", 6))
    lq = None
    if "solver.l" in flat or "solver.q" in flat:
        lq = SpaceIndex(
            take("solver.l", 0), take("solver.q", required=True), take("solver.r", math.inf)
        )
    try:
        solver = SolverConfig(
            T=float(take("time.T", required=True)),
            n_time=int(take("time.n_time", 56)),
            grading=float(take("time.grading", 3.0)),
            picard_tol=float(take("solver.picard_tol", 1e-7)),
            max_iters=int(take("solver.max_iters", 25)),
            kato_index=kato,
            lq_index=lq,
            xi_min=float(take("solver.xi_min", 1e-4)),
        )
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"time.*/solver.*: {exc}") from exc

    checks = flat.get("checks", [])
    if isinstance(checks, str):
        checks = [checks]
    for name in checks:
        if name not in KNOWN_CHECKS:
            raise ConfigError(f"checks: unknown check {name!r}; known: {KNOWN_CHECKS}")

    needs_solver = any(
        c
        for c in checks
        if c
        not in ("theta-feasibility", "nonexistence", "smoothing-estimates")
    )
    if needs_solver:
        rep = kato_pair_admissible(model, kato)
        if not rep.ok:
            raise ConfigError(
                f"solver.kato_k/kato_p: pair {kato.label()} violates "
                f"{rep.violated + rep.boundary}"
            )

    data = {
        "kind": take("data.kind", "homogeneous"),
        "sigma": take("data.sigma", None),
        "amplitude": take("data.amplitude", 0.05),
        "sigma2": take("data.sigma2", None),
        "amplitude2": take("data.amplitude2", 0.0),
        "perturbation_amplitude": take("data.perturbation_amplitude", 0.0),
        "perturbation_width": take("data.perturbation_width", 1.0),
    }
    if data["kind"] not in DATA_KINDS:
        raise ConfigError(f"data.kind: unknown kind {data['kind']!r}; known: {DATA_KINDS}")

    options: dict[str, dict] = {name: {} for name in checks}
    for key, value in flat.items():
        if not key.startswith("check."):
            continue
        parts = key.split(".")
        if len(parts) < 3:
            raise ConfigError(f"{key}: expected check.<name>.<option>")
        name = parts[1]
        if name not in checks:
            raise ConfigError(f"{key}: check {name!r} is not in the checks list")
        options[name][".".join(parts[2:])] = value

    return ExperimentConfig(
        model=model,
        grid_spec=grid_spec,
        solver=solver,
        data=data,
        checks=list(checks),
        check_options=options,
        output_dir=str(take("output_dir", "hhlab-out")),
        seed=int(take("seed", 0)),
        raw=dict(flat),
    )


def load_config(path: str | Path) -> ExperimentConfig:
    return materialize(parse_flat(Path(path).read_text()))


def loads_config(text: str) -> ExperimentConfig:
    return materialize(parse_flat(text))
