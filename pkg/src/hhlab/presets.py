"""Preset experiment catalogue: one desk-scale verification per theorem.

Every preset is a complete flat config (see hhlab.config); horizons are
powers of two so all presets share one propagator menu within a process.
"""

from __future__ import annotations

from .config import ExperimentConfig, loads_config

_COMMON_D3 = """
model.d = 3
model.gamma = 0
model.alpha = 3
model.a = -1
grid.r_min = 1e-3
grid.r_max = 1e3
grid.nodes = 512
solver.kato_k = 0
solver.kato_p = 6
solver.l = 0
solver.q = 3
solver.r = inf
"""

PRESETS: dict[str, str] = {
    "wellposed-contraction": _COMMON_D3
    + """
time.T = 16
data.kind = homogeneous
data.sigma = 1
data.amplitude = 0.05
checks = wellposed-contraction
output_dir = out/wellposed-contraction
""",
    "selfsimilar_d3": _COMMON_D3
    + """
time.T = 16
data.kind = homogeneous
data.sigma = 1
data.amplitude = 0.05
checks = selfsimilar
check.selfsimilar.tolerance = 0.02
output_dir = out/selfsimilar_d3
""",
    "nonlinear-asymptotics": _COMMON_D3
    + """
time.T = 256
data.kind = homogeneous
data.sigma = 1
data.amplitude = 0.05
data.perturbation_amplitude = 0.02
data.perturbation_width = 1.0
checks = nonlinear-asymptotics
check.nonlinear-asymptotics.base_tol = 0.05
check.nonlinear-asymptotics.delta_min = 0.05
output_dir = out/nonlinear-asymptotics
""",
    "linear-asymptotics": _COMMON_D3
    + """
time.T = 256
data.kind = homogeneous
data.sigma = 6/5
data.amplitude = 0.05
data.perturbation_amplitude = 0.02
data.perturbation_width = 1.0
checks = linear-asymptotics
check.linear-asymptotics.base_tol = 0.05
check.linear-asymptotics.delta_min = 0.05
output_dir = out/linear-asymptotics
""",
    "stability": _COMMON_D3
    + """
time.T = 256
data.kind = homogeneous
data.sigma = 1
data.amplitude = 0.05
data.perturbation_amplitude = 0.02
data.perturbation_width = 1.0
checks = stability
output_dir = out/stability
""",
    "complex-case3": _COMMON_D3
    + """
time.T = 256
data.kind = mixed_complex
data.sigma = 1
data.amplitude = 0.05
data.sigma2 = 6/5
data.amplitude2 = 0.05
checks = complex-case3
check.complex-case3.delta_min = 0.05
output_dir = out/complex-case3
""",
    "complex-case4": _COMMON_D3
    + """
time.T = 256
data.kind = mixed_complex
data.sigma = 6/5
data.amplitude = 0.05
data.sigma2 = 1
data.amplitude2 = 0.05
checks = complex-case4
check.complex-case4.delta_min = 0.05
output_dir = out/complex-case4
""",
    "nonexistence": """
model.d = 1
model.gamma = 0
model.alpha = 4
model.a = 1
time.T = 1
solver.l = 0
solver.q = 1
solver.r = 1
checks = nonexistence
check.nonexistence.kappa = 1/6
check.nonexistence.tau_min = 1e-8
check.nonexistence.tau_max = 1e-4
check.nonexistence.tau_points = 17
output_dir = out/nonexistence
""",
    "theta-feasibility": """
model.d = 3
model.gamma = 0
model.alpha = 3
model.a = -1
time.T = 1
checks = theta-feasibility
check.theta-feasibility.tuples = 50
check.theta-feasibility.scan_step = 1e-4
output_dir = out/theta-feasibility
""",
    "smoothing-estimates": """
model.d = 3
model.gamma = 0
model.alpha = 3
model.a = -1
grid.r_min = 1e-3
grid.r_max = 1e3
grid.nodes = 768
time.T = 128
data.kind = gaussian
data.amplitude = 1.0
checks = smoothing-estimates
check.smoothing-estimates.weighted_l2 = -1/2
check.smoothing-estimates.weighted_q2 = 3
output_dir = out/smoothing-estimates
""",
    "steady-state": """
model.d = 3
model.gamma = 0
model.alpha = 4
model.a = 1
grid.r_min = 1e-3
grid.r_max = 1e3
grid.nodes = 512
time.T = 0.25
time.n_time = 40
solver.kato_k = 0
solver.kato_p = 8
data.kind = steady_state
checks = steady-state
check.steady-state.residual_tol = 1e-6
check.steady-state.sweep_tol = 1e-3
output_dir = out/steady-state
""",
}


def list_presets() -> list[str]:
    return sorted(PRESETS)


def preset_text(name: str) -> str:
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; available: {', '.join(list_presets())}")


def preset_config(name: str) -> ExperimentConfig:
    return loads_config(preset_text(name))
