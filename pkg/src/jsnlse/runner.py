"""Scenario drivers behind the command line.

Each ``run_*`` function takes a resolved :class:`RunConfig`, writes its
outputs plus ``manifest.txt`` into the output directory and returns a
process exit status (0 success, 1 a check failed).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import DEFAULT_METRIC, RunConfig
from .errors import ConfigTypeError, NonPositiveDensity
from .evolution import evolve, final_state
from .grid import (DensityField, WaveField, centered_grid, gaussian_density,
                   gaussian_wave, periodic_gaussian_wave)
from .hamiltonian import run_checks
from .io import fmt, read_field, write_snapshot
from .manybody import SeparabilityConfig, separability_experiment
from .measures import (all_measures, fisher_path_integral,
                       small_shift_limit, small_shift_ratio)
from .potential import (bohm_quantum_potential, js_quantum_potential, nonlinear_term,
                        nonlinear_term_expansion)
from .samples import random_wave


def _out_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "manifest.txt").write_text(cfg.manifest_text())
    return out


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    def cell(v):
        if v is None:
            return ""
        if isinstance(v, (bool, np.bool_)):
            return "pass" if v else "fail"
        if isinstance(v, (float, np.floating)):
            return fmt(v)
        return str(v)
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(cell(v) for v in row) + "\n")


def initial_state(cfg: RunConfig) -> WaveField:
    grid = cfg.grid()
    kind, sigma = cfg["initial.kind"], cfg["initial.sigma"]
    if kind == "gaussian":
        return gaussian_wave(grid, sigma, cfg["initial.x0"], cfg["initial.k0"])
    if kind == "periodic_gaussian":
        mode = round(cfg["initial.k0"] * grid.length / (2 * math.pi))
        return periodic_gaussian_wave(grid, sigma, cfg["initial.x0"], mode)
    return random_wave(grid, np.random.default_rng(cfg.seed), cfg["hbar"])


def _check_commensurate(cfg: RunConfig, grid) -> None:
    try:
        grid.shift_steps(cfg["l"])
    except ValueError as exc:
        raise ConfigTypeError(f"l: {exc}", cfg.lines.get("l")) from None


# -- scenarios ---------------------------------------------------------------------

def run_evolve(cfg: RunConfig) -> int:
    out = _out_dir(cfg)
    psi0 = initial_state(cfg)
    ecfg = cfg.evolution_config()
    trajectory, diags = evolve(psi0, ecfg)
    rows = []
    for psi, d in zip(trajectory, diags):
        ov = abs(np.vdot(psi0.values, psi.values) * psi0.grid.spacing)
        rows.append([d.time, d.norm_sq, d.energy, d.continuity_residual, ov])
        write_snapshot(out / f"snap_{round(d.time / ecfg.dt)}.bin", psi)
    _write_csv(out / "diagnostics.csv",
               ["time", "norm_sq", "energy", "continuity_residual", "overlap"], rows)
    return 0


def _read_density(path: str, cfg: RunConfig) -> DensityField:
    """Density from a CSV (grid read from its x column) or a binary snapshot.

    Binary files carry no length, so they use the configured centered grid.
    An explicit ``grid.n`` is also checked against CSV input.
    """
    grid = None
    if "grid.n" in cfg.lines or not str(path).lower().endswith(".csv"):
        grid = centered_grid(cfg["grid.length"], cfg["grid.n"])
    field = read_field(path, grid)
    rho = field.density() if isinstance(field, WaveField) else field
    return rho.normalized() if cfg["input.normalize"] else rho


def run_measures(cfg: RunConfig) -> int:
    out = _out_dir(cfg)
    rho0 = _read_density(cfg["input.rho0"], cfg)
    rho1 = _read_density(cfg["input.rho1"], cfg)
    if rho1.grid.n_points != rho0.grid.n_points:
        raise ConfigTypeError("input densities have different point counts")
    rho1 = DensityField(rho0.grid, rho1.values)
    values = all_measures(rho0, rho1, cfg["pi"], cfg["floor"])
    try:
        values["fisher_path_integral"] = fisher_path_integral(
            rho0, rho1, cfg["fisher_path.n_theta"], cfg["floor"])
    except NonPositiveDensity:
        values["fisher_path_integral"] = float("nan")
    _write_csv(out / "measures.csv", ["name", "value"], [[k, v] for k, v in values.items()])
    return 0


def run_potential(cfg: RunConfig) -> int:
    out = _out_dir(cfg)
    rho = _read_density(cfg["input.rho"], cfg)
    _check_commensurate(cfg, rho.grid)
    params = cfg.model_params()
    cols = [rho.grid.x, bohm_quantum_potential(rho, params), js_quantum_potential(rho, params),
            nonlinear_term(rho, params), nonlinear_term_expansion(rho, params)]
    _write_csv(out / "potential.csv", ["x", "Q", "Q_N", "N", "expansion"],
               [list(r) for r in zip(*cols)])
    return 0


def run_verify(cfg: RunConfig) -> int:
    out = _out_dir(cfg)
    results = run_checks(cfg.seed, cfg["verify.states"])
    _write_csv(out / "verify.csv", ["check", "value", "tolerance", "pass"],
               [[r.name, r.value, r.tolerance, r.passed] for r in results])
    return 0 if all(r.passed for r in results) else 1


def separability_config(cfg: RunConfig) -> SeparabilityConfig:
    return SeparabilityConfig(
        n_points=cfg["grid.n"], length=cfg["grid.length"], length_scale=cfg["l"],
        sigma=cfg["initial.sigma"], initial=cfg["initial.kind"], offset_1=cfg["initial.x0"],
        offset_2=cfg["initial.x2"], momentum_1=cfg["initial.k0"], k1=cfg["potential.k"],
        k2=cfg["potential.k2"], coupling=cfg["coupling"], dt=cfg["dt"], n_steps=cfg["steps"],
        record_every=cfg["record_every"], hbar=cfg["hbar"], masses=(cfg["mass"], cfg["mass"]),
        tolerance=cfg["tolerance"], nonlinearity=cfg["nonlinearity"], floor=cfg["floor"])


def run_separability(cfg: RunConfig) -> int:
    out = _out_dir(cfg)
    report = separability_experiment(separability_config(cfg))
    _write_csv(out / "report.csv", ["time", "marginal_distance", "norm_sq", "energy"],
               [[r.time, r.marginal_distance, r.norm_sq, r.energy] for r in report.rows])
    return 0 if report.passed else 1


# -- sweeps ------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepRow:
    value: float
    metric: float
    ratio: float | None
    local_order: float | None
    fitted_order: float | None


def _row_config(base: RunConfig, parameter: str, value: float) -> RunConfig:
    if parameter == "l":
        return base.with_values(l=value)
    if parameter == "n":
        if value != int(value):
            raise ConfigTypeError(f"grid size {value} is not an integer")
        return base.with_values(**{"grid.n": int(value)})
    if parameter == "dt":
        total = base["dt"] * base["steps"]
        every = base["dt"] * base["record_every"]
        return base.with_values(dt=value, steps=max(0, round(total / value)),
                                record_every=max(1, round(every / value)))
    if parameter == "delta":
        return base.with_values(delta=value)
    return base.with_values(pi=value)


def sweep_metric(cfg: RunConfig, metric: str) -> float:
    """The scalar a sweep row reports."""
    if metric in ("expansion_residual", "small_shift_error"):
        grid = cfg.grid()
        rho = gaussian_density(grid, cfg["initial.sigma"], cfg["initial.x0"])
        if metric == "small_shift_error":
            pi = cfg["pi"] if cfg["measure"] == "pi_js" else None
            limit = small_shift_limit(cfg["measure"], pi)
            return abs(small_shift_ratio(rho, cfg["delta"], cfg["measure"], pi, cfg["floor"])
                       - limit) / limit
        _check_commensurate(cfg, grid)
        params = cfg.model_params()
        bulk = rho.values > 1e-3 * rho.values.max()
        diff = nonlinear_term(rho, params) - nonlinear_term_expansion(rho, params)
        return float(np.max(np.abs(diff[bulk])))
    _check_commensurate(cfg, cfg.grid())
    psi0 = initial_state(cfg)
    ecfg = cfg.evolution_config()
    if metric == "linear_deviation":
        a = final_state(psi0, ecfg)
        b = final_state(psi0, ecfg.replace(nonlinearity="none"))
        return float(np.sqrt(np.sum(np.abs(a.values - b.values) ** 2) * a.grid.spacing))
    if metric == "scheme_difference":
        a = final_state(psi0, ecfg.replace(scheme="strang"))
        b = final_state(psi0, ecfg.replace(scheme="rk4"))
        return float(np.sqrt(np.sum(np.abs(a.values - b.values) ** 2) * a.grid.spacing))
    _, diags = evolve(psi0, ecfg)
    if metric == "energy_drift":
        return max(abs(d.energy - diags[0].energy) for d in diags)
    return max(abs(d.norm_sq - diags[0].norm_sq) for d in diags)


def run_sweep(base: RunConfig, parameter: str | None = None, values=None,
              metric: str | None = None, write: bool = True) -> list[SweepRow]:
    """One row per parameter value with the metric, consecutive ratio and orders.

    ``ratio`` is previous metric over current metric.  ``local_order`` is
    ``log(ratio) / log(previous value / current value)`` and ``fitted_order``
    the least-squares slope of log(metric) against log(value) over all rows.
    """
    parameter = parameter or base["sweep.parameter"]
    values = list(values if values is not None else base["sweep.values"])
    metric = metric or base.get("sweep.metric") or DEFAULT_METRIC[parameter]
    metrics = [sweep_metric(_row_config(base, parameter, v), metric) for v in values]
    fitted = None
    if len(values) > 1 and all(m > 0 for m in metrics):
        fitted = float(np.polyfit(np.log(values), np.log(metrics), 1)[0])
    rows = []
    for i, (v, m) in enumerate(zip(values, metrics)):
        ratio = order = None
        if i and m > 0:
            ratio = metrics[i - 1] / m
            if values[i - 1] != v and ratio > 0:
                order = math.log(ratio) / math.log(values[i - 1] / v)
        rows.append(SweepRow(float(v), float(m), ratio, order, fitted))
    if write:
        out = _out_dir(base)
        _write_csv(out / "sweep.csv", ["value", "metric", "ratio", "local_order", "fitted_order"],
                   [[r.value, r.metric, r.ratio, r.local_order, r.fitted_order] for r in rows])
    return rows


def run_sweep_scenario(cfg: RunConfig) -> int:
    run_sweep(cfg)
    return 0


SCENARIO_RUNNERS = {"evolve": run_evolve, "measures": run_measures, "potential": run_potential,
                    "verify": run_verify, "separability": run_separability,
                    "sweep": run_sweep_scenario}
