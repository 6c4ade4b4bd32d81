"""Hamiltonian structure of the JS dynamics, checked numerically.

The conserved generator in hydrodynamic variables is

    H[rho, S] = int rho ((dS/dx)^2 / 2m + V) dx + zeta * I_JS(rho, rho_l)

and the flow is ``d_t rho = dH/dS``, ``d_t S = -dH/drho``.  Functional
derivatives use the grid delta ``delta_j / dx``, so a discrete derivative
converges to the continuum variational density as the grid is refined.

In wavefunction form the vector field is ``X(psi) = -(i/hbar)(H0 + N) psi``
and ``dH[phi] = hbar * Omega(X, phi)`` with ``Omega(psi, phi) = 2 Im<psi|phi>``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import GridTooLarge
from .evolution import Dynamics, EvolutionConfig, energy_functional, evolve
from .grid import (DensityField, Grid, MadelungPair, WaveField, centered_grid,
                   check_same_grid, inner, madelung_from_wave, periodic_gaussian_wave,
                   spectral_derivative)
from .samples import random_wave
from .measures import js_divergence
from .potential import (ModelParams, PotentialSpec, js_quantum_potential,
                        nonlinear_term)

MAX_MATRIX_POINTS = 64


def symplectic_form(psi: WaveField, phi: WaveField) -> float:
    """``Omega(psi, phi) = 2 Im <psi|phi>``."""
    return 2.0 * inner(psi, phi).imag


def functional_derivative_rho(state: MadelungPair, params: ModelParams,
                              potential: PotentialSpec) -> np.ndarray:
    """``dH/drho = (dS/dx)^2 / 2m + V + Q_N``."""
    v = potential.evaluate(state.grid)
    qn = js_quantum_potential(state.rho, params)
    return state.grad_s ** 2 / (2 * params.mass) + v + qn


def functional_derivative_s(state: MadelungPair, params: ModelParams) -> np.ndarray:
    """``dH/dS = -(1/m) d/dx (rho dS/dx)``, spectrally."""
    flux = state.rho.values * state.grad_s
    return -spectral_derivative(flux, state.grid, 1) / params.mass


def hamiltonian_density_form(rho: np.ndarray, s_values: np.ndarray, grid: Grid,
                             params: ModelParams, potential: PotentialSpec) -> float:
    """``H[rho, S]`` on the grid with the spectral first derivative of S."""
    ds = spectral_derivative(np.asarray(s_values, dtype=float), grid, 1)
    v = potential.evaluate(grid)
    kinetic = np.sum(rho * (ds ** 2 / (2 * params.mass) + v)) * grid.spacing
    dens = DensityField(grid, rho)
    shifted = DensityField(grid, np.roll(rho, -grid.shift_steps(params.length_scale_l)))
    return float(kinetic + params.zeta * js_divergence(dens, shifted, params.floor))


@dataclass(frozen=True)
class FunctionalDerivative:
    values: np.ndarray
    error_estimate: float


def numerical_functional_derivative(functional: Callable[[np.ndarray], float],
                                    field: np.ndarray, grid: Grid,
                                    full_output: bool = False):
    """Central-difference functional derivative of ``functional`` at ``field``.

    Entry j is ``[F(f + h delta_j/dx) - F(f - h delta_j/dx)] / 2h``.  The
    field step ``h/dx`` is ``eps**(1/3)`` times the local magnitude (floored
    at a tenth of the mean magnitude), which balances truncation against
    roundoff.  With ``full_output=True`` a :class:`FunctionalDerivative` is
    returned whose ``error_estimate`` is the max difference between steps
    ``h`` and ``2h``, rescaled by the O(h^2) factor 1/3.
    """
    f = np.array(field, dtype=float)
    dx = grid.spacing
    mag = np.abs(f)
    typical = mag.mean() if mag.mean() > 0 else 1.0
    step = np.cbrt(np.finfo(float).eps) * np.maximum(mag, 0.1 * typical)

    def central(scale):
        out = np.empty_like(f)
        for j in range(f.size):
            d = scale * step[j]
            old = f[j]
            f[j] = old + d
            up = functional(f)
            f[j] = old - d
            down = functional(f)
            f[j] = old
            out[j] = (up - down) / (2 * d * dx)
        return out

    values = central(1.0)
    if not full_output:
        return values
    coarse = central(2.0)
    return FunctionalDerivative(values, float(np.max(np.abs(coarse - values)) / 3))


def expected_nonlinear(rho: DensityField, params: ModelParams) -> float:
    """``E_rho(N) = int rho N(rho) dx``."""
    return float(np.sum(rho.values * nonlinear_term(rho, params)) * rho.grid.spacing)


def nonlinear_vector_field(psi: WaveField, params: ModelParams) -> np.ndarray:
    """``X_N(psi) = -(i/hbar) N(|psi|^2) psi``."""
    return (-1j / params.hbar) * nonlinear_term(psi.density(), params) * psi.values


# -- matrices on the grid basis ----------------------------------------------

def _check_small(grid: Grid) -> None:
    if grid.n_points > MAX_MATRIX_POINTS:
        raise GridTooLarge(f"dense operators are limited to {MAX_MATRIX_POINTS} points, "
                           f"grid has {grid.n_points}")


def kinetic_matrix(grid: Grid, hbar: float = 1.0, mass: float = 1.0) -> np.ndarray:
    """Dense spectral ``-(hbar^2/2m) d^2/dx^2``, built column by column."""
    symbol = hbar ** 2 * np.asarray(grid.wavenumbers) ** 2 / (2 * mass)
    eye = np.eye(grid.n_points)
    return np.fft.ifft(symbol[:, None] * np.fft.fft(eye, axis=0), axis=0)


@dataclass(frozen=True)
class DiscreteStateOperator:
    """An operator on the grid basis: a pure-state projector or a Hamiltonian."""

    grid: Grid
    matrix: np.ndarray

    @classmethod
    def projector(cls, psi: WaveField) -> "DiscreteStateOperator":
        """``|psi><psi|`` acting on grid values, ``(rho v)_j = psi_j sum_k conj(psi_k) v_k dx``."""
        _check_small(psi.grid)
        v = psi.values
        return cls(psi.grid, np.outer(v, v.conj()) * psi.grid.spacing)

    @classmethod
    def hamiltonian(cls, psi: WaveField, cfg: EvolutionConfig) -> "DiscreteStateOperator":
        """``H0 + N(rho_psi)``: spectral kinetic block plus the real diagonal potential."""
        _check_small(psi.grid)
        dyn = Dynamics(psi.grid, cfg)
        p = cfg.params
        diag = dyn.effective_potential(np.abs(psi.values) ** 2)
        return cls(psi.grid, kinetic_matrix(psi.grid, p.hbar, p.mass) + np.diag(diag))

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    def singular_values(self) -> np.ndarray:
        return np.linalg.svd(self.matrix, compute_uv=False)


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def von_neumann_residual(psi: WaveField, cfg: EvolutionConfig) -> float:
    """Max-entry modulus of ``(rho(t+dt) - rho(t))/dt - (i/hbar)[rho_mid, H_mid]``.

    ``psi(t+dt)`` is one evolver step and ``psi(t+dt/2)`` a half step, so the
    residual is the O(dt^2) consistency error of the pure-state
    von Neumann equation ``i hbar d_t rho = [H, rho]``.

    The dealias projection is not generated by ``H0 + N``, so with
    ``cfg.dealias`` on the residual levels off at the size of the content it
    removes.  Run the check with dealiasing off and a periodic-smooth state
    (see ``grid.periodic_gaussian_wave``); a packet cut off at the box edge
    puts a large Bohm spike at the seam and delays the asymptotic regime.
    """
    _check_small(psi.grid)
    dyn = Dynamics(psi.grid, cfg)
    dyn.check_stability(cfg.dt)
    v0 = np.array(psi.values)
    mid = WaveField(psi.grid, dyn.step(v0, 0.5 * cfg.dt))
    nxt = WaveField(psi.grid, dyn.step(v0, cfg.dt))
    r0 = DiscreteStateOperator.projector(psi).matrix
    r1 = DiscreteStateOperator.projector(nxt).matrix
    rm = DiscreteStateOperator.projector(mid).matrix
    hm = DiscreteStateOperator.hamiltonian(mid, cfg).matrix
    resid = (r1 - r0) / cfg.dt - (1j / cfg.params.hbar) * commutator(rm, hm)
    return float(np.max(np.abs(resid)))


def hamiltonian_flow_check(psi: WaveField, probe: WaveField, cfg: EvolutionConfig,
                           h: float | None = None) -> float:
    """``|dH[probe] - hbar Omega(X_H(psi), probe)|`` with a central difference for dH.

    ``H`` is :func:`energy_functional`.  The default step is
    ``eps**(1/3) * ||psi|| / ||probe||``.
    """
    check_same_grid(psi.grid, probe.grid)
    if h is None:
        h = np.cbrt(np.finfo(float).eps) * np.sqrt(psi.norm_sq / probe.norm_sq)
    up = energy_functional(WaveField(psi.grid, psi.values + h * probe.values), cfg)
    down = energy_functional(WaveField(psi.grid, psi.values - h * probe.values), cfg)
    directional = (up - down) / (2 * h)
    x = WaveField(psi.grid, Dynamics(psi.grid, cfg).vector_field(np.array(psi.values)))
    return abs(directional - cfg.params.hbar * symplectic_form(x, probe))


# -- snapshot derivatives ------------------------------------------------------

def snapshot_time_derivatives(psi_prev: WaveField, psi_next: WaveField, dt: float,
                              hbar: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Centered ``(d_t rho, d_t S)`` between two snapshots ``dt`` apart.

    The phase increment is read off ``conj(psi_prev) * psi_next``, so no
    unwrapping is needed as long as it stays below pi per step.
    """
    check_same_grid(psi_prev.grid, psi_next.grid)
    drho = (np.abs(psi_next.values) ** 2 - np.abs(psi_prev.values) ** 2) / dt
    ds = hbar * np.angle(np.conj(psi_prev.values) * psi_next.values) / dt
    return drho, ds


# -- check battery ---------------------------------------------------------------

@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.value) and self.value <= self.tolerance)


def mixed_error(a: np.ndarray, b: np.ndarray) -> float:
    """``max |a - b| / (1 + |b|)``."""
    return float(np.max(np.abs(a - b) / (1.0 + np.abs(b))))


def fitted_order(steps: np.ndarray, errors: np.ndarray) -> float:
    """Least-squares slope of ``log(errors)`` against ``log(steps)``."""
    return float(np.polyfit(np.log(steps), np.log(errors), 1)[0])


def run_checks(seed: int = 0, n_states: int = 5) -> list[CheckResult]:
    """Generator identities on seeded random states, one row per check."""
    grid = centered_grid(6.4, 128)
    rng = np.random.default_rng(seed)
    params = ModelParams(length_scale_l=0.2)
    pot = PotentialSpec("harmonic", k=1.0)
    cfg = EvolutionConfig(params, pot, dt=1e-3, n_steps=1)
    out: list[CheckResult] = []

    anti = drho = ds = flow = hom_e = hom_x = 0.0
    for _ in range(n_states):
        psi = random_wave(grid, rng)
        phi = random_wave(grid, rng)
        anti = max(anti, abs(symplectic_form(psi, phi) + symplectic_form(phi, psi)))
        state = madelung_from_wave(psi, params.hbar)
        s_vals = params.hbar * np.unwrap(np.angle(psi.values))
        rho = state.rho.values
        num_rho = numerical_functional_derivative(
            lambda r: hamiltonian_density_form(r, s_vals, grid, params, pot), rho, grid)
        drho = max(drho, mixed_error(num_rho, functional_derivative_rho(state, params, pot)))
        num_s = numerical_functional_derivative(
            lambda s: hamiltonian_density_form(rho, s, grid, params, pot), s_vals, grid)
        ds = max(ds, mixed_error(num_s, functional_derivative_s(state, params)))
        energy = abs(energy_functional(psi, cfg))
        flow = max(flow, hamiltonian_flow_check(psi, phi, cfg) / (1 + energy))
        base = expected_nonlinear(psi.density(), params)
        xf = nonlinear_vector_field(psi, params)
        for lam2 in (0.5, 2.0, 10.0):
            scaled = DensityField(grid, lam2 * rho)
            hom_e = max(hom_e, abs(expected_nonlinear(scaled, params) - lam2 * base) / abs(lam2 * base))
            lam = np.sqrt(lam2) * np.exp(0.7j)
            xs = nonlinear_vector_field(WaveField(grid, lam * psi.values), params)
            hom_x = max(hom_x, float(np.max(np.abs(xs - lam * xf))) / (1 + np.max(np.abs(xf))))

    out += [CheckResult("symplectic_antisymmetry", anti, 1e-12),
            CheckResult("dH_drho_vs_oracle", drho, 1e-5),
            CheckResult("dH_dS_vs_oracle", ds, 1e-5),
            CheckResult("hamiltonian_flow", flow, 1e-6),
            CheckResult("expected_nonlinear_degree_two", hom_e, 1e-10),
            CheckResult("vector_field_degree_one", hom_x, 1e-10)]

    small = centered_grid(16.0, 48)
    l_small = 2 * small.spacing
    plane = WaveField(small, np.exp(4j * np.pi * small.x / small.length)).normalized()
    vn_cfg = EvolutionConfig(ModelParams(length_scale_l=l_small), PotentialSpec(), dt=1e-3,
                             n_steps=1, dealias=False)
    out.append(CheckResult("von_neumann_plane_wave", von_neumann_residual(plane, vn_cfg), 1e-8))
    packet = periodic_gaussian_wave(small, 1.0, x0=0.5, mode=1)
    dts = np.array([1e-2, 5e-3, 2.5e-3, 1.25e-3])
    trap = vn_cfg.replace(potential=PotentialSpec("harmonic", k=1.0))
    res = np.array([von_neumann_residual(packet, trap.replace(dt=dt)) for dt in dts])
    out.append(CheckResult("von_neumann_order_deviation", abs(fitted_order(dts, res) - 2.0), 0.2))

    pure = 0.0
    trajectory, _ = evolve(packet, trap.replace(dt=1e-3, n_steps=200, record_every=50))
    for rec_psi in trajectory:
        op = DiscreteStateOperator.projector(rec_psi)
        pure = max(pure, op.singular_values()[1], abs(op.trace - 1), op.hermiticity_error())
    out.append(CheckResult("projector_pure_rank_one", float(pure), 1e-10))
    return out
