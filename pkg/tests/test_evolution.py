import numpy as np
import pytest

from jsnlse.errors import StabilityViolation
from jsnlse.evolution import (Dynamics, EvolutionConfig, dealias_mask, energy_functional,
                              evolve, evolve_pair, final_state, imaginary_time_ground_state,
                              max_stable_dt)
from jsnlse.grid import centered_grid, gaussian_wave
from jsnlse.potential import ModelParams, PotentialSpec

GRID = centered_grid(25.6, 256)
CFG = EvolutionConfig(ModelParams(length_scale_l=0.2), PotentialSpec("harmonic", k=1.0),
                      dt=1e-3, n_steps=200, record_every=50)


def test_dealias_mask_keeps_two_thirds():
    m = dealias_mask(GRID)
    assert m.sum() == 2 * (256 // 3) + 1
    assert m[0] and not m[128]


def test_evolve_records_and_conserves_norm():
    traj, diags = evolve(gaussian_wave(GRID, 1.0), CFG)
    assert [round(d.time, 12) for d in diags] == [0.0, 0.05, 0.1, 0.15, 0.2]
    assert len(traj) == len(diags)
    assert all(abs(d.norm_sq - 1) < 1e-13 for d in diags)
    assert max(abs(d.energy - diags[0].energy) for d in diags) < 1e-6


def test_linear_ground_state_is_stationary():
    cfg = CFG.replace(nonlinearity="none")
    psi0 = gaussian_wave(GRID, 1 / np.sqrt(2))
    psi = final_state(psi0, cfg)
    assert abs(abs(np.vdot(psi0.values, psi.values)) * GRID.spacing - 1) < 1e-12
    assert energy_functional(psi0, cfg) == pytest.approx(0.5, abs=1e-10)


def test_schemes_agree():
    a = final_state(gaussian_wave(GRID, 1.0), CFG)
    b = final_state(gaussian_wave(GRID, 1.0), CFG.replace(scheme="rk4", dt=2.5e-4, n_steps=800))
    assert np.max(np.abs(a.values - b.values)) < 1e-5


def test_zero_steps_returns_initial_state():
    psi0 = gaussian_wave(GRID, 1.0)
    traj, diags = evolve(psi0, CFG.replace(n_steps=0))
    assert len(diags) == 1
    assert np.allclose(traj[0].values, Dynamics(GRID, CFG).project(np.array(psi0.values)))


def test_pair_overlap_constant_without_nonlinearity():
    a, b = gaussian_wave(GRID, 1.0, -1.0, 0.5), gaussian_wave(GRID, 0.8, 1.0)
    _, _, diags = evolve_pair(a, b, CFG.replace(nonlinearity="none"))
    ov = [d.overlap for d in diags]
    assert max(ov) - min(ov) < 1e-12


def test_stability_warning():
    limit = max_stable_dt(GRID, CFG.params)
    with pytest.warns(StabilityViolation):
        evolve(gaussian_wave(GRID, 1.0), CFG.replace(dt=2 * limit, n_steps=1))


def test_imaginary_time_ground_state_energy():
    params = ModelParams(length_scale_l=0.2)
    psi = imaginary_time_ground_state(GRID, params, PotentialSpec("harmonic", k=1.0))
    cfg = CFG.replace(nonlinearity="none")
    assert psi.is_normalized(1e-10)
    assert energy_functional(psi, cfg) == pytest.approx(0.5, abs=1e-5)
