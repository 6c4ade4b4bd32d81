import numpy as np
import pytest

from jsnlse.errors import GridError, IndexOutOfRange
from jsnlse.evolution import Dynamics, EvolutionConfig
from jsnlse.grid import centered_grid, gaussian_wave
from jsnlse.manybody import (CompositeConfig, CompositeGrid, SeparabilityConfig, axis_maps,
                             composite_evolve, manybody_nonlinear_term, product_wave,
                             reduced_density, separability_experiment, two_particle_grid)
from jsnlse.potential import ModelParams, PotentialSpec, nonlinear_term
from jsnlse.samples import random_density


def composite(n, d, points=8):
    g = centered_grid(6.4, points)
    return CompositeGrid(n, d, (g,) * (n * d), (1.0,) * n, (0.8,) * d)


@pytest.mark.parametrize("n, d, i, expected", [(2, 3, 4, (2, 1)), (2, 1, 2, (2, 1)),
                                               (2, 2, 2, (1, 2)), (3, 2, 6, (3, 2))])
def test_axis_maps(n, d, i, expected):
    assert axis_maps(i, composite(n, d)) == expected


def test_axis_maps_out_of_range():
    with pytest.raises(IndexOutOfRange):
        axis_maps(0, composite(2, 1))
    with pytest.raises(IndexOutOfRange):
        axis_maps(3, composite(2, 1))


def test_grid_validation():
    g = centered_grid(6.4, 8)
    with pytest.raises(GridError):
        CompositeGrid(2, 1, (g,), (1.0, 1.0), (0.8,))
    with pytest.raises(GridError):
        CompositeGrid(2, 1, (g, g), (1.0,), (0.8,))


def test_single_axis_matches_one_dimensional_term():
    g = centered_grid(6.4, 64)
    cg = CompositeGrid(1, 1, (g,), (1.0,), (0.2,))
    rho = random_density(g, np.random.default_rng(4))
    expected = nonlinear_term(rho, ModelParams(length_scale_l=0.2))
    assert np.allclose(manybody_nonlinear_term(rho.values, cg), expected, atol=1e-12)
    assert np.allclose(manybody_nonlinear_term(rho.values, cg, bohm_form="density"), expected,
                       atol=1e-9)


def test_product_term_is_sum_of_factors():
    cg = two_particle_grid(6.4, 64, 0.2)
    rng = np.random.default_rng(9)
    a, b = random_density(cg.axis_grids[0], rng), random_density(cg.axis_grids[1], rng)
    p = ModelParams(length_scale_l=0.2)
    expected = nonlinear_term(a, p)[:, None] + nonlinear_term(b, p)[None, :]
    got = manybody_nonlinear_term(np.outer(a.values, b.values), cg)
    assert np.allclose(got, expected, atol=1e-10)


def test_reduced_density_of_product():
    cg = two_particle_grid(12.8, 64, 0.4)
    a, b = gaussian_wave(cg.axis_grids[0], 1.0, -1.0), gaussian_wave(cg.axis_grids[1], 0.6, 2.0)
    psi = product_wave(cg, [a.values, b.values])
    assert psi.norm_sq == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(reduced_density(psi, 1).values, a.density().values, atol=1e-14)
    assert np.allclose(reduced_density(psi, 2).values, b.density().values, atol=1e-14)


def test_product_evolution_factorizes():
    cg = two_particle_grid(24.0, 128, 0.375)
    g = cg.axis_grids[0]
    k1, k2 = 1.0, 2.0
    v = 0.5 * k1 * cg.coordinate(1) ** 2 + 0.5 * k2 * cg.coordinate(2) ** 2
    cfg = CompositeConfig(cg, v, dt=1e-3, n_steps=200,
                          record_every=200)
    a, b = gaussian_wave(g, 1.0, -0.5, 0.3), gaussian_wave(g, 0.8, 0.7)
    _, obs = composite_evolve(product_wave(cg, [a.values, b.values]), cfg)
    params = ModelParams(length_scale_l=0.375)
    finals = []
    for f, k in ((a, k1), (b, k2)):
        dyn = Dynamics(g, EvolutionConfig(params, PotentialSpec("harmonic", k=k), dt=1e-3))
        psi = dyn.project(np.array(f.values))
        for _ in range(200):
            psi = dyn.step(psi)
        finals.append(psi)
    assert np.max(np.abs(obs[-1].values - np.outer(*finals))) < 1e-8


def test_composite_norm_drift():
    cg = two_particle_grid(24.0, 128, 0.375)
    g = cg.axis_grids[0]
    v = 0.5 * cg.coordinate(1) ** 2 + 0.5 * cg.coordinate(2) ** 2 + 0.2 * cg.coordinate(1) * cg.coordinate(2)
    cfg = CompositeConfig(cg, v, dt=5e-4, n_steps=1000, record_every=100)
    psi0 = product_wave(cg, [gaussian_wave(g, 1.0, 0.5).values, gaussian_wave(g, 1.0).values])
    records, _ = composite_evolve(psi0, cfg, observe=lambda w: None)
    assert max(abs(r.norm_sq - 1) for r in records) < 1e-12


def test_separability_zero_steps():
    report = separability_experiment(SeparabilityConfig(n_points=32, length=12.0, n_steps=0))
    assert len(report.rows) == 1
    assert report.max_distance == 0.0 and report.passed


def test_separability_linear_entangled_holds():
    cfg = SeparabilityConfig(n_points=64, length=24.0, initial="entangled", nonlinearity="none",
                             n_steps=100, record_every=50)
    assert separability_experiment(cfg).max_distance < 1e-12
