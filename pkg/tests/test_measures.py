import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jsnlse.errors import GridMismatch, NonPositiveDensity
from jsnlse.grid import DensityField, centered_grid, gaussian_density
from jsnlse.measures import (all_measures, fisher_information, fisher_path_integral,
                             j_divergence, js_distance, js_divergence, js_divergence_entropy,
                             k_divergence, kl_divergence, pi_js_divergence,
                             pi_js_divergence_halfsum, shannon_entropy, small_shift_limit)
from jsnlse.samples import random_density

GRID = centered_grid(6.4, 64)
seeds = st.integers(0, 2 ** 32 - 1)


def pair(seed):
    rng = np.random.default_rng(seed)
    return random_density(GRID, rng), random_density(GRID, rng)


def test_gaussian_entropy_and_fisher():
    g = centered_grid(25.6, 512)
    rho = gaussian_density(g, 1.0)
    assert shannon_entropy(rho) == pytest.approx(0.5 * math.log(2 * math.pi * math.e), abs=1e-10)
    assert fisher_information(rho) == pytest.approx(1.0, abs=1e-10)


def test_kl_between_gaussians():
    g = centered_grid(25.6, 512)
    a, b = gaussian_density(g, 1.0), gaussian_density(g, 1.0, x0=0.5)
    assert kl_divergence(a, b) == pytest.approx(0.125, abs=1e-10)
    assert j_divergence(a, b) == pytest.approx(0.125, abs=1e-10)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_js_symmetric_bounded_and_entropy_form(seed):
    a, b = pair(seed)
    js = js_divergence(a, b)
    assert js == pytest.approx(js_divergence(b, a), abs=1e-15)
    assert 0 <= js <= math.log(2)
    assert js <= j_divergence(a, b) / 4 + 1e-15
    assert js == pytest.approx(js_divergence_entropy(a, b), abs=1e-12)
    assert js == pytest.approx(0.5 * (k_divergence(a, b) + k_divergence(b, a)), abs=1e-14)


@settings(max_examples=40, deadline=None)
@given(seeds, st.floats(0.05, 0.95))
def test_weighted_js_properties(seed, pi):
    a, b = pair(seed)
    assert pi_js_divergence(a, b, pi) >= -1e-15
    assert pi_js_divergence(a, b, pi) == pytest.approx(pi_js_divergence(b, a, 1 - pi), abs=1e-13)
    assert pi_js_divergence(a, a, pi) == pytest.approx(0.0, abs=1e-14)


def test_weighted_js_at_half_matches_everything():
    a, b = pair(7)
    js = js_divergence(a, b)
    assert pi_js_divergence(a, b, 0.5) == js
    assert pi_js_divergence_halfsum(a, b, 0.5) == pytest.approx(js, abs=1e-14)
    assert pi_js_divergence(a, b, 0.0) == 0.0


def test_js_distance_is_root():
    a, b = pair(11)
    assert js_distance(a, b) ** 2 == pytest.approx(js_divergence(a, b), rel=1e-14)
    assert js_distance(a, a) == 0.0


def test_fisher_path_requires_positive_density():
    g = centered_grid(6.4, 64)
    a = DensityField(g, np.r_[np.zeros(1), np.ones(63)]).normalized()
    with pytest.raises(NonPositiveDensity):
        fisher_path_integral(a, a)


def test_mismatched_grids_raise():
    a = random_density(GRID, np.random.default_rng(0))
    b = random_density(centered_grid(6.4, 32), np.random.default_rng(0))
    with pytest.raises(GridMismatch):
        js_divergence(a, b)


def test_small_shift_limits():
    assert small_shift_limit("js") == 1 / 8
    assert small_shift_limit("pi_js", 0.5) == 1 / 8
    assert small_shift_limit("pi_js", 0.2) == pytest.approx(0.08)
    assert small_shift_limit("kl") == 0.5


def test_all_measures_keys_are_finite():
    a, b = pair(3)
    vals = all_measures(a, b, 0.3)
    assert "js_divergence" in vals and "fisher_0" in vals
    assert all(np.isfinite(v) for v in vals.values())
