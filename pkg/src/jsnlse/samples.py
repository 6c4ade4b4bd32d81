"""Seeded smooth random states for property suites."""
from __future__ import annotations

import numpy as np

from .grid import DensityField, Grid, WaveField, wave_from_madelung


def _trig_poly(grid: Grid, rng: np.random.Generator, n_modes: int, amplitude: float):
    n = np.arange(1, n_modes + 1)
    a = rng.normal(size=n_modes) / n
    b = rng.normal(size=n_modes) / n
    scale = amplitude / (np.abs(a).sum() + np.abs(b).sum())
    phase = 2 * np.pi * np.outer(grid.x - grid.origin, n) / grid.length
    return scale * (np.cos(phase) @ a + np.sin(phase) @ b)


def random_density(grid: Grid, rng: np.random.Generator, n_modes: int = 6,
                   contrast: float = 0.9) -> DensityField:
    """Normalized square of ``1 + p(x)`` with p a random trig polynomial, ``|p| <= contrast``.

    The result is band-limited (2*n_modes harmonics) and bounded below by
    ``(1 - contrast)**2`` before normalization.
    """
    if not 0 <= contrast < 1:
        raise ValueError("contrast must lie in [0, 1)")
    p = 1.0 + _trig_poly(grid, rng, n_modes, contrast)
    return DensityField(grid, p ** 2).normalized()


def random_phase(grid: Grid, rng: np.random.Generator, n_modes: int = 4,
                 amplitude: float = 1.0) -> np.ndarray:
    """Smooth periodic phase function S(x) with ``|S| <= amplitude``."""
    return _trig_poly(grid, rng, n_modes, amplitude)


def random_wave(grid: Grid, rng: np.random.Generator, hbar: float = 1.0,
                n_modes: int = 6, contrast: float = 0.8, phase_amplitude: float = 1.0) -> WaveField:
    rho = random_density(grid, rng, n_modes, contrast)
    s = random_phase(grid, rng, max(1, n_modes // 2), phase_amplitude * hbar)
    return wave_from_madelung(rho, s, hbar)
