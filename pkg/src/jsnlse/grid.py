"""Periodic grids, spectral calculus and the Madelung (polar) maps.

All fields live on a uniform periodic lattice ``x_j = origin + j*dx`` with
``dx = length / n_points``.  Derivatives are Fourier-spectral and integrals
use the rectangle rule, which is spectrally accurate for smooth periodic
integrands.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import (GridError, GridMismatch, IncommensurateShift,
                     NegativeDensity, OddPointCount)

DEFAULT_FLOOR = 1e-30
MIN_POINTS = 8


def _readonly(a):
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Grid:
    """Uniform periodic 1D lattice."""

    n_points: int
    length: float
    origin: float = 0.0

    def __post_init__(self):
        if int(self.n_points) != self.n_points:
            raise GridError(f"n_points must be an integer, got {self.n_points!r}")
        object.__setattr__(self, "n_points", int(self.n_points))
        object.__setattr__(self, "length", float(self.length))
        object.__setattr__(self, "origin", float(self.origin))
        if self.n_points % 2:
            raise OddPointCount(f"n_points must be even, got {self.n_points}")
        if self.n_points < MIN_POINTS:
            raise GridError(f"n_points must be >= {MIN_POINTS}, got {self.n_points}")
        if not (np.isfinite(self.length) and self.length > 0):
            raise GridError(f"length must be positive, got {self.length}")

    @property
    def spacing(self) -> float:
        return self.length / self.n_points

    @cached_property
    def x(self) -> np.ndarray:
        return _readonly(self.origin + self.spacing * np.arange(self.n_points))

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """Angular wavenumbers in FFT order, ``2*pi*n/L`` for n in [-N/2, N/2)."""
        return _readonly(2 * np.pi * np.fft.fftfreq(self.n_points, d=self.spacing))

    def shift_steps(self, displacement: float, rtol: float = 1e-9) -> int:
        """Integer number of lattice steps in ``displacement``.

        Raises IncommensurateShift unless displacement/dx is within ``rtol``
        (relative, floored at 1) of an integer.
        """
        s = displacement / self.spacing
        n = int(round(s))
        if abs(s - n) > rtol * max(1.0, abs(s)):
            raise IncommensurateShift(
                f"displacement {displacement!r} is {s:.12g} grid steps, not an integer")
        return n


def make_grid(length: float, n_points: int, origin: float = 0.0) -> Grid:
    return Grid(n_points=n_points, length=length, origin=origin)


def centered_grid(length: float, n_points: int) -> Grid:
    """Grid on [-L/2, L/2) which contains x = 0 as a lattice point."""
    return Grid(n_points=n_points, length=length, origin=-0.5 * length)


def check_same_grid(*grids: Grid) -> Grid:
    g0 = grids[0]
    for g in grids[1:]:
        if g != g0:
            raise GridMismatch(f"grid mismatch: {g0} vs {g}")
    return g0


@dataclass(frozen=True)
class DensityField:
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.n_points,):
            raise GridMismatch(f"density has shape {v.shape}, grid has {self.grid.n_points} points")
        if not np.all(np.isfinite(v)):
            raise ValueError("density values must be finite")
        if np.any(v < 0):
            raise NegativeDensity(f"density has negative values (min {v.min():.3e})")
        object.__setattr__(self, "values", _readonly(v))

    @property
    def mass(self) -> float:
        return integrate(self.values, self.grid)

    def normalized(self) -> "DensityField":
        return DensityField(self.grid, self.values / self.mass)

    def is_normalized(self, tol: float = 1e-10) -> bool:
        return abs(self.mass - 1.0) <= tol

    def scaled(self, factor: float) -> "DensityField":
        return DensityField(self.grid, factor * self.values)


@dataclass(frozen=True)
class WaveField:
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != (self.grid.n_points,):
            raise GridMismatch(f"wave has shape {v.shape}, grid has {self.grid.n_points} points")
        object.__setattr__(self, "values", _readonly(v))

    @property
    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2) * self.grid.spacing)

    def normalized(self) -> "WaveField":
        return WaveField(self.grid, self.values / np.sqrt(self.norm_sq))

    def is_normalized(self, tol: float = 1e-10) -> bool:
        return abs(self.norm_sq - 1.0) <= tol

    def density(self) -> DensityField:
        return DensityField(self.grid, np.abs(self.values) ** 2)

    def __mul__(self, c):
        return WaveField(self.grid, c * self.values)

    __rmul__ = __mul__


@dataclass(frozen=True)
class MadelungPair:
    """Hydrodynamic variables (rho, dS/dx); the phase itself is never stored."""

    grid: Grid
    rho: DensityField
    grad_s: np.ndarray = field(repr=False)

    def __post_init__(self):
        check_same_grid(self.grid, self.rho.grid)
        g = np.asarray(self.grad_s, dtype=float)
        if g.shape != (self.grid.n_points,):
            raise GridMismatch("grad_s has the wrong shape")
        object.__setattr__(self, "grad_s", _readonly(g))


def roll_steps(values: np.ndarray, steps: int, axis: int = -1) -> np.ndarray:
    """``out[j] = values[(j + steps) mod N]`` along ``axis``, i.e. f(x + steps*dx)."""
    return np.roll(values, -steps, axis=axis)


def circular_shift(field: DensityField, displacement: float, *,
                   interpolate: bool = False,
                   floor: float = DEFAULT_FLOOR) -> DensityField:
    """Return the density sampled at x + displacement.

    Commensurate displacements are exact index rotations.  With
    ``interpolate=True`` arbitrary displacements use a Fourier phase shift;
    the result can dip below zero and is clipped at ``floor``.
    """
    grid = field.grid
    try:
        s = grid.shift_steps(displacement)
    except IncommensurateShift:
        if not interpolate:
            raise
        spec = np.fft.rfft(field.values)
        k = 2 * np.pi * np.fft.rfftfreq(grid.n_points, d=grid.spacing)
        phase = np.exp(1j * k * displacement)
        phase[-1] = np.cos(k[-1] * displacement)
        shifted = np.fft.irfft(spec * phase, n=grid.n_points)
        return DensityField(grid, np.maximum(shifted, floor))
    return DensityField(grid, roll_steps(field.values, s))


def spectral_derivative(values: np.ndarray, grid: Grid, order: int = 1,
                        axis: int = -1) -> np.ndarray:
    """Fourier derivative of ``values`` along ``axis``.

    First derivatives drop the unpaired N/2 mode so that real input gives
    real output and the discrete operator is antisymmetric.  Real input
    returns a real array, complex input a complex one.
    """
    if order not in (1, 2):
        raise ValueError(f"order must be 1 or 2, got {order}")
    values = np.asarray(values)
    n = grid.n_points
    if values.shape[axis] != n:
        raise GridMismatch(f"axis length {values.shape[axis]} != {n}")
    shape = [1] * values.ndim
    shape[axis] = -1
    if np.isrealobj(values):
        k = 2 * np.pi * np.fft.rfftfreq(n, d=grid.spacing)
        if order == 1:
            mult = 1j * k
            mult[-1] = 0.0
        else:
            mult = -k ** 2
        spec = np.fft.rfft(values, axis=axis) * mult.reshape(shape)
        return np.fft.irfft(spec, n=n, axis=axis)
    k = np.array(grid.wavenumbers)
    if order == 1:
        mult = 1j * k
        mult[n // 2] = 0.0
    else:
        mult = -k ** 2
    return np.fft.ifft(np.fft.fft(values, axis=axis) * mult.reshape(shape), axis=axis)


def integrate(values: np.ndarray, grid: Grid) -> float:
    return float(np.sum(values) * grid.spacing)


def inner(psi: WaveField, phi: WaveField) -> complex:
    """Hermitian inner product, antilinear in the first slot."""
    g = check_same_grid(psi.grid, phi.grid)
    return complex(np.vdot(psi.values, phi.values) * g.spacing)


def wave_from_madelung(rho: DensityField, s_values: np.ndarray, hbar: float = 1.0) -> WaveField:
    s_values = np.asarray(s_values, dtype=float)
    return WaveField(rho.grid, np.sqrt(rho.values) * np.exp(1j * s_values / hbar))


def probability_current(psi: WaveField, hbar: float = 1.0, mass: float = 1.0) -> np.ndarray:
    """``(hbar/m) Im(conj(psi) dpsi/dx)``, the density flux rho*v.

    Evaluated as ``re * im' - im * re'`` with real derivatives, so a real
    wavefunction carries exactly zero current.
    """
    re, im = psi.values.real, psi.values.imag
    d_re = spectral_derivative(re, psi.grid, 1)
    d_im = spectral_derivative(im, psi.grid, 1)
    return hbar / mass * (re * d_im - im * d_re)


def madelung_from_wave(psi: WaveField, hbar: float = 1.0,
                       floor: float = DEFAULT_FLOOR) -> MadelungPair:
    """Polar decomposition of ``psi`` returning rho and dS/dx.

    dS/dx is recovered from the current, ``hbar*Im(psi* psi')/rho``, so no
    phase unwrapping is needed.  Points with rho <= floor get dS/dx = 0.
    """
    if floor <= 0:
        raise ValueError("floor must be positive")
    rho = np.abs(psi.values) ** 2
    flux = probability_current(psi, hbar, 1.0)
    grad_s = np.where(rho > floor, flux / np.maximum(rho, floor), 0.0)
    return MadelungPair(psi.grid, DensityField(psi.grid, rho), grad_s)


def gaussian_wave(grid: Grid, sigma: float, x0: float = 0.0, k0: float = 0.0) -> WaveField:
    """Normalized Gaussian packet with density variance sigma**2 and mean momentum hbar*k0."""
    x = grid.x
    psi = np.exp(-(x - x0) ** 2 / (4 * sigma ** 2) + 1j * k0 * x)
    return WaveField(grid, psi).normalized()


def periodic_gaussian_wave(grid: Grid, sigma: float, x0: float = 0.0, mode: int = 0,
                           images: int = 3) -> WaveField:
    """Gaussian amplitude summed over periodic images, times ``exp(2 pi i mode x / L)``.

    Unlike :func:`gaussian_wave` this is smooth across the box edge, so
    spectral derivatives of its amplitude stay clean there.
    """
    x, length = grid.x, grid.length
    amp = sum(np.exp(-(x - x0 + m * length) ** 2 / (4 * sigma ** 2))
              for m in range(-images, images + 1))
    return WaveField(grid, amp * np.exp(2j * np.pi * mode * x / length)).normalized()


def gaussian_density(grid: Grid, sigma: float, x0: float = 0.0) -> DensityField:
    x = grid.x
    return DensityField(grid, np.exp(-(x - x0) ** 2 / (2 * sigma ** 2))).normalized()
