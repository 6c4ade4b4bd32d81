"""Quantum potentials and the Jensen-Shannon nonlinear term.

``Q``      linear (Bohm) potential ``-(hbar^2/2m) (sqrt rho)'' / sqrt rho``
``Q_N``    JS potential ``(zeta/2) ln[4 rho^2 / ((rho + rho_l)(rho + rho_-l))]``
``N``      nonlinear term ``Q_N - Q``

Shifted densities ``rho_{+-l}(x) = rho(x +- l)`` are exact circular shifts,
so ``l`` must be a whole number of grid steps.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DegenerateWeight
from .grid import DEFAULT_FLOOR, DensityField, Grid, roll_steps, spectral_derivative


@dataclass(frozen=True)
class ModelParams:
    """Physical constants of the model.

    ``zeta`` defaults to ``hbar**2 / (mass * l**2)``, which makes the JS
    potential reduce to the Bohm potential as l -> 0 and equals ``eta`` at
    pi = 1/2.  Pass an explicit value to explore other conventions.
    """

    hbar: float = 1.0
    mass: float = 1.0
    length_scale_l: float = 0.25
    zeta: Optional[float] = None
    pi_weight: float = 0.5
    floor: float = DEFAULT_FLOOR

    def __post_init__(self):
        if self.hbar <= 0 or self.mass <= 0 or self.length_scale_l <= 0:
            raise ValueError("hbar, mass and length_scale_l must be positive")
        if not 0.0 < self.pi_weight < 1.0:
            raise DegenerateWeight(f"pi_weight must lie in (0, 1), got {self.pi_weight}")
        if self.zeta is None:
            object.__setattr__(self, "zeta", self.hbar ** 2 / (self.mass * self.length_scale_l ** 2))

    @property
    def eta(self) -> float:
        p = self.pi_weight
        return self.hbar ** 2 / (4 * p * (1 - p) * self.mass * self.length_scale_l ** 2)

    def with_(self, **changes) -> "ModelParams":
        """Copy with changes; ``zeta`` is re-derived unless given explicitly."""
        fields = dict(hbar=self.hbar, mass=self.mass, length_scale_l=self.length_scale_l,
                      zeta=None, pi_weight=self.pi_weight, floor=self.floor)
        fields.update(changes)
        return ModelParams(**fields)


@dataclass(frozen=True)
class PotentialSpec:
    """External potential: ``"zero"``, ``"harmonic"`` (``k/2 (x - center)^2``) or ``"tabulated"``."""

    kind: str = "zero"
    k: float = 1.0
    center: float = 0.0
    values: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kind not in ("zero", "harmonic", "tabulated"):
            raise ValueError(f"unknown potential kind {self.kind!r}")
        if self.kind == "tabulated" and self.values is None:
            raise ValueError("tabulated potential needs values")

    def evaluate(self, grid: Grid) -> np.ndarray:
        if self.kind == "zero":
            return np.zeros(grid.n_points)
        if self.kind == "harmonic":
            return 0.5 * self.k * (grid.x - self.center) ** 2
        v = np.asarray(self.values, dtype=float)
        if v.shape != (grid.n_points,) or not np.all(np.isfinite(v)):
            raise ValueError("tabulated potential must be finite with one value per grid point")
        return v


# -- array kernels (any dimensionality, one axis at a time) -----------------

def bohm_array(rho: np.ndarray, grid: Grid, hbar: float, mass: float,
               floor: float = DEFAULT_FLOOR, axis: int = -1) -> np.ndarray:
    amp = np.sqrt(rho)
    d2 = spectral_derivative(amp, grid, 2, axis=axis)
    return -(hbar ** 2 / (2 * mass)) * d2 / np.maximum(amp, np.sqrt(floor))


def js_log_array(rho: np.ndarray, steps: int, floor: float = DEFAULT_FLOOR,
                 axis: int = -1) -> np.ndarray:
    """``ln[4 r^2 / ((r + r_l)(r + r_-l))]`` with ``r = max(rho, floor)``.

    Where rho and both shifts sit at the floor the ratio is exactly one, so
    the vacuum carries no potential.
    """
    r = np.maximum(rho, floor)
    rp = roll_steps(r, steps, axis)
    rm = roll_steps(r, -steps, axis)
    return np.log((2 * r) * (2 * r) / ((r + rp) * (r + rm)))


def parametric_log_array(rho: np.ndarray, steps: int, pi: float,
                         floor: float = DEFAULT_FLOOR, axis: int = -1) -> np.ndarray:
    """``ln[r (pi r + (1-pi) r_l)^-pi / (pi r_-l + (1-pi) r)^(1-pi)]`` as a sum of log-ratios."""
    r = np.maximum(rho, floor)
    rp = roll_steps(r, steps, axis)
    rm = roll_steps(r, -steps, axis)
    return (pi * np.log(r / (pi * r + (1 - pi) * rp))
            + (1 - pi) * np.log(r / (pi * rm + (1 - pi) * r)))


# -- public operations -------------------------------------------------------

def bohm_quantum_potential(rho: DensityField, params: ModelParams) -> np.ndarray:
    return bohm_array(rho.values, rho.grid, params.hbar, params.mass, params.floor)


def js_quantum_potential(rho: DensityField, params: ModelParams) -> np.ndarray:
    s = rho.grid.shift_steps(params.length_scale_l)
    return 0.5 * params.zeta * js_log_array(rho.values, s, params.floor)


def nonlinear_term(rho: DensityField, params: ModelParams) -> np.ndarray:
    return js_quantum_potential(rho, params) - bohm_quantum_potential(rho, params)


def parametric_quantum_potential(rho: DensityField, params: ModelParams) -> np.ndarray:
    pi = params.pi_weight
    if pi <= 0.0 or pi >= 1.0:
        raise DegenerateWeight(f"pi must lie in (0, 1), got {pi}")
    s = rho.grid.shift_steps(params.length_scale_l)
    return params.eta * parametric_log_array(rho.values, s, pi, params.floor)


def parametric_nonlinear_term(rho: DensityField, params: ModelParams) -> np.ndarray:
    return parametric_quantum_potential(rho, params) - bohm_quantum_potential(rho, params)


def _log_derivatives(rho: DensityField, floor: float):
    """Spectral derivatives 1..4 of ln(rho), assembled from derivatives of rho."""
    grid = rho.grid
    k = 2 * np.pi * np.fft.rfftfreq(grid.n_points, d=grid.spacing)
    spec = np.fft.rfft(rho.values)
    r = np.maximum(rho.values, floor)
    p = []
    for order in range(1, 5):
        mult = (1j * k) ** order
        if order % 2:
            mult[-1] = 0.0
        p.append(np.fft.irfft(spec * mult, n=grid.n_points) / r)
    p1, p2, p3, p4 = p
    f1 = p1
    f2 = p2 - p1 ** 2
    f3 = p3 - 3 * p1 * p2 + 2 * p1 ** 3
    f4 = p4 - 4 * p1 * p3 - 3 * p2 ** 2 + 12 * p1 ** 2 * p2 - 6 * p1 ** 4
    return f1, f2, f3, f4


def nonlinear_term_expansion(rho: DensityField, params: ModelParams) -> np.ndarray:
    """Leading O(l^2) Taylor term of ``N`` at the default ``zeta``.

    With ``f = ln rho``::

        N ~ -(hbar^2 l^2 / 2m) (f''''/24 + f''^2/16 + f' f'''/12 - f'^4/96)

    For a Gaussian of variance s^2 this is
    ``(hbar^2 l^2 / 64 m)(x^4 / (3 s^8) - 2 / s^4)``.
    """
    f1, f2, f3, f4 = _log_derivatives(rho, params.floor)
    pref = params.hbar ** 2 * params.length_scale_l ** 2 / (2 * params.mass)
    return -pref * (f4 / 24 + f2 ** 2 / 16 + f1 * f3 / 12 - f1 ** 4 / 96)


def nonlinear_term_expansion_printed(rho: DensityField, params: ModelParams) -> np.ndarray:
    """``(hbar^2 l^2 / 64 m)(2 rho''^2/rho^2 - 4 rho'^2 rho''/rho^3 + rho'^4/rho^4)``.

    Diagnostic only.  It has the same rho-weighted integral as
    :func:`nonlinear_term_expansion` on Gaussians but differs pointwise, so
    ``N`` minus this form is O(l^2), not O(l^4).
    """
    f1, f2, _, _ = _log_derivatives(rho, params.floor)
    p1 = f1
    p2 = f2 + f1 ** 2
    pref = params.hbar ** 2 * params.length_scale_l ** 2 / (64 * params.mass)
    return pref * (2 * p2 ** 2 - 4 * p1 ** 2 * p2 + p1 ** 4)


def central_force(q: np.ndarray, grid: Grid) -> np.ndarray:
    """``-dq/dx`` by periodic central differences."""
    return -(np.roll(q, -1) - np.roll(q, 1)) / (2 * grid.spacing)


def js_quantum_force(rho: DensityField, params: ModelParams) -> np.ndarray:
    return central_force(js_quantum_potential(rho, params), rho.grid)
