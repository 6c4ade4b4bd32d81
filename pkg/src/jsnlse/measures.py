"""Information measures on gridded probability densities.

Every logarithm is natural (results in nats) and is taken of the
floor-regularized density ``max(rho, floor)``, so the divergences stay
finite even for disjoint supports.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .errors import FloorDominated, NonPositiveDensity
from .grid import (DEFAULT_FLOOR, DensityField, check_same_grid, circular_shift,
                   spectral_derivative)

SMALL_SHIFT_LIMITS = {"js": 1 / 8, "kl": 1 / 2, "j": 1 / 2}


@dataclass(frozen=True)
class DensityPair:
    rho0: DensityField
    rho1: DensityField

    def __post_init__(self):
        check_same_grid(self.rho0.grid, self.rho1.grid)

    def __iter__(self):
        return iter((self.rho0, self.rho1))


@dataclass(frozen=True)
class WeightedPair:
    pair: DensityPair
    pi1: float

    def __post_init__(self):
        if not 0.0 <= self.pi1 <= 1.0:
            raise ValueError(f"pi1 must lie in [0, 1], got {self.pi1}")

    @property
    def pi2(self) -> float:
        return 1.0 - self.pi1


def _floored(rho: DensityField, floor: float) -> np.ndarray:
    return np.maximum(rho.values, floor)


def shannon_entropy(rho: DensityField, floor: float = DEFAULT_FLOOR) -> float:
    """Differential entropy ``-int rho ln rho dx`` (may be negative)."""
    return -float(np.sum(rho.values * np.log(_floored(rho, floor))) * rho.grid.spacing)


def _warn_floor(rho_num, rho_den, floor, name):
    lost = np.sum(rho_num.values[rho_den.values <= floor]) * rho_num.grid.spacing
    if lost > 1e-12:
        warnings.warn(f"{name}: mass {lost:.3e} sits where the reference density is "
                      "below the floor; value is floor dominated", FloorDominated, stacklevel=3)


def kl_divergence(rho1: DensityField, rho0: DensityField, floor: float = DEFAULT_FLOOR) -> float:
    """Relative entropy ``int rho1 ln(rho1/rho0) dx`` of rho1 with respect to rho0."""
    g = check_same_grid(rho1.grid, rho0.grid)
    _warn_floor(rho1, rho0, floor, "kl_divergence")
    integrand = rho1.values * np.log(_floored(rho1, floor) / _floored(rho0, floor))
    return float(np.sum(integrand) * g.spacing)


def j_divergence(rho0: DensityField, rho1: DensityField, floor: float = DEFAULT_FLOOR) -> float:
    """Symmetrized KL, the average of the two directed divergences."""
    return 0.5 * (kl_divergence(rho0, rho1, floor) + kl_divergence(rho1, rho0, floor))


def k_divergence(rho0: DensityField, rho1: DensityField, floor: float = DEFAULT_FLOOR) -> float:
    """``int rho0 ln(2 rho0 / (rho0 + rho1)) dx``, bounded by ln 2."""
    g = check_same_grid(rho0.grid, rho1.grid)
    r0 = _floored(rho0, floor)
    r1 = np.maximum(rho1.values, 0.0)
    return float(np.sum(rho0.values * np.log(2 * r0 / (r0 + r1))) * g.spacing)


def js_divergence(rho0: DensityField, rho1: DensityField, floor: float = DEFAULT_FLOOR) -> float:
    return 0.5 * (k_divergence(rho0, rho1, floor) + k_divergence(rho1, rho0, floor))


def js_divergence_entropy(rho0: DensityField, rho1: DensityField,
                          floor: float = DEFAULT_FLOOR) -> float:
    """Jensen-Shannon divergence evaluated as an entropy difference."""
    g = check_same_grid(rho0.grid, rho1.grid)
    mid = DensityField(g, 0.5 * (rho0.values + rho1.values))
    return (shannon_entropy(mid, floor)
            - 0.5 * shannon_entropy(rho0, floor) - 0.5 * shannon_entropy(rho1, floor))


def js_distance(rho0: DensityField, rho1: DensityField, floor: float = DEFAULT_FLOOR) -> float:
    """Square root of the JS divergence; a metric on densities."""
    return float(np.sqrt(max(js_divergence(rho0, rho1, floor), 0.0)))


def pi_js_divergence(rho1: DensityField, rho2: DensityField, pi1: float,
                     floor: float = DEFAULT_FLOOR) -> float:
    """Weighted JS divergence ``H(pi1 rho1 + pi2 rho2) - pi1 H(rho1) - pi2 H(rho2)``.

    At ``pi1 = 1/2`` this is evaluated through the K-divergence form so it
    coincides with :func:`js_divergence` bit for bit.
    """
    g = check_same_grid(rho1.grid, rho2.grid)
    if not 0.0 <= pi1 <= 1.0:
        raise ValueError(f"pi1 must lie in [0, 1], got {pi1}")
    if pi1 == 0.5:
        return js_divergence(rho1, rho2, floor)
    if pi1 in (0.0, 1.0):
        return 0.0
    pi2 = 1.0 - pi1
    mix = DensityField(g, pi1 * rho1.values + pi2 * rho2.values)
    return (shannon_entropy(mix, floor)
            - pi1 * shannon_entropy(rho1, floor) - pi2 * shannon_entropy(rho2, floor))


def pi_k_divergence(rho1: DensityField, rho2: DensityField, pi: float,
                    floor: float = DEFAULT_FLOOR) -> float:
    """``int rho1 ln(rho1 / (pi rho1 + (1-pi) rho2)) dx``."""
    g = check_same_grid(rho1.grid, rho2.grid)
    if not 0.0 <= pi <= 1.0:
        raise ValueError(f"pi must lie in [0, 1], got {pi}")
    r1 = _floored(rho1, floor)
    mix = pi * r1 + (1.0 - pi) * np.maximum(rho2.values, 0.0)
    return float(np.sum(rho1.values * np.log(r1 / mix)) * g.spacing)


def pi_js_divergence_halfsum(rho1: DensityField, rho2: DensityField, pi: float,
                             floor: float = DEFAULT_FLOOR) -> float:
    """Average of the two weighted K-divergences.

    Equal to :func:`pi_js_divergence` only at ``pi = 1/2``; kept as a
    diagnostic for comparing the two weighted constructions.
    """
    return 0.5 * (pi_k_divergence(rho1, rho2, pi, floor) + pi_k_divergence(rho2, rho1, pi, floor))


def fisher_information(rho: DensityField, floor: float = DEFAULT_FLOOR) -> float:
    """``int (rho')**2 / rho dx``, evaluated as ``4 int (d sqrt(rho)/dx)**2 dx``.

    The amplitude form avoids dividing derivative roundoff by the tiny tail
    density, which would otherwise dominate for Gaussian-like data.
    ``floor`` is accepted for signature symmetry and unused.
    """
    d = spectral_derivative(np.sqrt(np.maximum(rho.values, 0.0)), rho.grid, 1)
    return float(4 * np.sum(d ** 2) * rho.grid.spacing)


def exponential_path(rho0: DensityField, rho1: DensityField, theta: float) -> np.ndarray:
    """Normalized ``rho0**(1-theta) * rho1**theta`` on the grid."""
    u = np.log(rho1.values) - np.log(rho0.values)
    lw = np.log(rho0.values) + theta * u
    w = np.exp(lw - lw.max())
    return w / (np.sum(w) * rho0.grid.spacing)


def fisher_path_integral(rho0: DensityField, rho1: DensityField, n_theta: int = 128,
                         floor: float = DEFAULT_FLOOR) -> float:
    """Integral over theta in [0, 1] of the parameter Fisher information.

    The path is the exponential family ``rho_theta ~ rho0**(1-theta) rho1**theta``;
    along it ``d ln rho_theta / d theta = ln(rho1/rho0) - E_theta[ln(rho1/rho0)]``,
    so the Fisher information is the variance of the log-ratio under
    rho_theta.  The theta integral uses composite Simpson on ``n_theta``
    intervals.
    """
    g = check_same_grid(rho0.grid, rho1.grid)
    if n_theta < 16:
        raise ValueError("n_theta must be at least 16")
    if rho0.values.min() <= floor or rho1.values.min() <= floor:
        raise NonPositiveDensity("exponential path needs both densities strictly above the floor")
    u = np.log(rho1.values) - np.log(rho0.values)
    thetas = np.linspace(0.0, 1.0, n_theta + 1)
    fisher = np.empty_like(thetas)
    for i, th in enumerate(thetas):
        p = exponential_path(rho0, rho1, th)
        mean = np.sum(p * u) * g.spacing
        fisher[i] = np.sum(p * (u - mean) ** 2) * g.spacing
    return float(simpson(fisher, x=thetas))


def small_shift_limit(measure: str, pi: float | None = None) -> float:
    """Analytic value of ``measure(rho, rho_delta) / (delta**2 I_F)`` as delta -> 0."""
    if measure == "pi_js":
        return pi * (1 - pi) / 2
    return SMALL_SHIFT_LIMITS[measure]


def small_shift_ratio(rho: DensityField, delta: float, measure: str = "js",
                      pi: float | None = None, floor: float = DEFAULT_FLOOR) -> float:
    """Divergence between rho and its shift by ``delta``, in units of delta**2 * I_F.

    ``measure`` is one of ``"js"``, ``"pi_js"`` (weight ``pi`` on rho),
    ``"kl"`` (KL of the shifted density relative to rho) or ``"j"``.
    """
    shifted = circular_shift(rho, delta)
    if measure == "js":
        value = js_divergence(rho, shifted, floor)
    elif measure == "pi_js":
        if pi is None:
            raise ValueError("measure 'pi_js' needs pi")
        value = pi_js_divergence(rho, shifted, pi, floor)
    elif measure == "kl":
        value = kl_divergence(shifted, rho, floor)
    elif measure == "j":
        value = j_divergence(rho, shifted, floor)
    else:
        raise ValueError(f"unknown measure {measure!r}")
    return value / (delta ** 2 * fisher_information(rho, floor))


def all_measures(rho0: DensityField, rho1: DensityField, pi: float = 0.5,
                 floor: float = DEFAULT_FLOOR) -> dict[str, float]:
    """Every pairwise measure plus the single-density ones, keyed by name."""
    out = {
        "entropy_0": shannon_entropy(rho0, floor),
        "entropy_1": shannon_entropy(rho1, floor),
        "fisher_0": fisher_information(rho0, floor),
        "fisher_1": fisher_information(rho1, floor),
        "kl_10": kl_divergence(rho1, rho0, floor),
        "kl_01": kl_divergence(rho0, rho1, floor),
        "j_divergence": j_divergence(rho0, rho1, floor),
        "k_divergence_01": k_divergence(rho0, rho1, floor),
        "k_divergence_10": k_divergence(rho1, rho0, floor),
        "js_divergence": js_divergence(rho0, rho1, floor),
        "js_divergence_entropy": js_divergence_entropy(rho0, rho1, floor),
        "js_distance": js_distance(rho0, rho1, floor),
        "pi_js_divergence": pi_js_divergence(rho0, rho1, pi, floor),
        "pi_js_divergence_halfsum": pi_js_divergence_halfsum(rho0, rho1, pi, floor),
    }
    return out
