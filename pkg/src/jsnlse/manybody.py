"""Composite systems: n particles in d dimensions on a product of periodic grids.

Configuration axes are numbered 1..n*d.  Axis i belongs to particle
``ceil(i/d)`` and is physical direction ``((i-1) mod d) + 1`` of it, so the
mass on axis i is that particle's mass and the JS length there is the
length scale of its direction.  The many-body JS functional is the sum over
axes of ``zeta_i I_JS(rho, rho shifted along axis i)`` with
``zeta_i = hbar^2 / (m_i l_i^2)``, and the nonlinear term is the matching
sum of one-axis terms.  Arrays are row-major with axis k of the array being
configuration axis k+1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import GridError, GridMismatch, IndexOutOfRange, NonFinite
from .evolution import dealias_mask
from .grid import DEFAULT_FLOOR, DensityField, Grid, centered_grid, spectral_derivative
from .potential import bohm_array, js_log_array

MAX_TOTAL_POINTS = 2 ** 22
BOHM_FORMS = ("amplitude", "density")


@dataclass(frozen=True)
class CompositeGrid:
    """Product grid for ``n_particles`` particles with ``dims_per_particle`` axes each."""

    n_particles: int
    dims_per_particle: int
    axis_grids: tuple[Grid, ...]
    masses: tuple[float, ...]
    length_scales: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "axis_grids", tuple(self.axis_grids))
        object.__setattr__(self, "masses", tuple(float(m) for m in self.masses))
        object.__setattr__(self, "length_scales", tuple(float(l) for l in self.length_scales))
        n, d = self.n_particles, self.dims_per_particle
        if n < 1 or d < 1:
            raise GridError("n_particles and dims_per_particle must be positive")
        if len(self.axis_grids) != n * d:
            raise GridError(f"need {n * d} axis grids, got {len(self.axis_grids)}")
        if len(self.masses) != n or min(self.masses) <= 0:
            raise GridError(f"need {n} positive masses")
        if len(self.length_scales) != d or min(self.length_scales) <= 0:
            raise GridError(f"need {d} positive length scales")
        if self.total_points > MAX_TOTAL_POINTS:
            raise GridError(f"{self.total_points} points exceeds the limit {MAX_TOTAL_POINTS}")

    @property
    def n_axes(self) -> int:
        return self.n_particles * self.dims_per_particle

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(g.n_points for g in self.axis_grids)

    @property
    def total_points(self) -> int:
        return math.prod(self.shape)

    @property
    def cell_volume(self) -> float:
        return math.prod(g.spacing for g in self.axis_grids)

    def axis_mass(self, i: int) -> float:
        return self.masses[axis_maps(i, self)[0] - 1]

    def axis_length_scale(self, i: int) -> float:
        return self.length_scales[axis_maps(i, self)[1] - 1]

    def particle_axes(self, particle: int) -> tuple[int, ...]:
        """Zero-based array axes of a 1-based particle index."""
        if not 1 <= particle <= self.n_particles:
            raise IndexOutOfRange(f"particle {particle} not in 1..{self.n_particles}")
        d = self.dims_per_particle
        return tuple(range((particle - 1) * d, particle * d))

    def coordinate(self, i: int) -> np.ndarray:
        """Coordinates of 1-based axis i, shaped to broadcast over the full array."""
        axis_maps(i, self)
        shape = [1] * self.n_axes
        shape[i - 1] = -1
        return np.asarray(self.axis_grids[i - 1].x).reshape(shape)


def two_particle_grid(length: float, n_points: int, length_scale: float,
                      masses: Sequence[float] = (1.0, 1.0)) -> CompositeGrid:
    """Two particles on a line, each on the same centered grid."""
    g = centered_grid(length, n_points)
    return CompositeGrid(2, 1, (g, g), tuple(masses), (length_scale,))


def axis_maps(i: int, grid: CompositeGrid) -> tuple[int, int]:
    """``(particle, direction)`` of 1-based configuration axis ``i``."""
    d = grid.dims_per_particle
    if not 1 <= i <= grid.n_axes:
        raise IndexOutOfRange(f"axis {i} not in 1..{grid.n_axes}")
    return -(-i // d), (i - 1) % d + 1


@dataclass(frozen=True)
class CompositeWave:
    grid: CompositeGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != self.grid.shape:
            raise GridMismatch(f"values shape {v.shape} != grid shape {self.grid.shape}")
        object.__setattr__(self, "values", v)

    @property
    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2) * self.grid.cell_volume)

    def normalized(self) -> "CompositeWave":
        return CompositeWave(self.grid, self.values / np.sqrt(self.norm_sq))

    def density(self) -> np.ndarray:
        return np.abs(self.values) ** 2


def product_wave(grid: CompositeGrid, factors: Sequence[np.ndarray]) -> CompositeWave:
    """Tensor product of one 1D factor per configuration axis."""
    if len(factors) != grid.n_axes:
        raise GridMismatch(f"need {grid.n_axes} factors, got {len(factors)}")
    out = np.ones(grid.shape, dtype=complex)
    for i, f in enumerate(factors, start=1):
        shape = [1] * grid.n_axes
        shape[i - 1] = -1
        out = out * np.asarray(f, dtype=complex).reshape(shape)
    return CompositeWave(grid, out)


def _axis_js_term(rho: np.ndarray, grid: CompositeGrid, hbar: float, i: int,
                  floor: float) -> np.ndarray:
    g = grid.axis_grids[i - 1]
    m, l = grid.axis_mass(i), grid.axis_length_scale(i)
    zeta = hbar ** 2 / (m * l ** 2)
    return 0.5 * zeta * js_log_array(rho, g.shift_steps(l), floor, axis=i - 1)


def _axis_bohm(rho: np.ndarray, grid: CompositeGrid, hbar: float, i: int,
               bohm_form: str, floor: float) -> np.ndarray:
    """Bohm potential of axis i, from sqrt(rho) or from rho derivatives."""
    g = grid.axis_grids[i - 1]
    m = grid.axis_mass(i)
    if bohm_form == "amplitude":
        return bohm_array(rho, g, hbar, m, floor, axis=i - 1)
    r = np.maximum(rho, floor)
    d1 = spectral_derivative(rho, g, 1, axis=i - 1)
    d2 = spectral_derivative(rho, g, 2, axis=i - 1)
    return -(hbar ** 2 / (8 * m)) * (2 * d2 / r - d1 ** 2 / r ** 2)


def manybody_nonlinear_term(rho: np.ndarray, grid: CompositeGrid, hbar: float = 1.0,
                            bohm_form: str = "amplitude",
                            floor: float = DEFAULT_FLOOR) -> np.ndarray:
    """Sum over axes of ``(zeta_i/2) ln[4 rho^2 / ((rho + rho_i)(rho + rho_-i))] - Q_i``.

    ``bohm_form="density"`` evaluates ``Q_i`` as
    ``-(hbar^2/8m)(2 rho''/rho - rho'^2/rho^2)``; the default uses
    ``sqrt(rho)``, which cancels better in the tails.
    """
    if bohm_form not in BOHM_FORMS:
        raise ValueError(f"bohm_form must be one of {BOHM_FORMS}")
    rho = np.asarray(rho, dtype=float)
    if rho.shape != grid.shape:
        raise GridMismatch(f"rho shape {rho.shape} != grid shape {grid.shape}")
    out = np.zeros_like(rho)
    for i in range(1, grid.n_axes + 1):
        out += _axis_js_term(rho, grid, hbar, i, floor)
        out -= _axis_bohm(rho, grid, hbar, i, bohm_form, floor)
    return out


def manybody_quantum_potential(rho: np.ndarray, grid: CompositeGrid, hbar: float = 1.0,
                               floor: float = DEFAULT_FLOOR) -> np.ndarray:
    """Sum of the per-axis JS potentials (the nonlinear term plus the Bohm terms)."""
    out = np.zeros(grid.shape)
    for i in range(1, grid.n_axes + 1):
        out += _axis_js_term(np.asarray(rho, dtype=float), grid, hbar, i, floor)
    return out


def reduced_density(psi: CompositeWave, particle: int):
    """Marginal density of one particle, integrating |psi|^2 over all other axes.

    Returns a :class:`DensityField` when the particle has one axis and a
    plain array of shape ``(n_1, ..., n_d)`` otherwise.
    """
    g = psi.grid
    keep = g.particle_axes(particle)
    others = tuple(a for a in range(g.n_axes) if a not in keep)
    weight = math.prod(g.axis_grids[a].spacing for a in others)
    marginal = np.sum(psi.density(), axis=others) * weight
    if len(keep) == 1:
        return DensityField(g.axis_grids[keep[0]], marginal)
    return marginal


# -- composite evolution ---------------------------------------------------------

@dataclass(frozen=True)
class CompositeConfig:
    """Composite Strang run: ``potential`` is the external V on the full grid."""

    grid: CompositeGrid
    potential: np.ndarray
    dt: float = 1e-3
    n_steps: int = 100
    record_every: int = 10
    hbar: float = 1.0
    nonlinearity: str = "js"
    dealias: bool = True
    floor: float = DEFAULT_FLOOR

    def __post_init__(self):
        v = np.asarray(self.potential, dtype=float)
        if v.shape != self.grid.shape:
            raise GridMismatch(f"potential shape {v.shape} != grid shape {self.grid.shape}")
        object.__setattr__(self, "potential", v)
        if self.dt <= 0 or self.n_steps < 0 or self.record_every < 1:
            raise ValueError("need dt > 0, n_steps >= 0, record_every >= 1")
        if self.nonlinearity not in ("js", "none"):
            raise ValueError("nonlinearity must be 'js' or 'none'")


class CompositeDynamics:
    """Strang splitting on the product grid; the same factors as the 1D scheme."""

    def __init__(self, cfg: CompositeConfig):
        self.cfg = cfg
        g = cfg.grid
        symbol = np.zeros(g.shape)
        mask = np.ones(g.shape, dtype=bool)
        for i in range(1, g.n_axes + 1):
            ag = g.axis_grids[i - 1]
            shape = [1] * g.n_axes
            shape[i - 1] = -1
            k2 = np.asarray(ag.wavenumbers).reshape(shape) ** 2
            symbol = symbol + cfg.hbar ** 2 * k2 / (2 * g.axis_mass(i))
            if cfg.dealias:
                mask = mask & dealias_mask(ag).reshape(shape)
        self.kinetic_symbol = symbol
        self.kinetic_phase = np.exp(-1j * symbol * cfg.dt / cfg.hbar) * mask

    def effective_potential(self, rho: np.ndarray) -> np.ndarray:
        if self.cfg.nonlinearity == "none":
            return self.cfg.potential
        return self.cfg.potential + manybody_nonlinear_term(
            rho, self.cfg.grid, self.cfg.hbar, floor=self.cfg.floor)

    def step(self, psi: np.ndarray) -> np.ndarray:
        half = -0.5j * self.cfg.dt / self.cfg.hbar
        psi = np.exp(half * self.effective_potential(np.abs(psi) ** 2)) * psi
        psi = np.fft.ifftn(self.kinetic_phase * np.fft.fftn(psi))
        return np.exp(half * self.effective_potential(np.abs(psi) ** 2)) * psi

    def energy(self, psi: np.ndarray) -> float:
        """``int rho [sum_i (d_i S)^2 / 2m_i + V + Q_N] dV``, the composite generator."""
        cfg, g = self.cfg, self.cfg.grid
        rho = np.abs(psi) ** 2
        kinetic = np.zeros(g.shape)
        for i in range(1, g.n_axes + 1):
            dpsi = spectral_derivative(psi, g.axis_grids[i - 1], 1, axis=i - 1)
            flux = cfg.hbar * np.imag(np.conj(psi) * dpsi)
            kinetic += np.where(rho > cfg.floor, flux ** 2 / np.maximum(rho, cfg.floor), 0.0) \
                / (2 * g.axis_mass(i))
        if cfg.nonlinearity == "js":
            qn = manybody_quantum_potential(rho, g, cfg.hbar, cfg.floor)
            total = kinetic + rho * (cfg.potential + qn)
        else:
            lap = np.fft.ifftn(self.kinetic_symbol * np.fft.fftn(psi))
            total = np.real(np.conj(psi) * lap) + rho * cfg.potential
        return float(np.sum(total) * g.cell_volume)


@dataclass(frozen=True)
class CompositeRecord:
    time: float
    norm_sq: float
    energy: float


def composite_evolve(psi0: CompositeWave, cfg: CompositeConfig,
                     observe: Callable[[CompositeWave], object] | None = None):
    """Strang-evolve ``psi0``; returns ``(records, observations)`` at every record point.

    ``observe`` maps each recorded state to whatever should be kept (by
    default the state itself).
    """
    if psi0.grid != cfg.grid:
        raise GridMismatch("initial state and config use different grids")
    observe = observe or (lambda w: w)
    dyn = CompositeDynamics(cfg)
    psi = np.array(psi0.values)
    records, observations = [], []

    def record(n):
        w = CompositeWave(cfg.grid, psi)
        records.append(CompositeRecord(n * cfg.dt, w.norm_sq, dyn.energy(psi)))
        observations.append(observe(w))

    record(0)
    for n in range(1, cfg.n_steps + 1):
        psi = dyn.step(psi)
        if n % cfg.record_every == 0 or n == cfg.n_steps:
            if not np.all(np.isfinite(psi)):
                raise NonFinite(f"non-finite composite state after step {n}")
            record(n)
    return records, observations


# -- separability experiment -------------------------------------------------------

INITIAL_KINDS = ("product", "entangled")


@dataclass(frozen=True)
class SeparabilityConfig:
    """Paired two-particle runs that differ only in the potential on particle 2.

    Both runs carry ``k1/2 x1^2`` on particle 1; run A has nothing else on
    particle 2 and run B adds ``k2/2 x2^2``.  ``coupling`` adds
    ``kappa x1 x2`` to both runs, which is the interacting control.
    ``initial="entangled"`` is the superposition of the two products
    ``g(x1 - a) g(x2 - b)`` and ``g(x1 + a) g(x2 + b)``.
    """

    n_points: int = 128
    length: float = 24.0
    length_scale: float | None = None
    sigma: float = 0.7
    initial: str = "product"
    offset_1: float = 1.5
    offset_2: float = 6.0
    momentum_1: float = 0.0
    k1: float = 1.0
    k2: float = 1.0
    coupling: float = 0.0
    dt: float = 1e-3
    n_steps: int = 500
    record_every: int = 50
    hbar: float = 1.0
    masses: tuple[float, float] = (1.0, 1.0)
    tolerance: float = 1e-10
    nonlinearity: str = "js"
    floor: float = DEFAULT_FLOOR

    def __post_init__(self):
        if self.initial not in INITIAL_KINDS:
            raise ValueError(f"initial must be one of {INITIAL_KINDS}")

    def grid(self) -> CompositeGrid:
        l = self.length_scale if self.length_scale is not None else 2 * self.length / self.n_points
        return two_particle_grid(self.length, self.n_points, l, self.masses)


@dataclass(frozen=True)
class SeparabilityRow:
    time: float
    marginal_distance: float
    norm_sq: float
    energy: float


@dataclass(frozen=True)
class SeparabilityReport:
    rows: list[SeparabilityRow] = field(default_factory=list)
    tolerance: float = 1e-10

    @property
    def max_distance(self) -> float:
        return max((r.marginal_distance for r in self.rows), default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_distance < self.tolerance


def _gauss(x: np.ndarray, center: float, sigma: float, k0: float = 0.0) -> np.ndarray:
    return np.exp(-(x - center) ** 2 / (4 * sigma ** 2) + 1j * k0 * x)


def separability_initial_state(cfg: SeparabilityConfig, grid: CompositeGrid) -> CompositeWave:
    x = np.asarray(grid.axis_grids[0].x)
    a, b, s, k = cfg.offset_1, cfg.offset_2, cfg.sigma, cfg.momentum_1
    if cfg.initial == "product":
        return product_wave(grid, [_gauss(x, a, s, k), _gauss(x, b, s)]).normalized()
    plus = product_wave(grid, [_gauss(x, a, s, k), _gauss(x, b, s)]).values
    minus = product_wave(grid, [_gauss(x, -a, s, k), _gauss(x, -b, s)]).values
    return CompositeWave(grid, plus + minus).normalized()


def separability_experiment(cfg: SeparabilityConfig) -> SeparabilityReport:
    """Max-over-time L1 distance between particle-1 marginals of the paired runs.

    Each row reports the distance at one record time together with the norm
    and composite energy of run A (the one without the particle-2 potential).
    """
    grid = cfg.grid()
    x1, x2 = grid.coordinate(1), grid.coordinate(2)
    base = 0.5 * cfg.k1 * x1 ** 2 + cfg.coupling * x1 * x2 + np.zeros(grid.shape)
    changed = base + 0.5 * cfg.k2 * x2 ** 2
    psi0 = separability_initial_state(cfg, grid)
    common = dict(dt=cfg.dt, n_steps=cfg.n_steps, record_every=cfg.record_every,
                  hbar=cfg.hbar, nonlinearity=cfg.nonlinearity, floor=cfg.floor)

    def marginal(w):
        return reduced_density(w, 1).values

    rec_a, marg_a = composite_evolve(psi0, CompositeConfig(grid, base, **common), marginal)
    _, marg_b = composite_evolve(psi0, CompositeConfig(grid, changed, **common), marginal)
    dx = grid.axis_grids[0].spacing
    rows = [SeparabilityRow(r.time, float(np.sum(np.abs(ma - mb)) * dx), r.norm_sq, r.energy)
            for r, ma, mb in zip(rec_a, marg_a, marg_b)]
    return SeparabilityReport(rows, cfg.tolerance)
