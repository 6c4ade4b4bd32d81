"""Jensen-Shannon nonlinear Schrodinger dynamics on periodic grids.

Information measures between gridded densities, the JS quantum potential
and its nonlinear term, split-step and Runge-Kutta evolution, numerical
checks of the Hamiltonian structure and a two-particle separability
experiment.
"""
from .errors import *  # noqa: F401,F403
from .grid import (DEFAULT_FLOOR, DensityField, Grid, MadelungPair, WaveField,
                   centered_grid, circular_shift, gaussian_density, gaussian_wave,
                   inner, madelung_from_wave, make_grid, periodic_gaussian_wave,
                   spectral_derivative, wave_from_madelung)
from .measures import (all_measures, fisher_information, fisher_path_integral,
                       j_divergence, js_distance, js_divergence, js_divergence_entropy,
                       k_divergence, kl_divergence, pi_js_divergence, pi_k_divergence,
                       shannon_entropy, small_shift_ratio)
from .potential import (ModelParams, PotentialSpec, bohm_quantum_potential,
                        js_quantum_potential, nonlinear_term, nonlinear_term_expansion,
                        parametric_nonlinear_term, parametric_quantum_potential)
from .evolution import (EvolutionConfig, energy_functional, evolve, evolve_pair,
                        final_state, rk4_step, strang_step)
from .hamiltonian import (DiscreteStateOperator, functional_derivative_rho,
                          functional_derivative_s, hamiltonian_flow_check,
                          numerical_functional_derivative, symplectic_form,
                          von_neumann_residual)
from .manybody import (CompositeGrid, CompositeWave, axis_maps, manybody_nonlinear_term,
                       reduced_density, separability_experiment)
from .config import RunConfig, parse_config

__version__ = "0.1.0"
