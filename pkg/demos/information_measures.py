"""Divergences between two Gaussians and their small-shift behaviour.

Prints every pairwise measure for a unit Gaussian and a displaced copy,
then shows the JS divergence of a shift delta approaching delta^2 I_F / 8.

    python3 demos/information_measures.py
"""
from jsnlse import centered_grid, gaussian_density
from jsnlse.measures import all_measures, small_shift_limit, small_shift_ratio

grid = centered_grid(25.6, 1024)
rho0 = gaussian_density(grid, 1.0)
rho1 = gaussian_density(grid, 1.0, x0=0.5)
for name, value in all_measures(rho0, rho1, pi=0.3).items():
    print(f"{name:26s} {value: .10f}")

print(f"\nJS / (delta^2 I_F), limit {small_shift_limit('js'):.6f}")
for delta in (0.4, 0.2, 0.1, 0.05):
    print(f"  delta = {delta:5.3f}: {small_shift_ratio(rho0, delta):.6f}")
