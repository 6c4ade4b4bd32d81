"""How far the JS dynamics drift from ordinary quantum mechanics as l shrinks.

A Gaussian is evolved in a harmonic trap to t = 1 with and without the
nonlinear term.  The gap between the two final states should fall by a
factor of about four each time the length scale l is halved.

    python3 demos/linear_limit.py
"""
import numpy as np

from jsnlse import EvolutionConfig, ModelParams, PotentialSpec, centered_grid, final_state, gaussian_wave

grid = centered_grid(25.6, 256)
psi0 = gaussian_wave(grid, 1.0)
previous = None
print(f"{'l':>6} {'L2 gap':>12} {'ratio':>7}")
for l in (0.4, 0.2, 0.1):
    cfg = EvolutionConfig(ModelParams(length_scale_l=l), PotentialSpec("harmonic", k=1.0),
                          dt=1e-3, n_steps=1000)
    js = final_state(psi0, cfg)
    lin = final_state(psi0, cfg.replace(nonlinearity="none"))
    gap = np.sqrt(np.sum(np.abs(js.values - lin.values) ** 2) * grid.spacing)
    ratio = "" if previous is None else f"{previous / gap:7.3f}"
    print(f"{l:6.2f} {gap:12.4e} {ratio}")
    previous = gap
