"""Ground-state profiles across dimensions and nonlinearities.

The optimizers of the underlying interpolation inequality solve
-Lap Q + |E| Q = ||Q||_q^(2-q) Q^(q-1) with Q > 0, radial, decaying.
This script solves that equation for several (q, d), then stress-tests
each solution against identities it must satisfy:

* the virial identity fixes ||Q||_q in terms of E alone;
* in d = 1 a closed form Q = A sech^(2/(q-2))(kappa x) is available;
* perturbing Q must increase the constrained energy (minimality).

Note the spread of physical scales: the profile width is ~ 1/sqrt(|E|),
which ranges from ~2 for (q=4, d=1) to ~75 for (q=4, d=3).  The grids
below are sized accordingly.
"""

import numpy as np

from eigstab import Grid, GridFunction, gns_energy, keller_profile, solve_ground_state, virial_norm_check

CASES = [
    (4.0, 1, 30.0, 6000),
    (3.0, 1, 30.0, 6000),
    (10.0 / 3.0, 3, 250.0, 4000),
    (4.0, 3, 1500.0, 6000),
]

solutions = {}
print(f"{'q':>6} {'d':>2} {'E':>16} {'||Q||_q':>12} {'virial gap':>11} {'EL residual':>12}")
for q, d, extent, n in CASES:
    gs = solve_ground_state(q, d, Grid.radial(d, extent, n))
    solutions[(q, d)] = gs
    measured, predicted = virial_norm_check(gs)
    print(
        f"{q:6.3f} {d:2d} {gs.E:16.10f} {gs.norm_q:12.8f} "
        f"{abs(measured - predicted):11.2e} {gs.el_residual:12.2e}"
    )

print()
print("d = 1 closed form check (sup norm of Q - A sech^(2/(q-2))(kappa x)):")
for q in (4.0, 3.0):
    gs = solutions[(q, 1)]
    exact = keller_profile(q, gs.grid.nodes)
    print(f"  q = {q:g}: {np.max(np.abs(gs.Q.values - exact)):.2e}")

print()
print("Minimality: energy rises under L2-norm-preserving perturbations")
gs = solutions[(4.0, 1)]
base = gns_energy(gs.Q, gs.q)
w = gs.grid.quad_weights
for eps in (1e-2, 1e-1):
    vals = gs.Q.values * (1.0 + eps * np.cos(gs.grid.nodes))
    vals /= np.sqrt(w @ vals**2)
    e = gns_energy(GridFunction(gs.grid, vals), gs.q)
    print(f"  eps = {eps:g}: E(Q_eps) - E(Q) = {e - base:.3e}  (> 0)")
