"""Norm convergence that still loses spectrum.

T shifts e_i to e_{i-1} and kills e_0; T_n instead sends e_0 to e_{-1}/n.
So ||T_n - T|| = 1/n, yet on the integers every T_n is invertible inside the
unit disc while the disc is spectrum of T. At finite size the story shows up
in two ways: resolvent norms of T blow up geometrically inside the disc,
and (with a periodic closure) the windowed spectra never meet.
"""

import numpy as np

from varspec import SpectralWindow, operator_norm, windowed_hausdorff_run
from varspec.families import ShiftFamilySpec, make_shift_family, shift_residual_bound

limit, family = make_shift_family(ShiftFamilySpec(n_list=(2, 5, 10, 100), window_N=128))
for m in family:
    print(f"n = {round(1 / m.eps):3d}   ||T_n - T|| = {operator_norm(m.A_eps.entries - limit.A.entries):.6f}")

# approximate eigenvectors x_N = sum lam^k e_k give a lower bound on ||(lam - T)^{-1}||
print("\nresolvent lower bound at lam = 0.5")
for N in (5, 10, 20, 30):
    residual, bound = shift_residual_bound(0.5, N)
    print(f"N = {N:2d}   residual = {residual:.3e}   ||R(0.5)|| >= {bound:.3e}")

# periodic closure: T_n has eigenvalues on the circle of radius (1/n)^(1/(2N+1)),
# the truncated T is nilpotent, so nothing of T_n sits near 0
limit_w, family_w = make_shift_family(ShiftFamilySpec(n_list=(2, 5, 10), window_N=12, wrap=True))
print("\nwindowed spectra, disc of radius 0.9 (N = 12, wrapped)")
for eps, h in windowed_hausdorff_run(family_w, limit_w, SpectralWindow(0, 0.9)):
    moduli = np.abs(np.linalg.eigvals(next(m for m in family_w if m.eps == eps).A_eps.entries))
    print(f"n = {round(1 / eps):3d}   |eigenvalues| ~ {moduli.mean():.4f}   "
          f"d_forward = {h.d_forward}   d_backward = {h.d_backward}")
