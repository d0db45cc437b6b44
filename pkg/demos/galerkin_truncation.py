"""Compressions onto the first m coordinates.

I_m projects onto the first m coordinates and J_m embeds them back, so
I_m J_m is the identity on the small space. For a self-adjoint base the
compressed eigenvalues interlace with the full ones. A diagonal base keeps
its retained entries exactly.
"""

import numpy as np

from varspec import condition_report, spectral_set
from varspec.families import GalerkinSpec, make_galerkin_family
from varspec.spectra import certify_isolated_eigenvalue

limit, family = make_galerkin_family(GalerkinSpec(np.diag(np.arange(1.0, 41.0)), (5, 10, 20, 40)))
print(f"z0 = {limit.z0}")
for m in family:
    rep = condition_report(m, limit)
    print(f"m = {m.A_eps.dim:2d}   cond_i = {rep.cond_i}   cond_ii = {rep.cond_ii:.3f}   "
          f"cond_iv = {rep.cond_iv:.3e}")

outcome = certify_isolated_eigenvalue(family, limit, 7.0, 0.5)
print(f"\ntracking lambda = 7: {outcome.verdict}")
for step in outcome.witnesses["sequence"]:
    print(f"  eps = {step['eps']:.4f}   nearest = {step['lambda_eps'][0]:.1f}   gap = {step['gap']}")

# a random Hermitian base: Cauchy interlacing
rng = np.random.default_rng(0)
B = rng.standard_normal((12, 12))
H = B + B.T
limit_h, family_h = make_galerkin_family(GalerkinSpec(H, (4, 8, 12)))
full = np.array(spectral_set(limit_h.A).points).real
print("\nfull spectrum ", np.round(full, 2))
for m in family_h:
    print(f"m = {m.A_eps.dim:2d}        ", np.round(np.array(spectral_set(m.A_eps).points).real, 2))
