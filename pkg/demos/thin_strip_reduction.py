"""A thin strip (0, eps) x (0, 1) collapsing onto the interval (0, 1).

J averages across the strip and I extends constantly, so J I is the
identity and I J - Id only sees transverse oscillation, which the graph norm
penalises at rate eps. Transverse modes sit at nu_m / eps^2 and leave any
fixed window, after which the windowed spectra agree.
"""

import numpy as np

from varspec import SpectralWindow, condition_report, verify_forward_nodes, verify_reverse_bound
from varspec import resolvent_norm, windowed_hausdorff_run
from varspec.families import ThinStripSpec, make_thin_strip_family, thin_strip_eigenvalues
from varspec.spectra import certify_isolated_eigenvalue, certify_no_pollution, circle_nodes, spectral_set

spec = ThinStripSpec(eps_list=(0.5, 0.25, 0.125))
limit, family = make_thin_strip_family(spec)

for m in family:
    rep = condition_report(m, limit)
    err = np.abs(np.sort(spectral_set(m.A_eps).as_array().real) - thin_strip_eigenvalues(spec, m.eps)).max()
    print(f"eps = {m.eps:5.3f}   cond_i <= {rep.cond_i[1]:.2e}   cond_ii = {rep.cond_ii:.1e}   "
          f"M = {rep.cond_iii_M:.3f}   cond_iv = {rep.cond_iv:.1e}   tensor-sum error = {err:.1e}")

nodes = circle_nodes(-1, 0.5, 16)
r = max(abs(z) for z in nodes) + 1
l_fwd = max(resolvent_norm(limit.A, z).resolvent_norm for z in nodes)
l_rev = max(resolvent_norm(m.A_eps, z).resolvent_norm for m in family for z in nodes)
fwd = [c for m in family for c in verify_forward_nodes(m, limit, nodes, l_fwd, r)]
rev = [c for m in family for c in verify_reverse_bound(m, limit, nodes, l_rev, r)]
print(f"\nforward bound: L = {fwd[0].L:.3f}, max observed {max(c.observed for c in fwd):.3f}, "
      f"statuses {sorted({c.status for c in fwd})}")
print(f"reverse bound: safe L = {rev[0].L_safe:.3f}, stated L = {rev[0].L_stated:.3f}, "
      f"max observed {max(c.observed for c in rev):.3f}")

print("\nno pollution on |z - 5| = 1:", certify_no_pollution(family, limit, circle_nodes(5, 1, 16)).verdict)
vals = np.sort(spectral_set(limit.A).as_array().real)
lam = vals[1]
out = certify_isolated_eigenvalue(family, limit, lam, 0.5 * min(lam - vals[0], vals[2] - lam))
print(f"tracking lambda = {lam:.4f}: {out.verdict}")

# the schedule includes wide strips whose transverse band still meets the window
wide = ThinStripSpec(eps_list=(2.0, 1.2, 0.8, 0.5))
limit_w, family_w = make_thin_strip_family(wide)
print("\nwindowed Hausdorff distance, window centre 5 radius 6")
for eps, h in windowed_hausdorff_run(family_w, limit_w, SpectralWindow(5, 6)):
    print(f"eps = {eps:4.2f}   d_forward = {h.d_forward:.3e}   d_backward = {h.d_backward:.3e}")
