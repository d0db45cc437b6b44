"""Resolvent norms on a grid: a normal matrix against truncated shifts.

For a normal matrix the level sets of ||(z - A)^{-1}|| are discs around the
eigenvalues. The truncated shift is nilpotent, yet its resolvent is large on
a region that fills out the unit disc as the truncation grows. This is how
the finite section remembers that the whole disc is spectrum.
"""

import numpy as np

from varspec import SpectralWindow, pseudospectrum
from varspec.families import shift_matrix

window = SpectralWindow(0, 1.5)
operators = [
    ("unit-circle diagonal", np.diag(np.exp(2j * np.pi * np.arange(8) / 8))),
    ("truncated shift, N = 4", shift_matrix(4)),
    ("truncated shift, N = 16", shift_matrix(16)),
]

for name, A in operators:
    grid = pseudospectrum(A, window, (31, 31))
    log_norm = np.log10(grid.resolvent_norm)
    inside = np.abs(grid.nodes) < 1
    print(name)
    print(f"  disc nodes with ||R|| > 1e2: {np.sum(log_norm[inside] > 2)}/{inside.sum()}")
    print(f"  ||R|| at z = 0.5:            {grid.resolvent_norm[20, 15]:.3e}")
    # coarse picture of log10 ||R||, clipped to one digit
    for row in np.clip(log_norm[::3, ::3].T[::-1], 0, 9):
        print("   " + " ".join(str(int(v)) for v in row))
