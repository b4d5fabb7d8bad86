"""
Topological transition of the two-band model
=============================================

Sweep the mass m across the gap closing at m = 2 and watch the Chern number
jump from -1 to 0. Exact ground projectors, 15x15 grid.
"""

import numpy as np

from qgtprobe.sweep import RunConfig, chern, sweep

for m in np.arange(0.5, 3.75, 0.5):
    res = sweep(RunConfig(method="exact", m=float(m), shots=None))
    # m = 2 closes the gap at k = 0, which sits on the grid
    rep = chern(res, skip_nonfinite=True)
    print(f"m = {m:4.2f}   {rep}")

# where does the curvature live? near the gap minimum
res = sweep(RunConfig(method="exact", m=1.25, shots=None))
F = res.field("F_xy")
i, j = np.unravel_index(np.argmax(np.abs(F)), F.shape)
ks = res.config.grid.ks
print(f"\nlargest |F| = {abs(F[i, j]):.3f} at k = ({ks[i]:.3f}, {ks[j]:.3f})")
print("metric trace at the same point:", res.field("g_xx")[i, j] + res.field("g_yy")[i, j])
