"""
Non-Abelian geometric tensor of a twofold degenerate band
==========================================================

Four-band Dirac model. The lower level is doubly degenerate, so the metric
and curvature become 2x2 matrices in band space. Off-diagonal entries come
from projectors onto superpositions of the two basis states.
"""

import numpy as np

from qgtprobe.model import GammaModelPoint
from qgtprobe.nonabelian import nonabelian_qgt, oracle_nonabelian_qgt

q = GammaModelPoint(np.pi / 3, np.pi / 4, 1.0)
res = nonabelian_qgt(q, 1e-4)
ref = oracle_nonabelian_qgt(q, 1e-4)

np.set_printoptions(precision=6, suppress=True)
print("g_mu,nu =\n", res.g[("mu", "nu")])
print("F_mu,nu =\n", res.F[("mu", "nu")])
print("max |Q - Q_oracle| =", np.max(np.abs(res.full_Q() - ref.full_Q())))

# the trace over the degenerate pair is gauge invariant
print("tr g_mu,mu =", np.trace(res.g[("mu", "mu")]).real)
print("tr F_mu,nu =", np.trace(res.F[("mu", "nu")]).real)

# Q is positive semidefinite as a 4x4 matrix, up to the O(delta) error
print("eigenvalues of Q:", np.linalg.eigvalsh(0.5 * (res.full_Q() + res.full_Q().conj().T)))
