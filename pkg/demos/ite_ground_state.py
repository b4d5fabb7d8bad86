"""
Ground states by post-selected imaginary-time evolution
========================================================

exp(-tau H) is not unitary, so it is embedded in a two-qubit unitary and the
ancilla is post-selected on |0>. The price is the success fraction.
"""

import numpy as np

from qgtprobe.ite import embed_unitary, ite_operator, overlap_with_up, prepare_ground_projector_ite
from qgtprobe.linalg import trace_distance
from qgtprobe.model import ModelPoint, bloch_vector, build_hamiltonian, exact_ground_projector

p = ModelPoint(np.pi / 3, np.pi / 4, 1.0)
d = bloch_vector(p)
print("d =", d.as_array(), " |d| =", d.norm)

# the embedding: U is unitary and its top-left block is proportional to exp(-tau H)
A = ite_operator(build_hamiltonian(d), 8.0)
emb = embed_unitary(A)
U = emb.U_big
print("unitarity error:", np.max(np.abs(U.conj().T @ U - np.eye(4))))
print("block error:", np.max(np.abs(emb.block - emb.u * A)), " u =", emb.u)

print("\noverlap of |0> with the ground state:", overlap_with_up(p))
exact = exact_ground_projector(p)
for tau in (1, 2, 4, 8):
    proj, frac = prepare_ground_projector_ite(p, tau)
    print(f"tau = {tau}:  trace distance {trace_distance(proj, exact):.2e}  success {frac:.4f}")

# finite shots: the error now comes from sampling, not from tau
from qgtprobe.circuit import Shots

proj, frac = prepare_ground_projector_ite(p, 8.0, Shots(100_000, seed=1))
print(f"\n100k shots: trace distance {trace_distance(proj, exact):.2e}")
