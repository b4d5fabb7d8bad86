"""
Variational ground state with a single U3 gate
==============================================
"""

import numpy as np

from qgtprobe.circuit import Shots
from qgtprobe.linalg import trace_distance
from qgtprobe.model import ModelPoint, bloch_vector, exact_ground_projector
from qgtprobe.vqa import OptimizerConfig, optimize_ground, prepare_ground_projector_vqa

p = ModelPoint(0.7, -1.1, 1.25)
d = bloch_vector(p)

params, energy = optimize_ground(d, OptimizerConfig(seed=0))
print(params)
print(f"energy {energy:.10f}   exact {-d.norm:.10f}")

exact = exact_ground_projector(p)
for shots in (1_000, 10_000, 100_000):
    proj = prepare_ground_projector_vqa(p, Shots(shots, seed=3), OptimizerConfig(seed=3))
    print(f"{shots:>7} shots: trace distance {trace_distance(proj, exact):.4f}")
