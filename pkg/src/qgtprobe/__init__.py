"""Quantum-geometric-tensor probes on simulated two-band circuits."""

__version__ = "0.1.0"

from qgtprobe.circuit import Circuit, Counts, Gate, NoiseConfig, Shots  # noqa: E402
from qgtprobe.model import ModelPoint, bloch_vector, exact_ground_projector  # noqa: E402
from qgtprobe.qgt import GridSpec, QGTPoint, chern_number, extract_qgt  # noqa: E402
from qgtprobe.sweep import RunConfig, SweepResult  # noqa: E402

__all__ = [
    "Circuit",
    "Counts",
    "Gate",
    "GridSpec",
    "ModelPoint",
    "NoiseConfig",
    "QGTPoint",
    "RunConfig",
    "Shots",
    "SweepResult",
    "bloch_vector",
    "chern_number",
    "exact_ground_projector",
    "extract_qgt",
]
