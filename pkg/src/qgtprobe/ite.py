"""
Imaginary-time evolution through a unitary dilation.

``exp(-tau H)`` is rescaled by ``u`` so its largest singular value is one,
completed to a 4x4 unitary by QR, and run on an ancilla + physical qubit
pair. Keeping only ancilla = 0 applies ``u exp(-tau H)`` to the physical
qubit. The ancilla is qubit 0 (top wire), the physical qubit is qubit 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from qgtprobe.circuit import Circuit, Gate, PostSelectionError, Shots
from qgtprobe.linalg import (
    as_matrix,
    dagger,
    hermitian_eigensolve,
    matrix_exponential_hermitian,
    qr_decompose,
    sqrt_psd,
)
from qgtprobe.model import GaplessError, ModelPoint, bloch_vector, build_hamiltonian
from qgtprobe.tomography import measure_pauli_expectations, reconstruct_projector

DEFAULT_TAU = 8.0
ANCILLA, PHYSICAL = 0, 1
_PLUS_PREP = (np.pi / 2, 0.0, 0.0)  # U3 angles taking |0> to |+>


class OverlapError(ValueError):
    """The chosen initial state has no overlap with the ground state."""


@dataclass(frozen=True)
class EmbeddingResult:
    u: float
    U_big: np.ndarray
    tau: float | None = None
    R: np.ndarray | None = None

    @property
    def block(self) -> np.ndarray:
        """Upper-left (ancilla 0 -> 0) block of ``U_big``."""
        return self.U_big[:2, :2]


def ite_operator(h, tau: float) -> np.ndarray:
    """exp(-tau h) for a Hermitian 2x2 ``h``."""
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    return matrix_exponential_hermitian(h, -tau)


def embed_unitary(u_tb, tau: float | None = None) -> EmbeddingResult:
    """Dilate ``u_tb`` into a 4x4 unitary whose upper-left block is ``u * u_tb``.

    The dilation is M = [[u U, I], [C, I]] with u^-2 the largest eigenvalue
    of U^dagger U and C = sqrt(I - u^2 U^dagger U); Q of its QR factorization
    is returned. Since the first block column of M is already orthonormal,
    the positive-diagonal QR convention leaves it untouched.
    """
    a = as_matrix(u_tb)
    n = a.shape[0]
    gram = dagger(a) @ a
    lam_max = hermitian_eigensolve(0.5 * (gram + dagger(gram)))[0][-1]
    if not lam_max > 0:
        raise np.linalg.LinAlgError("operator is singular")
    u = 1.0 / np.sqrt(lam_max)
    c = sqrt_psd(np.eye(n) - u**2 * gram)
    eye = np.eye(n, dtype=complex)
    m = np.block([[u * a, eye], [c, eye]])
    q, r = qr_decompose(m)
    return EmbeddingResult(float(u), q, tau, r)


def overlap_with_up(p: ModelPoint) -> float:
    """|<0|psi_g>| at ``p``."""
    d = bloch_vector(p).as_array()
    r = np.linalg.norm(d)
    # ground state of d.sigma has <sz> = -dz/|d|
    return float(np.sqrt(max(0.0, (1 - d[2] / r) / 2)))


def prepare_ground_projector_ite(
    p: ModelPoint,
    tau: float = DEFAULT_TAU,
    mode: Shots | None = None,
    purify: bool = True,
    initial: str = "up",
    min_success: float = 1e-4,
):
    """Ground-state projector at ``p`` from post-selected imaginary-time evolution.

    Parameters
    ----------
    initial : {"up", "plus"}
        Physical starting state. "plus" prepends a U3 that rotates |0> into
        |+>, which is the fallback when |0> is orthogonal to the ground state.
    min_success : float
        Smallest acceptable post-selection success fraction.

    Returns
    -------
    projector : ndarray
    success_fraction : float

    Raises
    ------
    OverlapError
        If ``initial="up"`` and the Bloch vector points along +z.
    PostSelectionError
        If the success fraction drops below ``min_success``.
    """
    d = bloch_vector(p)
    if d.gapless:
        raise GaplessError(f"gapless point {p}")
    dv = d.as_array()
    if initial == "up" and np.linalg.norm(dv - np.array([0.0, 0.0, d.norm])) < 1e-6:
        raise OverlapError(
            f"|0> is orthogonal to the ground state at {p}; retry with initial='plus'"
        )
    if initial not in ("up", "plus"):
        raise ValueError(f"initial must be 'up' or 'plus', got {initial!r}")
    emb = embed_unitary(ite_operator(build_hamiltonian(d), tau), tau)
    prep = Circuit(2)
    if initial == "plus":
        prep.append(Gate.u3(PHYSICAL, *_PLUS_PREP))
    prep.append(Gate.twoq(ANCILLA, PHYSICAL, emb.U_big))
    e, frac = measure_pauli_expectations(prep, physical=PHYSICAL, ancilla=ANCILLA, mode=mode)
    if frac < min_success:
        raise PostSelectionError(f"post-selection success {frac:.3e} below {min_success:.1e}")
    return reconstruct_projector(e, purify=purify), frac
