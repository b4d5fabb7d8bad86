"""
Single-qubit Pauli tomography: expectations from counts, basis rotations
before measurement, projector reconstruction and readout-error mitigation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from qgtprobe.circuit import Circuit, Counts, Gate, exact_counts, post_select, simulate_counts


@dataclass(frozen=True)
class PauliExpectations:
    sx: float
    sy: float
    sz: float

    def as_array(self) -> np.ndarray:
        return np.array([self.sx, self.sy, self.sz])

    @classmethod
    def of_state(cls, psi) -> "PauliExpectations":
        psi = np.asarray(psi, dtype=complex)
        a, b = psi[0], psi[1]
        return cls(
            sx=float(2 * (np.conj(a) * b).real),
            sy=float(2 * (np.conj(a) * b).imag),
            sz=float(abs(a) ** 2 - abs(b) ** 2),
        )


def expectation_from_counts(counts: Counts) -> float:
    """<sigma_z> of a single measured bit: (n_0 - n_1) / shots."""
    if counts.num_bits != 1:
        raise ValueError(f"expected single-bit counts, got {counts.num_bits} bits")
    total = counts.total
    if total <= 0:
        raise ValueError("counts are empty")
    return (counts.get("0") - counts.get("1")) / total


def basis_rotation_gates(pauli: str, qubit: int = 0) -> list[Gate]:
    """Gates that map a ``pauli`` measurement onto a computational-basis one."""
    if pauli == "x":
        return [Gate.ry(qubit, -np.pi / 2)]
    if pauli == "y":
        return [Gate.rx(qubit, np.pi / 2)]
    if pauli == "z":
        return []
    raise ValueError(f"pauli must be one of x, y, z, got {pauli!r}")


def reconstruct_projector(e: PauliExpectations, purify: bool = True) -> np.ndarray:
    """Assemble [[alpha, beta], [gamma, delta]] from Pauli expectations.

    With ``purify`` the Bloch vector is rescaled to unit length first, so the
    result is an exact rank-1 projector.
    """
    s = e.as_array().astype(float)
    if purify:
        r = np.linalg.norm(s)
        if r == 0.0:
            raise ValueError("zero Bloch vector: maximally mixed state has no unique projector")
        s = s / r
    sx, sy, sz = s
    return np.array(
        [[(1 + sz) / 2, (sx - 1j * sy) / 2], [(sx + 1j * sy) / 2, (1 - sz) / 2]], dtype=complex
    )


def bloch_norm(p: np.ndarray) -> float:
    """Length of the Bloch vector of a 2x2 density matrix; 1 for pure states."""
    return float(np.sqrt(max(2 * np.trace(p @ p).real - 1, 0.0)))


def readout_mitigation(counts: Counts, q: float) -> Counts:
    """Undo symmetric per-bit readout flips of probability ``q``.

    The inverse confusion matrix is applied to the outcome distribution,
    negative quasi-probabilities are clamped to zero and the result is
    rescaled to the original shot total. Values come back as floats.
    """
    if not 0.0 <= q < 0.5:
        raise ValueError(f"readout flip probability must be in [0, 0.5), got {q}")
    nbits = counts.num_bits
    total = counts.total
    p = np.zeros(2**nbits)
    for bits, v in counts.histogram.items():
        p[int(bits, 2)] += v / total
    if q > 0.0:
        inv = np.linalg.inv(np.array([[1 - q, q], [q, 1 - q]]))
        t = p.reshape([2] * nbits)
        for ax in range(nbits):
            t = np.moveaxis(np.tensordot(inv, t, axes=([1], [ax])), 0, ax)
        p = np.clip(t.reshape(-1), 0.0, None)
        p = p / p.sum()
    hist = {format(i, f"0{nbits}b"): float(total * v) for i, v in enumerate(p)}
    return Counts(hist, counts.shots, counts.seed)


def _pauli_seeds(seed: int) -> dict[str, int]:
    children = np.random.SeedSequence(seed).spawn(3)
    return {p: int(s.generate_state(1, np.uint64)[0]) for p, s in zip("xyz", children)}


def measure_pauli_expectations(prep, physical: int, ancilla: int | None = None, mode=None, initial=None):
    """Run the three Pauli measurement circuits that follow ``prep``.

    Each circuit copies the gates of ``prep``, appends the basis rotation on
    ``physical`` and measures ``ancilla`` (if any) then ``physical``. With an
    ancilla, shots are post-selected on ancilla = 0.

    Parameters
    ----------
    prep : Circuit
        State-preparation circuit; its ``measure`` list is ignored.
    mode : Shots or None
        ``None`` evaluates the exact outcome distributions.

    Returns
    -------
    expectations : PauliExpectations
    success_fraction : float
        Mean post-selection success over the three circuits (1.0 without an
        ancilla).
    """
    seeds = _pauli_seeds(mode.seed) if mode is not None else {}
    values, fractions = {}, []
    for pauli in "xyz":
        c = Circuit(prep.num_qubits, list(prep.gates) + basis_rotation_gates(pauli, physical))
        c.measure = [physical] if ancilla is None else [ancilla, physical]
        if mode is None:
            counts = exact_counts(c, initial)
        else:
            counts = simulate_counts(c, mode.shots, seeds[pauli], mode.noise, initial)
            if mode.mitigate and mode.noise.readout_q > 0:
                counts = readout_mitigation(counts, mode.noise.readout_q)
        if ancilla is not None:
            counts, frac = post_select(counts, 0, 0)
            fractions.append(frac)
        values[pauli] = expectation_from_counts(counts)
    frac = float(np.mean(fractions)) if fractions else 1.0
    return PauliExpectations(values["x"], values["y"], values["z"]), frac
