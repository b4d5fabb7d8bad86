"""
Statevector simulation of small circuits (at most three qubits) with seeded
shot sampling, optional depolarizing and readout noise, and ancilla
post-selection.

Bit order: qubit 0 is the top wire and the leftmost character of every
bitstring; it is also the most significant bit of the statevector index.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from qgtprobe.linalg import is_unitary

MAX_QUBITS = 3
DEFAULT_SHOTS = 100_000

_PAULI_ERRORS = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


class PostSelectionError(RuntimeError):
    """No shots survived post-selection."""


def u3_matrix(theta: float, phi: float, lam: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array(
        [[c, -np.exp(1j * lam) * s], [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c]],
        dtype=complex,
    )


def rx_matrix(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def ry_matrix(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


_CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)


@dataclass(frozen=True)
class Gate:
    """One gate. ``kind`` is one of U3, RX, RY, TWOQ, CNOT.

    For TWOQ the payload ``matrix`` is a 4x4 unitary in the basis
    |q_a q_b>, with ``qubits[0]`` the more significant bit. For CNOT,
    ``qubits = (control, target)``.
    """

    kind: str
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()
    matrix: np.ndarray | None = field(default=None, compare=False, repr=False)

    @staticmethod
    def u3(qubit: int, theta: float, phi: float, lam: float) -> "Gate":
        return Gate("U3", (qubit,), (theta, phi, lam))

    @staticmethod
    def rx(qubit: int, theta: float) -> "Gate":
        return Gate("RX", (qubit,), (theta,))

    @staticmethod
    def ry(qubit: int, theta: float) -> "Gate":
        return Gate("RY", (qubit,), (theta,))

    @staticmethod
    def cnot(control: int, target: int) -> "Gate":
        return Gate("CNOT", (control, target))

    @staticmethod
    def twoq(qa: int, qb: int, matrix) -> "Gate":
        return Gate("TWOQ", (qa, qb), (), np.asarray(matrix, dtype=complex))

    def unitary(self) -> np.ndarray:
        if self.kind == "U3":
            return u3_matrix(*self.params)
        if self.kind == "RX":
            return rx_matrix(*self.params)
        if self.kind == "RY":
            return ry_matrix(*self.params)
        if self.kind == "CNOT":
            return _CNOT
        if self.kind == "TWOQ":
            return self.matrix
        raise ValueError(f"unknown gate kind {self.kind!r}")


@dataclass
class Circuit:
    num_qubits: int
    gates: list[Gate] = field(default_factory=list)
    measure: list[int] = field(default_factory=list)

    def validate(self) -> None:
        if not 1 <= self.num_qubits <= MAX_QUBITS:
            raise ValueError(f"num_qubits must be in [1, {MAX_QUBITS}], got {self.num_qubits}")
        for g in self.gates:
            if any(not 0 <= q < self.num_qubits for q in g.qubits):
                raise ValueError(f"gate {g.kind} targets {g.qubits} outside {self.num_qubits} qubits")
            if len(set(g.qubits)) != len(g.qubits):
                raise ValueError(f"gate {g.kind} repeats a qubit: {g.qubits}")
            want = 1 if g.kind in ("U3", "RX", "RY") else 2
            if len(g.qubits) != want:
                raise ValueError(f"gate {g.kind} needs {want} qubit(s), got {g.qubits}")
            if g.kind in ("U3", "RX", "RY") and not np.all(np.isfinite(g.params)):
                raise ValueError(f"gate {g.kind} has non-finite angles")
            if g.kind == "TWOQ":
                if g.matrix is None or g.matrix.shape != (4, 4) or not is_unitary(g.matrix):
                    raise ValueError("TWOQ payload must be a 4x4 unitary")
        if len(set(self.measure)) != len(self.measure):
            raise ValueError(f"measured qubits must be distinct: {self.measure}")
        if any(not 0 <= q < self.num_qubits for q in self.measure):
            raise ValueError(f"measured qubits {self.measure} outside {self.num_qubits} qubits")

    def append(self, gate: Gate) -> "Circuit":
        self.gates.append(gate)
        return self


@dataclass(frozen=True)
class NoiseConfig:
    """``depolarizing_p``: chance of a uniformly random X/Y/Z error after each
    gate on each qubit it touches. ``readout_q``: independent bit-flip chance
    for every recorded bit."""

    depolarizing_p: float = 0.0
    readout_q: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.depolarizing_p <= 1.0:
            raise ValueError(f"depolarizing_p must be in [0, 1], got {self.depolarizing_p}")
        if not 0.0 <= self.readout_q <= 0.5:
            raise ValueError(f"readout_q must be in [0, 0.5], got {self.readout_q}")

    @property
    def is_noiseless(self) -> bool:
        return self.depolarizing_p == 0.0 and self.readout_q == 0.0


@dataclass(frozen=True)
class Shots:
    """Sampling mode: finite shots drawn with a given seed and noise.

    Passing ``None`` wherever a mode is accepted means exact (infinite-shot)
    evaluation.
    """

    shots: int = DEFAULT_SHOTS
    seed: int = 0
    noise: NoiseConfig = NoiseConfig()
    mitigate: bool = False

    def __post_init__(self):
        if self.shots < 1:
            raise ValueError("shots must be >= 1")


@dataclass
class Counts:
    """Bitstring histogram.

    Values are integers for sampled data; exact and readout-mitigated
    distributions carry floats that still sum to ``shots``.
    """

    histogram: dict[str, float]
    shots: int
    seed: int | None = None

    @property
    def total(self) -> float:
        return float(sum(self.histogram.values()))

    @property
    def num_bits(self) -> int:
        return len(next(iter(self.histogram))) if self.histogram else 0

    def probabilities(self) -> dict[str, float]:
        t = self.total
        return {b: v / t for b, v in self.histogram.items()}

    def get(self, bits: str) -> float:
        return self.histogram.get(bits, 0)


def _apply(state: np.ndarray, u: np.ndarray, qubits: Sequence[int], n: int) -> np.ndarray:
    k = len(qubits)
    psi = np.moveaxis(state.reshape([2] * n), list(qubits), list(range(k)))
    shape = psi.shape
    psi = (u @ psi.reshape(2**k, -1)).reshape(shape)
    return np.moveaxis(psi, list(range(k)), list(qubits)).reshape(-1)


def zero_state(num_qubits: int) -> np.ndarray:
    s = np.zeros(2**num_qubits, dtype=complex)
    s[0] = 1.0
    return s


def _check_initial(c: Circuit, initial) -> np.ndarray:
    if initial is None:
        return zero_state(c.num_qubits)
    psi = np.asarray(initial, dtype=complex).reshape(-1)
    if psi.shape != (2**c.num_qubits,):
        raise ValueError(f"initial state has {psi.size} amplitudes, expected {2**c.num_qubits}")
    if abs(np.linalg.norm(psi) - 1.0) > 1e-10:
        raise ValueError("initial state is not normalized")
    return psi


def run_statevector(c: Circuit, initial=None) -> np.ndarray:
    """Apply the gates of ``c`` in order to ``initial`` (default |0...0>)."""
    c.validate()
    psi = _check_initial(c, initial)
    for g in c.gates:
        psi = _apply(psi, g.unitary(), g.qubits, c.num_qubits)
    return psi


def _run_with_errors(c: Circuit, psi: np.ndarray, errors: np.ndarray) -> np.ndarray:
    # errors[i, q]: 0 = none, 1..3 = X, Y, Z after gate i on qubit q
    for i, g in enumerate(c.gates):
        psi = _apply(psi, g.unitary(), g.qubits, c.num_qubits)
        for q in g.qubits:
            e = errors[i, q]
            if e:
                psi = _apply(psi, _PAULI_ERRORS[e - 1], (q,), c.num_qubits)
    return psi


def born_probabilities(psi: np.ndarray, measure: Sequence[int]) -> np.ndarray:
    """Marginal outcome probabilities over ``measure``, indexed like the bitstrings."""
    n = int(np.log2(psi.size))
    p = np.abs(psi.reshape([2] * n)) ** 2
    others = tuple(q for q in range(n) if q not in measure)
    p = p.sum(axis=others) if others else p
    # remaining axes are in ascending qubit order; reorder to the measure list
    order = sorted(measure)
    p = np.transpose(p, [order.index(q) for q in measure]) if measure else p
    return np.clip(p.reshape(-1), 0.0, None)


def _bitstrings(nbits: int) -> list[str]:
    return [format(i, f"0{nbits}b") for i in range(2**nbits)]


def _flip_bits(outcomes: np.ndarray, nbits: int, q: float, rng: np.random.Generator) -> np.ndarray:
    if q == 0.0 or nbits == 0:
        return outcomes
    flips = rng.random((outcomes.size, nbits)) < q
    mask = np.zeros(outcomes.size, dtype=np.int64)
    for b in range(nbits):
        mask |= flips[:, b].astype(np.int64) << (nbits - 1 - b)
    return outcomes ^ mask


def _histogram(outcomes: np.ndarray, nbits: int) -> dict[str, int]:
    tally = np.bincount(outcomes, minlength=2**nbits)
    return {b: int(v) for b, v in zip(_bitstrings(nbits), tally) if v}


def sample_counts(
    psi,
    measure: Sequence[int],
    shots: int = DEFAULT_SHOTS,
    seed: int = 0,
    noise: NoiseConfig | None = None,
) -> Counts:
    """Draw ``shots`` measurement outcomes of ``measure`` from the state ``psi``.

    Only readout noise applies here; gate noise needs the circuit, see
    :func:`simulate_counts`.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    noise = noise or NoiseConfig()
    psi = np.asarray(psi, dtype=complex)
    rng = np.random.default_rng(seed)
    probs = born_probabilities(psi, list(measure))
    outcomes = rng.choice(probs.size, size=shots, p=probs / probs.sum())
    outcomes = _flip_bits(outcomes, len(measure), noise.readout_q, rng)
    return Counts(_histogram(outcomes, len(measure)), shots, seed)


def simulate_counts(
    c: Circuit,
    shots: int = DEFAULT_SHOTS,
    seed: int = 0,
    noise: NoiseConfig | None = None,
    initial=None,
) -> Counts:
    """Run ``c`` and sample its measured qubits, with optional noise.

    Depolarizing noise follows the trajectory picture: every shot draws its
    own Pauli error pattern, and shots sharing a pattern share one
    statevector simulation.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    c.validate()
    noise = noise or NoiseConfig()
    psi0 = _check_initial(c, initial)
    rng = np.random.default_rng(seed)
    nbits = len(c.measure)
    if noise.depolarizing_p == 0.0 or not c.gates:
        probs = born_probabilities(run_statevector(c, psi0), c.measure)
        outcomes = rng.choice(probs.size, size=shots, p=probs / probs.sum())
    else:
        ng = len(c.gates)
        hit = rng.random((shots, ng, c.num_qubits)) < noise.depolarizing_p
        which = rng.integers(1, 4, size=(shots, ng, c.num_qubits))
        patterns = np.where(hit, which, 0)
        uniq, inverse = np.unique(patterns.reshape(shots, -1), axis=0, return_inverse=True)
        inverse = inverse.reshape(-1)
        outcomes = np.empty(shots, dtype=np.int64)
        for u_idx, pat in enumerate(uniq):
            sel = np.flatnonzero(inverse == u_idx)
            psi = _run_with_errors(c, psi0, pat.reshape(ng, c.num_qubits))
            probs = born_probabilities(psi, c.measure)
            outcomes[sel] = rng.choice(probs.size, size=sel.size, p=probs / probs.sum())
    outcomes = _flip_bits(outcomes, nbits, noise.readout_q, rng)
    return Counts(_histogram(outcomes, nbits), shots, seed)


def exact_counts(c: Circuit, initial=None, shots: int = DEFAULT_SHOTS) -> Counts:
    """Infinite-shot limit of :func:`simulate_counts` expressed as expected counts."""
    probs = born_probabilities(run_statevector(c, initial), c.measure)
    return Counts({b: shots * float(p) for b, p in zip(_bitstrings(len(c.measure)), probs)}, shots)


def post_select(
    counts: Counts, ancilla_position: int = 0, required_value: int = 0
) -> tuple[Counts, float]:
    """Keep shots whose bit at ``ancilla_position`` equals ``required_value``.

    Returns the counts on the remaining bits and the surviving fraction.

    Raises
    ------
    PostSelectionError
        If nothing survives.
    """
    nbits = counts.num_bits
    if not 0 <= ancilla_position < nbits:
        raise ValueError(f"ancilla position {ancilla_position} invalid for {nbits}-bit counts")
    want = str(int(required_value))
    kept: dict[str, float] = {}
    for bits, v in counts.histogram.items():
        if bits[ancilla_position] == want and v > 0:
            rest = bits[:ancilla_position] + bits[ancilla_position + 1 :]
            kept[rest] = kept.get(rest, 0) + v
    n_kept = sum(kept.values())
    if n_kept <= 0:
        raise PostSelectionError("post-selection failed: no shots with the required ancilla value")
    frac = n_kept / counts.total
    shots = int(round(n_kept)) if all(isinstance(v, (int, np.integer)) for v in kept.values()) else n_kept
    return Counts(kept, shots, counts.seed), float(frac)


def counts_from_mapping(histogram: Mapping[str, float], seed: int | None = None) -> Counts:
    h = dict(histogram)
    total = sum(h.values())
    shots = int(total) if float(total).is_integer() else total
    return Counts(h, shots, seed)
