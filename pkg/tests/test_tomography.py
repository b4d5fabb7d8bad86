import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_state
from qgtprobe.circuit import Circuit, Gate, NoiseConfig, Shots, counts_from_mapping, exact_counts, sample_counts
from qgtprobe.tomography import (
    PauliExpectations,
    basis_rotation_gates,
    bloch_norm,
    expectation_from_counts,
    measure_pauli_expectations,
    readout_mitigation,
    reconstruct_projector,
)

finite = st.floats(-1.5, 1.5)


@pytest.mark.parametrize(
    "hist, value", [({"0": 100000}, 1.0), ({"0": 50000, "1": 50000}, 0.0), ({"0": 75000, "1": 25000}, 0.5)]
)
def test_expectation_from_counts(hist, value):
    assert expectation_from_counts(counts_from_mapping(hist)) == value


def test_expectation_needs_one_bit():
    with pytest.raises(ValueError):
        expectation_from_counts(counts_from_mapping({"00": 1}))


def test_rotation_x_on_plus():
    c = Circuit(1, [Gate.u3(0, np.pi / 2, 0, 0)] + basis_rotation_gates("x"), [0])
    assert expectation_from_counts(exact_counts(c)) == pytest.approx(1.0, abs=1e-12)


def test_rotation_y_on_up():
    c = Circuit(1, basis_rotation_gates("y"), [0])
    assert expectation_from_counts(exact_counts(c)) == pytest.approx(0.0, abs=1e-12)


def test_rotations_match_statevector(rng):
    for _ in range(25):
        psi = random_state(rng)
        ref = PauliExpectations.of_state(psi).as_array()
        for i, pauli in enumerate("xyz"):
            c = Circuit(1, basis_rotation_gates(pauli), [0])
            assert expectation_from_counts(exact_counts(c, psi)) == pytest.approx(ref[i], abs=1e-12)
    with pytest.raises(ValueError):
        basis_rotation_gates("w")


@pytest.mark.parametrize(
    "e, p",
    [
        ((0, 0, 1), [[1, 0], [0, 0]]),
        ((1, 0, 0), [[0.5, 0.5], [0.5, 0.5]]),
        ((0, 1, 0), [[0.5, -0.5j], [0.5j, 0.5]]),
    ],
)
def test_reconstruct_examples(e, p):
    assert np.allclose(reconstruct_projector(PauliExpectations(*e)), p, atol=1e-15)


def test_roundtrip_pure_states(rng):
    for _ in range(100):
        psi = random_state(rng)
        got = reconstruct_projector(PauliExpectations.of_state(psi))
        assert np.max(np.abs(got - np.outer(psi, psi.conj()))) < 1e-12


@given(finite, finite, finite)
def test_reconstruct_hermitian_unit_trace(sx, sy, sz):
    p = reconstruct_projector(PauliExpectations(sx, sy, sz), purify=False)
    assert np.allclose(p, p.conj().T)
    assert np.trace(p).real == pytest.approx(1.0)


@given(finite, finite, finite)
def test_purified_is_projector(sx, sy, sz):
    if np.linalg.norm([sx, sy, sz]) < 1e-6:
        return
    p = reconstruct_projector(PauliExpectations(sx, sy, sz))
    assert np.max(np.abs(p @ p - p)) < 1e-12
    assert bloch_norm(p) == pytest.approx(1.0)


def test_zero_bloch_rejected_when_purifying():
    with pytest.raises(ValueError, match="maximally mixed"):
        reconstruct_projector(PauliExpectations(0, 0, 0))
    assert np.allclose(reconstruct_projector(PauliExpectations(0, 0, 0), purify=False), np.eye(2) / 2)


def test_mitigation_identity_at_q0():
    c = counts_from_mapping({"0": 700, "1": 300})
    assert readout_mitigation(c, 0.0).histogram == {"0": 700.0, "1": 300.0}


def test_mitigation_exact_inverse():
    c = counts_from_mapping({"0": 0.9, "1": 0.1})
    m = readout_mitigation(c, 0.1).probabilities()
    assert m["0"] == pytest.approx(1.0, abs=1e-12)
    assert m["1"] == pytest.approx(0.0, abs=1e-12)


def test_mitigation_two_bits_and_clamping():
    # clamping: raw flip rate below q drives a negative quasi-probability
    c = counts_from_mapping({"00": 98, "11": 2})
    m = readout_mitigation(c, 0.1)
    assert all(v >= 0 for v in m.histogram.values())
    assert m.total == pytest.approx(100)


def test_mitigation_rejects_half():
    with pytest.raises(ValueError):
        readout_mitigation(counts_from_mapping({"0": 1}), 0.5)


def test_mitigation_monte_carlo():
    # <sz> of cos(0.4)|0> + sin(0.4)|1>, q = 0.05, 100 seeds
    psi = np.array([np.cos(0.4), np.sin(0.4)])
    truth = np.cos(0.8)
    better = 0
    for seed in range(100):
        raw = sample_counts(psi, [0], 20000, seed=seed, noise=NoiseConfig(readout_q=0.05))
        e_raw = expectation_from_counts(raw)
        e_mit = expectation_from_counts(readout_mitigation(raw, 0.05))
        better += abs(e_mit - truth) < abs(e_raw - truth)
    assert better >= 95


def test_measure_pauli_expectations_exact_and_shots(rng):
    psi = random_state(rng)
    ref = PauliExpectations.of_state(psi).as_array()
    e, frac = measure_pauli_expectations(Circuit(1), physical=0, initial=psi)
    assert frac == 1.0
    assert np.allclose(e.as_array(), ref, atol=1e-12)
    e, _ = measure_pauli_expectations(Circuit(1), physical=0, mode=Shots(100000, 4), initial=psi)
    assert np.all(np.abs(e.as_array() - ref) < 6 / np.sqrt(100000))


def test_measure_with_mitigation_reduces_bias():
    prep = Circuit(1, [Gate.u3(0, 0.3, 0.0, 0.0)])
    ref = PauliExpectations.of_state([np.cos(0.15), np.sin(0.15)]).sz
    noisy = Shots(100000, 8, NoiseConfig(readout_q=0.1))
    e_raw, _ = measure_pauli_expectations(prep, 0, mode=noisy)
    e_mit, _ = measure_pauli_expectations(prep, 0, mode=Shots(100000, 8, NoiseConfig(readout_q=0.1), True))
    assert abs(e_raw.sz - 0.8 * ref) < 0.01
    assert abs(e_mit.sz - ref) < 0.015
