import numpy as np
import pytest

from qgtprobe.model import (
    GAMMA,
    GammaModelPoint,
    ModelPoint,
    exact_ground_projector,
    gamma_hamiltonian,
    gamma_model_hamiltonian,
    stacked_qwz_hamiltonian,
)
from qgtprobe.nonabelian import (
    DiagonalComponents,
    GaugeError,
    build_subspace_projectors,
    extract_diagonal_components,
    extract_offdiagonal_components,
    ground_basis,
    nonabelian_qgt,
    oracle_nonabelian_qgt,
    projectors_from_basis,
)
from qgtprobe.qgt import extract_qgt, projector_derivative
from qgtprobe.validation import random_unitary

Q_MID = GammaModelPoint(np.pi / 3, np.pi / 4, 1.0)
E = np.eye(4, dtype=complex)


def is_proj(p, tol=1e-10):
    return np.max(np.abs(p @ p - p)) < tol and np.max(np.abs(p - p.conj().T)) < tol


def max_block_gap(a, b):
    return max(
        max(float(np.max(np.abs(a.g[k] - b.g[k]))) for k in a.g),
        max(float(np.max(np.abs(a.F[k] - b.F[k]))) for k in a.F),
    )


def test_gamma5_subspace():
    dp = build_subspace_projectors(GAMMA[4])
    assert np.trace(dp.Pg).real == pytest.approx(2)
    assert np.allclose(dp.Pg, np.diag([1, 1, 0, 0]))
    assert np.allclose(dp.basis, E[:, :2])


def test_pm_from_unit_basis():
    dp = projectors_from_basis(E[:, :2])
    expect = np.zeros((4, 4))
    expect[:2, :2] = 0.5
    assert np.allclose(dp.PM, expect)


def test_projector_invariants_at_diag_point():
    dp = build_subspace_projectors(gamma_model_hamiltonian(GammaModelPoint(np.pi / 2, np.pi / 2, 1.0)))
    for p in (dp.P1, dp.P2, dp.PM, dp.PN, dp.Pg, dp.Pe):
        assert is_proj(p)
    assert np.max(np.abs(dp.P1 + dp.P2 - dp.Pg)) < 1e-10
    assert np.trace(dp.Pg).real == pytest.approx(2, abs=1e-10)
    assert np.max(np.abs(dp.Pg @ dp.Pe)) < 1e-10
    for p in (dp.PM, dp.PN):
        assert np.linalg.matrix_rank(p, tol=1e-8) == 1
        assert np.max(np.abs(dp.Pg @ p @ dp.Pg - p)) < 1e-10


def test_pg_independent_of_references():
    rng = np.random.default_rng(4)
    h = gamma_model_hamiltonian(Q_MID)
    a = build_subspace_projectors(h).Pg
    refs = rng.normal(size=(4, 2)) + 1j * rng.normal(size=(4, 2))
    b = build_subspace_projectors(h, (refs[:, 0], refs[:, 1])).Pg
    assert np.max(np.abs(a - b)) < 1e-10


def test_gauge_errors():
    with pytest.raises(GaugeError, match="singular"):
        build_subspace_projectors(GAMMA[4], (E[:, 2], E[:, 3]))
    with pytest.raises(GaugeError, match="not degenerate"):
        ground_basis(np.diag([0.0, 1.0, 2.0, 3.0]))
    with pytest.raises(GaugeError, match="no gap"):
        ground_basis(np.diag([0.0, 0.0, 0.0, 3.0]))


def test_same_direction_curvature_zero():
    res = nonabelian_qgt(Q_MID, 1e-4)
    for a in ("mu", "nu"):
        assert res.F[(a, a)][0, 0] == pytest.approx(0, abs=1e-15)
        assert res.F[(a, a)][1, 1] == pytest.approx(0, abs=1e-15)


def test_constant_field_gives_zero():
    dp = build_subspace_projectors(gamma_model_hamiltonian(Q_MID))
    diag = extract_diagonal_components(dp, dp, dp, 1e-3)
    for v in (diag.g11, diag.g22, diag.F11, diag.F22, diag.gMM, diag.gNN, diag.FMM, diag.FNN):
        assert v == 0
    with pytest.raises(ValueError):
        extract_diagonal_components(dp, dp, dp, 0.0)


def test_offdiag_cancellation():
    diag = DiagonalComponents(0.3, 0.5, 0, 0, 0.4, 0.4, 0, 0)
    g12, g21, f12, f21 = extract_offdiagonal_components(diag)
    assert g12 == pytest.approx(0) and g21 == pytest.approx(0)


def test_offdiag_hermiticity_check():
    dp = {
        "k": build_subspace_projectors(gamma_model_hamiltonian(Q_MID)),
        "mu": build_subspace_projectors(gamma_model_hamiltonian(Q_MID.shifted(dmu=1e-4))),
        "nu": build_subspace_projectors(gamma_model_hamiltonian(Q_MID.shifted(dnu=1e-4))),
    }
    diag = extract_diagonal_components(dp["k"], dp["mu"], dp["mu"], 1e-4)
    g12, g21, _, _ = extract_offdiagonal_components(diag, check_tol=1e-6)
    assert abs(g12 - np.conj(g21)) < 1e-6
    bogus = DiagonalComponents(0.3, 0.5, 0, 0, 0.4, 0.1 + 0.2j, 0, 0)
    with pytest.raises(ValueError, match="Hermiticity"):
        extract_offdiagonal_components(bogus, check_tol=1e-6)


def test_full_q_matches_oracle_at_mid_point():
    got = nonabelian_qgt(Q_MID, 1e-4)
    ref = oracle_nonabelian_qgt(Q_MID, 1e-4)
    assert np.max(np.abs(got.full_Q() - ref.full_Q())) < 1e-5
    assert max_block_gap(got, ref) < 1e-5


@pytest.mark.xfail(strict=True, reason="diagonal components differ from the forward oracle at O(delta): 9.6e-6")
def test_diagonal_components_within_1e6():
    got = nonabelian_qgt(Q_MID, 1e-4)
    ref = oracle_nonabelian_qgt(Q_MID, 1e-4)
    gap = max(abs(got.g[k][i, i] - ref.g[k][i, i]) for k in got.g for i in (0, 1))
    gap = max(gap, max(abs(got.F[k][i, i] - ref.F[k][i, i]) for k in got.F for i in (0, 1)))
    assert gap < 1e-6


def test_oracle_gap_is_first_order():
    gaps = [max_block_gap(nonabelian_qgt(Q_MID, d), oracle_nonabelian_qgt(Q_MID, d)) for d in (1e-3, 1e-4, 1e-5)]
    slope = np.polyfit(np.log([1e-3, 1e-4, 1e-5]), np.log(gaps), 1)[0]
    assert slope == pytest.approx(1.0, abs=0.2)


def test_metric_blocks_hermitian():
    res = nonabelian_qgt(Q_MID, 1e-4)
    for a in ("mu", "nu"):
        g = res.g[(a, a)]
        assert np.max(np.abs(g - g.conj().T)) < 1e-6


def test_oracle_covariance_under_constant_rotation():
    rng = np.random.default_rng(17)
    w = random_unitary(2, rng)
    refs = E[:, :2] @ w
    a = oracle_nonabelian_qgt(Q_MID, 1e-4)
    b = oracle_nonabelian_qgt(Q_MID, 1e-4, references=(refs[:, 0], refs[:, 1]))
    # Gram-Schmidt after projection makes the basis change k-dependent, so
    # only the band traces are compared
    for k in a.g:
        assert np.trace(b.g[k]) == pytest.approx(np.trace(a.g[k]), abs=1e-8)
        assert np.trace(b.F[k]) == pytest.approx(np.trace(a.F[k]), abs=1e-8)


def test_trace_gauge_invariance():
    rng = np.random.default_rng(2)
    for _ in range(5):
        w = random_unitary(2, rng)
        refs = E[:, :2] @ w
        a = nonabelian_qgt(Q_MID, 1e-4)
        b = nonabelian_qgt(Q_MID, 1e-4, references=(refs[:, 0], refs[:, 1]))
        for k in a.g:
            assert abs(np.trace(a.g[k]) - np.trace(b.g[k])) < 1e-8
            assert abs(np.trace(a.F[k]) - np.trace(b.F[k])) < 1e-8


def _stacked(q):
    return stacked_qwz_hamiltonian(ModelPoint(q.kmu, q.knu, q.m))


def _abelian_inputs(delta):
    p = ModelPoint(Q_MID.kmu, Q_MID.knu, Q_MID.m)
    pg = exact_ground_projector(p)
    dx = projector_derivative(pg, exact_ground_projector(p.shifted(dkx=delta)), delta)
    dy = projector_derivative(pg, exact_ground_projector(p.shifted(dky=delta)), delta)
    return pg, np.eye(2) - pg, dx, dy


def test_abelian_reduction_trace_identity():
    # H (+) H with references e1, e3: each copy's diagonal entries equal the
    # Abelian sandwich <psi|dP Pe dP|psi> of the same projectors
    delta = 1e-4
    res = nonabelian_qgt(Q_MID, delta, references=(E[:, 0], E[:, 2]), hamiltonian=_stacked)
    pg, pe, dx, dy = _abelian_inputs(delta)

    def tr(a, b):
        return np.trace(pg @ a @ pe @ b)

    g_xy = 0.5 * (tr(dx, dy) + tr(dy, dx))
    f_xy = 1j * (tr(dx, dy) - tr(dy, dx))
    for i in (0, 1):
        assert res.g[("mu", "mu")][i, i] == pytest.approx(tr(dx, dx), abs=1e-8)
        assert res.g[("mu", "nu")][i, i] == pytest.approx(g_xy, abs=1e-8)
        assert res.F[("mu", "nu")][i, i] == pytest.approx(f_xy, abs=1e-8)


def test_abelian_reduction_vs_element_average_first_order():
    res = nonabelian_qgt(Q_MID, 1e-4, references=(E[:, 0], E[:, 2]), hamiltonian=_stacked)
    ab = extract_qgt(*_abelian_inputs(1e-4))
    assert res.F[("mu", "nu")][0, 0] == pytest.approx(ab.F_xy, abs=1e-5)


@pytest.mark.xfail(strict=True, reason="element average and sandwich differ at O(delta): 2.5e-6 at delta 1e-4")
def test_abelian_reduction_vs_element_average_within_1e8():
    res = nonabelian_qgt(Q_MID, 1e-4, references=(E[:, 0], E[:, 2]), hamiltonian=_stacked)
    ab = extract_qgt(*_abelian_inputs(1e-4))
    assert abs(res.g[("mu", "mu")][0, 0] - ab.g_xx) < 1e-8
    assert abs(res.g[("mu", "nu")][0, 0] - ab.g_xy) < 1e-8
    assert abs(res.F[("mu", "nu")][0, 0] - ab.F_xy) < 1e-8


def test_input_validation():
    with pytest.raises(ValueError):
        gamma_hamiltonian([0, 0, 0, 0])
