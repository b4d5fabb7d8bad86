import numpy as np
import pytest

from qgtprobe.ite import overlap_with_up
from qgtprobe.model import bloch_vector
from qgtprobe.sweep import RunConfig
from qgtprobe.validation import (
    MIN_GAP,
    SuiteResult,
    ValidationReport,
    convergence_slope,
    convergence_suite,
    embedding_suite,
    ite_suite,
    nonabelian_suite,
    projector_oracle_suite,
    random_gamma_points,
    random_gapped_points,
    random_unitary,
    tomography_suite,
    validate,
    vqa_suite,
)

EXACT = RunConfig(method="exact", shots=None)


def test_samplers_respect_constraints():
    rng = np.random.default_rng(0)
    pts = random_gapped_points(50, rng, min_overlap=0.1)
    assert all(bloch_vector(p).norm >= MIN_GAP and overlap_with_up(p) > 0.1 for p in pts)
    assert all(np.linalg.norm(q.d5) >= MIN_GAP for q in random_gamma_points(20, rng))
    u = random_unitary(3, rng)
    assert np.allclose(u.conj().T @ u, np.eye(3))


def test_samplers_seeded():
    a = random_gapped_points(5, np.random.default_rng(1))
    b = random_gapped_points(5, np.random.default_rng(1))
    assert a == b


def test_report_formatting():
    ok = SuiteResult("a", True, 1e-9, 1e-8)
    bad = SuiteResult("b", False, 1.0, 1e-8, "detail", ["p1"])
    rep = ValidationReport([ok, bad])
    text = str(rep)
    assert "[PASS] a" in text and "[FAIL] b" in text and "degraded 1" in text
    assert not rep.passed and ValidationReport([ok]).passed


def test_convergence_slope_in_band():
    res = convergence_suite(EXACT)
    assert res.passed
    slope = float(res.detail.split()[1].rstrip(","))
    assert slope == pytest.approx(1.0, abs=0.2)


def test_convergence_slope_helper():
    pts = random_gapped_points(5, np.random.default_rng(3))
    slope, errs = convergence_slope(pts, (1e-2, 1e-3, 1e-4), 0.05)
    assert errs[0] > errs[1] > errs[2]
    assert slope == pytest.approx(1.0, abs=0.2)


@pytest.mark.parametrize("suite", [embedding_suite, tomography_suite, vqa_suite])
def test_exact_suites_that_pass(suite):
    res = suite(EXACT)
    assert res.passed, res.line()


def test_projector_suite_reports_first_order_gap():
    res = projector_oracle_suite(EXACT)
    # the O(delta) gap between the two forward estimates is ~1e-5 at 1e-4
    assert 1e-7 < res.residual < 1e-4
    assert res.passed == (res.residual < 1e-6)


def test_ite_suite_residual_scale():
    res = ite_suite(EXACT)
    assert res.residual < 1e-3
    assert res.passed == (res.residual < 1e-8)


def test_nonabelian_suite_gauge_part():
    res = nonabelian_suite(EXACT)
    gauge = float(res.detail.split("residual ")[1])
    assert gauge < 1e-8
    assert res.residual < 2e-5


def test_shot_mode_validation_degrades_without_crash():
    rep = validate(RunConfig(method="exact", shots=1000, purify=False))
    names = [s.name for s in rep.suites]
    assert "vqa-projector" in names
    ite = next(s for s in rep.suites if s.name == "ite-vs-exact")
    assert ite.tolerance == pytest.approx(6 / np.sqrt(1000))
    assert all(np.isfinite(s.residual) for s in rep.suites)


def test_validate_runs_all_suites():
    rep = validate(EXACT)
    assert [s.name for s in rep.suites] == [
        "projector-vs-oracle",
        "delta-convergence",
        "ite-vs-exact",
        "vqa-energy",
        "nonabelian-vs-oracle",
        "embedding",
        "tomography-roundtrip",
    ]
