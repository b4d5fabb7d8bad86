"""
Oracle-equivalence suites. Each suite samples seeded random points,
compares a preparation or extraction route against an independent
reference, and reports its largest residual against a tolerance. Suites
never raise on a failed comparison; failures and degraded points are
carried in the report.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from qgtprobe.circuit import NoiseConfig, Shots
from qgtprobe.ite import embed_unitary, ite_operator, overlap_with_up, prepare_ground_projector_ite
from qgtprobe.linalg import dagger, trace_distance
from qgtprobe.model import (
    BlochVector,
    GammaModelPoint,
    ModelPoint,
    analytic_qgt,
    bloch_vector,
    build_hamiltonian,
    exact_ground_projector,
    oracle_qgt,
)
from qgtprobe.nonabelian import DEFAULT_REFERENCES, nonabelian_qgt, oracle_nonabelian_qgt
from qgtprobe.qgt import extract_qgt, projector_derivative
from qgtprobe.sweep import RunConfig
from qgtprobe.tomography import PauliExpectations, reconstruct_projector
from qgtprobe.vqa import OptimizationError, OptimizerConfig, optimize_ground, prepare_ground_projector_vqa

M_RANGE = (0.25, 3.75)
MIN_GAP = 0.25
MIN_OVERLAP = 0.1
DEFAULT_DELTAS = (1e-2, 1e-3, 1e-4)

_SUITE_IDS = {"projector": 1, "convergence": 2, "ite": 3, "vqa": 4, "nonabelian": 5, "embedding": 6, "tomography": 7}


def _rng(base_seed: int, suite: str) -> np.random.Generator:
    return np.random.default_rng([base_seed, _SUITE_IDS[suite]])


def random_gapped_points(
    count: int, rng: np.random.Generator, min_gap: float = MIN_GAP, min_overlap: float | None = None
) -> list[ModelPoint]:
    """Uniform k on the torus, m uniform in M_RANGE, rejecting |d| < min_gap.

    With ``min_overlap`` set, points whose ground state has
    |<0|psi_g>| <= min_overlap are rejected as well.
    """
    out = []
    while len(out) < count:
        kx, ky = rng.uniform(0, 2 * np.pi, 2)
        p = ModelPoint(float(kx), float(ky), float(rng.uniform(*M_RANGE)))
        if bloch_vector(p).norm < min_gap:
            continue
        if min_overlap is not None and overlap_with_up(p) <= min_overlap:
            continue
        out.append(p)
    return out


def random_gamma_points(count: int, rng: np.random.Generator, min_gap: float = MIN_GAP) -> list[GammaModelPoint]:
    out = []
    while len(out) < count:
        kmu, knu = rng.uniform(0, 2 * np.pi, 2)
        q = GammaModelPoint(float(kmu), float(knu), float(rng.uniform(*M_RANGE)))
        if np.linalg.norm(q.d5) >= min_gap:
            out.append(q)
    return out


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


@dataclass
class SuiteResult:
    name: str
    passed: bool
    residual: float
    tolerance: float
    detail: str = ""
    degraded: list[str] = field(default_factory=list)

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        s = f"[{tag}] {self.name:<22} residual {self.residual:.3e}  tol {self.tolerance:.1e}"
        if self.detail:
            s += f"  {self.detail}"
        if self.degraded:
            s += f"  degraded {len(self.degraded)}"
        return s


@dataclass
class ValidationReport:
    suites: list[SuiteResult]

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.suites)

    def __str__(self) -> str:
        lines = [s.line() for s in self.suites]
        lines.append("all suites passed" if self.passed else "validation FAILED")
        return "\n".join(lines)


def _shot_mode(cfg: RunConfig, seed: int) -> Shots | None:
    if cfg.exact:
        return None
    return Shots(cfg.shots, seed, NoiseConfig(cfg.depolarizing_p, cfg.readout_q), cfg.mitigate)


def _shot_tolerance(cfg: RunConfig, exact_tol: float) -> float:
    # six standard errors of a single Pauli estimate
    return exact_tol if cfg.exact else 6.0 / np.sqrt(cfg.shots)


def _exact_extract(p: ModelPoint, delta: float, robust_eps: float):
    pg = exact_ground_projector(p)
    return extract_qgt(
        pg,
        np.eye(2) - pg,
        projector_derivative(pg, exact_ground_projector(p.shifted(dkx=delta)), delta),
        projector_derivative(pg, exact_ground_projector(p.shifted(dky=delta)), delta),
        robust_eps,
    )


def projector_oracle_suite(cfg: RunConfig, count: int = 25, delta: float = 1e-4, tol: float = 1e-6) -> SuiteResult:
    """Projector-route extraction vs the eigenvector oracle, same forward step."""
    pts = random_gapped_points(count, _rng(cfg.base_seed, "projector"))
    worst, degraded = 0.0, []
    for p in pts:
        got = np.array(_exact_extract(p, delta, cfg.robust_eps).as_tuple())
        ref = np.array(oracle_qgt(p, delta).as_tuple())
        err = float(np.max(np.abs(got - ref)))
        worst = max(worst, err)
        if err >= tol:
            degraded.append(f"{p}: {err:.2e}")
    return SuiteResult("projector-vs-oracle", worst < tol, worst, tol, f"{count} points, delta {delta:g}", degraded)


def convergence_slope(points, deltas, robust_eps: float) -> tuple[float, list[float]]:
    """Log-log slope of the worst extraction error against the closed form."""
    errs = []
    for delta in deltas:
        errs.append(
            max(
                float(np.max(np.abs(np.array(_exact_extract(p, delta, robust_eps).as_tuple())
                                    - np.array(analytic_qgt(p).as_tuple()))))
                for p in points
            )
        )
    slope = float(np.polyfit(np.log(deltas), np.log(errs), 1)[0])
    return slope, errs


def convergence_suite(cfg: RunConfig, deltas=DEFAULT_DELTAS, count: int = 25, tol: float = 0.2) -> SuiteResult:
    pts = random_gapped_points(count, _rng(cfg.base_seed, "convergence"))
    slope, errs = convergence_slope(pts, deltas, cfg.robust_eps)
    detail = "slope {:.3f}, errors {}".format(slope, ", ".join(f"{e:.2e}" for e in errs))
    return SuiteResult("delta-convergence", abs(slope - 1) <= tol, abs(slope - 1), tol, detail)


def ite_suite(cfg: RunConfig, count: int = 20, tol: float = 1e-8) -> SuiteResult:
    """ITE projector vs exact projector at gapped points with usable overlap."""
    rng = _rng(cfg.base_seed, "ite")
    pts = random_gapped_points(count, rng, min_overlap=MIN_OVERLAP)
    seeds = rng.integers(0, 2**63, count)
    tol = _shot_tolerance(cfg, tol)
    worst, degraded = 0.0, []
    for p, s in zip(pts, seeds):
        proj, _ = prepare_ground_projector_ite(p, cfg.tau, _shot_mode(cfg, int(s)), cfg.purify)
        err = trace_distance(proj, exact_ground_projector(p))
        worst = max(worst, err)
        if err >= tol:
            degraded.append(f"{p}: {err:.2e}")
    return SuiteResult("ite-vs-exact", worst < tol, worst, tol, f"{count} points, tau {cfg.tau:g}", degraded)


def vqa_suite(cfg: RunConfig, count: int = 100, tol: float = 1e-6) -> SuiteResult:
    """Exact mode: |E_final + |d|| on random Bloch vectors. Shot mode:
    trace distance of the measured projector to the exact one."""
    rng = _rng(cfg.base_seed, "vqa")
    worst, degraded = 0.0, []
    if cfg.exact:
        for i in range(count):
            d = BlochVector(*rng.normal(size=3))
            try:
                _, e = optimize_ground(d, OptimizerConfig(seed=i))
                err = abs(e + d.norm)
            except OptimizationError as exc:
                err = abs(exc.residual)
            worst = max(worst, err)
            if err >= tol:
                degraded.append(f"{d}: {err:.2e}")
        return SuiteResult("vqa-energy", worst < tol, worst, tol, f"{count} Bloch vectors", degraded)
    tol = _shot_tolerance(cfg, tol)
    pts = random_gapped_points(count // 5, rng)
    for i, p in enumerate(pts):
        proj = prepare_ground_projector_vqa(p, _shot_mode(cfg, i), OptimizerConfig(seed=i), cfg.purify)
        err = trace_distance(proj, exact_ground_projector(p))
        worst = max(worst, err)
        if err >= tol:
            degraded.append(f"{p}: {err:.2e}")
    return SuiteResult("vqa-projector", worst < tol, worst, tol, f"{len(pts)} points, {cfg.shots} shots", degraded)


def _band_traces(qgt) -> np.ndarray:
    return np.array([np.trace(blk) for d in (qgt.g, qgt.F) for blk in d.values()])


def nonabelian_suite(
    cfg: RunConfig, count: int = 10, delta: float = 1e-4, tol: float = 1e-5, gauge_tol: float = 1e-8
) -> SuiteResult:
    """All g and F band blocks vs the eigenvector oracle, plus invariance of
    their band traces when the reference vectors are rotated."""
    rng = _rng(cfg.base_seed, "nonabelian")
    pts = random_gamma_points(count, rng)
    worst, worst_gauge, degraded = 0.0, 0.0, []
    refs = np.column_stack(DEFAULT_REFERENCES)
    for q in pts:
        got = nonabelian_qgt(q, delta, robust_eps=cfg.robust_eps)
        ref = oracle_nonabelian_qgt(q, delta)
        err = max(float(np.max(np.abs(got.g[k] - ref.g[k]))) for k in got.g)
        err = max(err, max(float(np.max(np.abs(got.F[k] - ref.F[k]))) for k in got.F))
        rotated = refs @ random_unitary(2, rng)
        alt = nonabelian_qgt(q, delta, references=(rotated[:, 0], rotated[:, 1]), robust_eps=cfg.robust_eps)
        gauge = float(np.max(np.abs(_band_traces(got) - _band_traces(alt))))
        worst, worst_gauge = max(worst, err), max(worst_gauge, gauge)
        if err >= tol or gauge >= gauge_tol:
            degraded.append(f"{q}: oracle {err:.2e}, gauge {gauge:.2e}")
    ok = worst < tol and worst_gauge < gauge_tol
    return SuiteResult(
        "nonabelian-vs-oracle", ok, worst, tol, f"{count} points, trace gauge residual {worst_gauge:.2e}", degraded
    )


def embedding_suite(cfg: RunConfig, count: int = 100, tol: float = 1e-10) -> SuiteResult:
    rng = _rng(cfg.base_seed, "embedding")
    worst = 0.0
    for _ in range(count):
        p = random_gapped_points(1, rng, min_gap=0.0)[0]
        tau = float(rng.uniform(0.1, 10.0))
        u_tb = ite_operator(build_hamiltonian(bloch_vector(p)), tau)
        emb = embed_unitary(u_tb, tau)
        unit = np.linalg.norm(dagger(emb.U_big) @ emb.U_big - np.eye(4))
        block = np.linalg.norm(emb.block - emb.u * u_tb)
        worst = max(worst, float(unit), float(block))
    return SuiteResult("embedding", worst < tol, worst, tol, f"{count} (k, m, tau)")


def tomography_suite(cfg: RunConfig, count: int = 100, tol: float = 1e-12) -> SuiteResult:
    rng = _rng(cfg.base_seed, "tomography")
    worst = 0.0
    for _ in range(count):
        psi = rng.normal(size=2) + 1j * rng.normal(size=2)
        psi /= np.linalg.norm(psi)
        p = reconstruct_projector(PauliExpectations.of_state(psi), purify=cfg.purify)
        worst = max(worst, float(np.max(np.abs(p - np.outer(psi, psi.conj())))))
    return SuiteResult("tomography-roundtrip", worst < tol, worst, tol, f"{count} pure states")


def validate(cfg: RunConfig | None = None, deltas=DEFAULT_DELTAS) -> ValidationReport:
    """Run every suite under ``cfg`` (exact mode by default)."""
    cfg = cfg or RunConfig(shots=None)
    return ValidationReport(
        [
            projector_oracle_suite(cfg, delta=min(deltas)),
            convergence_suite(cfg, deltas),
            ite_suite(cfg),
            vqa_suite(cfg),
            nonabelian_suite(cfg),
            embedding_suite(cfg),
            tomography_suite(cfg),
        ]
    )
