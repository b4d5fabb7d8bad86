"""
Non-Abelian geometric tensor of a twofold-degenerate ground level.

The degenerate basis |psi_1>, |psi_2> is fixed by projecting two reference
vectors onto the ground subspace and orthonormalizing them, which keeps
the basis smooth in k wherever those projections stay non-singular. The
diagonal components come from projector sandwiches in the {1, 2} and
{M, N} bases, with

    |M> = (|1> + |2>)/sqrt 2,    |N> = (|1> + i|2>)/sqrt 2,

and the off-diagonal ones from

    X^{ij} = [2i X^{MM} + 2 X^{NN} - (1+i)(X^{ii} + X^{jj})] / (2i)

for X = g or F.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from qgtprobe.linalg import dagger, hermitian_eigensolve
from qgtprobe.model import GammaModelPoint, gamma_model_hamiltonian
from qgtprobe.qgt import DEFAULT_ROBUST_EPS, recover_scalar

DEFAULT_REFERENCES = (np.eye(4, dtype=complex)[:, 0], np.eye(4, dtype=complex)[:, 1])


class GaugeError(ValueError):
    """Reference vectors do not span the degenerate ground subspace."""


@dataclass(frozen=True)
class DegenerateProjectors:
    P1: np.ndarray
    P2: np.ndarray
    PM: np.ndarray
    PN: np.ndarray
    Pg: np.ndarray
    Pe: np.ndarray
    basis: np.ndarray  # columns psi_1, psi_2


def _outer(v):
    return np.outer(v, v.conj())


def ground_basis(h4, references=DEFAULT_REFERENCES, gap_tol: float = 1e-8, split_tol: float = 1e-8):
    """Reference-gauge orthonormal basis (4x2) of the twofold ground level of ``h4``."""
    vals, vecs = hermitian_eigensolve(h4)
    if vals[2] - vals[1] <= gap_tol:
        raise GaugeError(f"no gap above the ground pair (E2 - E1 = {vals[2] - vals[1]:.2e})")
    if vals[1] - vals[0] > split_tol:
        raise GaugeError(f"ground level is not degenerate (split {vals[1] - vals[0]:.2e})")
    pg = vecs[:, :2] @ dagger(vecs[:, :2])
    out = []
    for ref in references:
        v = pg @ np.asarray(ref, dtype=complex)
        for w in out:
            v = v - np.vdot(w, v) * w
        nv = np.linalg.norm(v)
        if nv < 1e-8:
            raise GaugeError("reference vectors have a singular projection onto the ground subspace")
        out.append(v / nv)
    return np.column_stack(out)


def build_subspace_projectors(h4, references=DEFAULT_REFERENCES) -> DegenerateProjectors:
    basis = ground_basis(h4, references)
    return projectors_from_basis(basis)


def projectors_from_basis(basis: np.ndarray) -> DegenerateProjectors:
    psi1, psi2 = basis[:, 0], basis[:, 1]
    psi_m = (psi1 + psi2) / np.sqrt(2)
    psi_n = (psi1 + 1j * psi2) / np.sqrt(2)
    p1, p2 = _outer(psi1), _outer(psi2)
    pg = p1 + p2
    return DegenerateProjectors(p1, p2, _outer(psi_m), _outer(psi_n), pg, np.eye(len(psi1)) - pg, basis)


def _sandwich_pair(p_a, dp_mu, dp_nu, p_e, robust_eps):
    a = dp_mu @ p_e @ dp_nu
    b = dp_nu @ p_e @ dp_mu
    g, t1 = recover_scalar(p_a @ (0.5 * (a + b)) @ p_a, p_a, robust_eps)
    f, t2 = recover_scalar(p_a @ (1j * (a - b)) @ p_a, p_a, robust_eps)
    return g, f, t1 or t2


@dataclass
class DiagonalComponents:
    g11: complex
    g22: complex
    F11: complex
    F22: complex
    gMM: complex
    gNN: complex
    FMM: complex
    FNN: complex
    flags: tuple[str, ...] = ()


def extract_diagonal_components(
    at_k: DegenerateProjectors,
    at_mu: DegenerateProjectors,
    at_nu: DegenerateProjectors,
    delta: float,
    robust_eps: float = DEFAULT_ROBUST_EPS,
) -> DiagonalComponents:
    """Diagonal-type components for the pair (mu, nu).

    ``at_mu`` and ``at_nu`` hold the projectors at k + delta e_mu and
    k + delta e_nu in the same reference gauge as ``at_k``; for mu = nu
    pass the same object twice. Components 11 and 22 use dPg, components MM
    and NN use dPM and dPN.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    pe = at_k.Pe
    dpg_mu = (at_mu.Pg - at_k.Pg) / delta
    dpg_nu = (at_nu.Pg - at_k.Pg) / delta
    g11, f11, t1 = _sandwich_pair(at_k.P1, dpg_mu, dpg_nu, pe, robust_eps)
    g22, f22, t2 = _sandwich_pair(at_k.P2, dpg_mu, dpg_nu, pe, robust_eps)
    gmm, fmm, t3 = _sandwich_pair(
        at_k.PM, (at_mu.PM - at_k.PM) / delta, (at_nu.PM - at_k.PM) / delta, pe, robust_eps
    )
    gnn, fnn, t4 = _sandwich_pair(
        at_k.PN, (at_mu.PN - at_k.PN) / delta, (at_nu.PN - at_k.PN) / delta, pe, robust_eps
    )
    flags = ("trace_fallback",) if (t1 or t2 or t3 or t4) else ()
    return DiagonalComponents(g11, g22, f11, f22, gmm, gnn, fmm, fnn, flags)


def _offdiag(mm, nn, ii, jj):
    return (2j * mm + 2 * nn - (1 + 1j) * (ii + jj)) / 2j


def extract_offdiagonal_components(diag: DiagonalComponents, check_tol: float | None = None):
    """Return ``(g12, g21, F12, F21)``.

    The 21 components use the same formula with bands 1 and 2 swapped. The
    swap leaves |M> alone and sends |N> to (|2> + i|1>)/sqrt 2, whose
    sandwich value is X^{11} + X^{22} - X^{NN}. Hermiticity of the band
    blocks, X^{21} = conj(X^{12}), is checked (not imposed) when
    ``check_tol`` is given.
    """
    g12 = _offdiag(diag.gMM, diag.gNN, diag.g11, diag.g22)
    f12 = _offdiag(diag.FMM, diag.FNN, diag.F11, diag.F22)
    g21 = _offdiag(diag.gMM, diag.g11 + diag.g22 - diag.gNN, diag.g22, diag.g11)
    f21 = _offdiag(diag.FMM, diag.F11 + diag.F22 - diag.FNN, diag.F22, diag.F11)
    if check_tol is not None:
        if abs(g12 - np.conj(g21)) > check_tol or abs(f12 - np.conj(f21)) > check_tol:
            raise ValueError(
                f"band-block Hermiticity violated: |g12 - g21*| = {abs(g12 - np.conj(g21)):.2e}, "
                f"|F12 - F21*| = {abs(f12 - np.conj(f21)):.2e}"
            )
    return g12, g21, f12, f21


@dataclass
class NonAbelianQGT:
    """Band-space blocks keyed by direction pair, e.g. ``g[("mu", "nu")]``."""

    g: dict[tuple[str, str], np.ndarray]
    F: dict[tuple[str, str], np.ndarray]
    flags: tuple[str, ...] = ()

    def Q(self, a: str, b: str) -> np.ndarray:
        return self.g[(a, b)] - 0.5j * self.F[(a, b)]

    def full_Q(self) -> np.ndarray:
        """The 4x4 tensor [[Q_mumu, Q_munu], [Q_numu, Q_nunu]]."""
        return np.block([[self.Q("mu", "mu"), self.Q("mu", "nu")], [self.Q("nu", "mu"), self.Q("nu", "nu")]])


_PAIRS = (("mu", "mu"), ("mu", "nu"), ("nu", "mu"), ("nu", "nu"))


def _block(ii, jj, ij, ji):
    return np.array([[ii, ij], [ji, jj]], dtype=complex)


def nonabelian_qgt(
    q: GammaModelPoint,
    delta: float,
    references=DEFAULT_REFERENCES,
    robust_eps: float = DEFAULT_ROBUST_EPS,
    hamiltonian=gamma_model_hamiltonian,
) -> NonAbelianQGT:
    """All metric and curvature components at ``q`` from exact projectors."""
    fields = {
        "k": build_subspace_projectors(hamiltonian(q), references),
        "mu": build_subspace_projectors(hamiltonian(q.shifted(dmu=delta)), references),
        "nu": build_subspace_projectors(hamiltonian(q.shifted(dnu=delta)), references),
    }
    g, f, flags = {}, {}, set()
    for a, b in _PAIRS:
        diag = extract_diagonal_components(fields["k"], fields[a], fields[b], delta, robust_eps)
        g12, g21, f12, f21 = extract_offdiagonal_components(diag)
        g[(a, b)] = _block(diag.g11, diag.g22, g12, g21)
        f[(a, b)] = _block(diag.F11, diag.F22, f12, f21)
        flags.update(diag.flags)
    return NonAbelianQGT(g, f, tuple(sorted(flags)))


def oracle_nonabelian_qgt(
    q: GammaModelPoint,
    delta: float,
    references=DEFAULT_REFERENCES,
    hamiltonian=gamma_model_hamiltonian,
) -> NonAbelianQGT:
    """Q^{ij}_{ab} = <d_a psi_i|(1 - Pg)|d_b psi_j> from forward differences of the basis."""
    basis = ground_basis(hamiltonian(q), references)
    d = {
        "mu": (ground_basis(hamiltonian(q.shifted(dmu=delta)), references) - basis) / delta,
        "nu": (ground_basis(hamiltonian(q.shifted(dnu=delta)), references) - basis) / delta,
    }
    pe = np.eye(basis.shape[0]) - basis @ dagger(basis)
    qblk = {(a, b): dagger(d[a]) @ pe @ d[b] for a, b in _PAIRS}
    g = {(a, b): 0.5 * (qblk[(a, b)] + qblk[(b, a)]) for a, b in _PAIRS}
    f = {(a, b): 1j * (qblk[(a, b)] - qblk[(b, a)]) for a, b in _PAIRS}
    return NonAbelianQGT(g, f)
