"""
Qi-Wu-Zhang two-band model, its exact ground state, an eigenvector-based
geometric-tensor oracle, and a four-band Dirac-matrix model with twofold
degenerate levels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from qgtprobe.linalg import hermitian_eigensolve

GAP_TOL = 1e-12

SIGMA_0 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = {"x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}

# Dirac matrices, {G_a, G_b} = 2 delta_ab. G5 = -(sigma_z x 1) puts the basis
# vectors e1, e2 in its -1 eigenspace.
GAMMA = (
    np.kron(SIGMA_X, SIGMA_X),
    np.kron(SIGMA_X, SIGMA_Y),
    np.kron(SIGMA_X, SIGMA_Z),
    np.kron(SIGMA_Y, SIGMA_0),
    -np.kron(SIGMA_Z, SIGMA_0),
)


class GaplessError(ValueError):
    """Raised when an operation needs a spectral gap and the point has none."""


@dataclass(frozen=True)
class ModelPoint:
    kx: float
    ky: float
    m: float

    def shifted(self, dkx: float = 0.0, dky: float = 0.0) -> "ModelPoint":
        return ModelPoint(self.kx + dkx, self.ky + dky, self.m)


@dataclass(frozen=True)
class BlochVector:
    dx: float
    dy: float
    dz: float

    def as_array(self) -> np.ndarray:
        return np.array([self.dx, self.dy, self.dz])

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.as_array()))

    @property
    def gapless(self) -> bool:
        return self.norm <= GAP_TOL


def bloch_vector(p: ModelPoint) -> BlochVector:
    return BlochVector(
        float(np.sin(p.kx)), float(np.sin(p.ky)), float(p.m - np.cos(p.kx) - np.cos(p.ky))
    )


def build_hamiltonian(d: BlochVector) -> np.ndarray:
    return d.dx * SIGMA_X + d.dy * SIGMA_Y + d.dz * SIGMA_Z


def ground_state(p: ModelPoint) -> np.ndarray:
    """Lower eigenvector of the QWZ Hamiltonian, largest component real-positive."""
    d = bloch_vector(p)
    if d.gapless:
        raise GaplessError(f"gapless point {p} (|d| = {d.norm:.3e})")
    _, vecs = hermitian_eigensolve(build_hamiltonian(d))
    return vecs[:, 0]


def exact_ground_projector(p: ModelPoint) -> np.ndarray:
    psi = ground_state(p)
    return np.outer(psi, psi.conj())


def _qgt_from_derivatives(psi, dpsi_x, dpsi_y, pe=None) -> tuple[float, float, float, float]:
    if pe is None:
        pe = np.eye(len(psi)) - np.outer(psi, psi.conj())

    def q(a, b):
        return np.vdot(a, pe @ b)

    qxy, qyx = q(dpsi_x, dpsi_y), q(dpsi_y, dpsi_x)
    g_xx = q(dpsi_x, dpsi_x).real
    g_yy = q(dpsi_y, dpsi_y).real
    g_xy = 0.5 * (qxy + qyx).real
    f_xy = (1j * (qxy - qyx)).real
    return float(g_xx), float(g_xy), float(g_yy), float(f_xy)


def oracle_qgt(p: ModelPoint, delta: float, scheme: str = "forward"):
    """Geometric tensor from finite differences of gauge-fixed eigenvectors.

    Parameters
    ----------
    p : ModelPoint
    delta : float
        Finite-difference step in both momenta.
    scheme : {"forward", "central"}

    Returns
    -------
    QGTPoint
    """
    from qgtprobe.qgt import QGTPoint

    psi = ground_state(p)
    if scheme == "forward":
        dx = (ground_state(p.shifted(dkx=delta)) - psi) / delta
        dy = (ground_state(p.shifted(dky=delta)) - psi) / delta
    elif scheme == "central":
        dx = (ground_state(p.shifted(dkx=delta)) - ground_state(p.shifted(dkx=-delta))) / (2 * delta)
        dy = (ground_state(p.shifted(dky=delta)) - ground_state(p.shifted(dky=-delta))) / (2 * delta)
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    return QGTPoint(*_qgt_from_derivatives(psi, dx, dy))


def richardson_oracle_qgt(p: ModelPoint, h1: float = 1e-3, h2: float = 5e-4):
    """Second independent oracle: Richardson-extrapolated central differences."""
    from qgtprobe.qgt import QGTPoint

    a = np.array(oracle_qgt(p, h1, "central").as_tuple())
    b = np.array(oracle_qgt(p, h2, "central").as_tuple())
    ratio = (h1 / h2) ** 2
    return QGTPoint(*((ratio * b - a) / (ratio - 1)))


def analytic_qgt(p: ModelPoint):
    """Closed-form metric and curvature of the lower band of d.sigma.

    Uses g_mn = (d_m n . d_n n)/4 and F_xy = (1/2) n . (d_x n x d_y n) for
    the unit Bloch vector n; the sign matches ``oracle_qgt``.
    """
    from qgtprobe.qgt import QGTPoint

    d = bloch_vector(p).as_array()
    r = np.linalg.norm(d)
    if r <= GAP_TOL:
        raise GaplessError(f"gapless point {p}")
    ddx = np.array([np.cos(p.kx), 0.0, np.sin(p.kx)])
    ddy = np.array([0.0, np.cos(p.ky), np.sin(p.ky)])
    n = d / r
    nx = (ddx - n * (n @ ddx)) / r
    ny = (ddy - n * (n @ ddy)) / r
    return QGTPoint(
        g_xx=float(nx @ nx) / 4,
        g_xy=float(nx @ ny) / 4,
        g_yy=float(ny @ ny) / 4,
        F_xy=float(0.5 * n @ np.cross(nx, ny)),
    )


@dataclass(frozen=True)
class GammaModelPoint:
    kmu: float
    knu: float
    m: float

    @property
    def d5(self) -> np.ndarray:
        return np.array(
            [np.sin(self.kmu), np.sin(self.knu), 0.0, 0.0, self.m - np.cos(self.kmu) - np.cos(self.knu)]
        )

    def shifted(self, dmu: float = 0.0, dnu: float = 0.0) -> "GammaModelPoint":
        return GammaModelPoint(self.kmu + dmu, self.knu + dnu, self.m)


def gamma_hamiltonian(d5) -> np.ndarray:
    d5 = np.asarray(d5, dtype=float)
    if d5.shape != (5,):
        raise ValueError("d5 must have five components")
    if np.linalg.norm(d5) <= GAP_TOL:
        raise GaplessError("gapless Gamma-model point (|d5| = 0)")
    return sum(c * g for c, g in zip(d5, GAMMA))


def gamma_model_hamiltonian(q: GammaModelPoint) -> np.ndarray:
    return gamma_hamiltonian(q.d5)


def stacked_qwz_hamiltonian(p: ModelPoint) -> np.ndarray:
    """Two decoupled copies of the QWZ block, H (+) H, on the 4-dim space."""
    h = build_hamiltonian(bloch_vector(p))
    out = np.zeros((4, 4), dtype=complex)
    out[:2, :2] = h
    out[2:, 2:] = h
    return out

