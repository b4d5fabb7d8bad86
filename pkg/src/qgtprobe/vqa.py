"""
Variational ground-state preparation with a single U3 layer.

The ansatz acts on |0> (spin up), so the prepared state is
(cos(theta/2), e^{i phi} sin(theta/2)) up to a global phase and ``lam`` is a
flat direction of the energy landscape.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from qgtprobe.circuit import Circuit, Gate, Shots, u3_matrix
from qgtprobe.model import BlochVector, GaplessError, ModelPoint, bloch_vector
from qgtprobe.tomography import measure_pauli_expectations, reconstruct_projector


@dataclass(frozen=True)
class PQCParams:
    theta: float
    phi: float
    lam: float = 0.0

    def state(self) -> np.ndarray:
        return u3_matrix(self.theta, self.phi, self.lam)[:, 0]

    def circuit(self) -> Circuit:
        return Circuit(1, [Gate.u3(0, self.theta, self.phi, self.lam)])


@dataclass(frozen=True)
class OptimizerConfig:
    method: str = "simplex"  # or "parameter-shift"
    max_iters: int = 2000
    tol: float = 1e-8
    restarts: int = 4
    seed: int = 0
    learning_rate: float = 0.4
    refine_with_shots: bool = False

    def __post_init__(self):
        if self.method not in ("simplex", "parameter-shift"):
            raise ValueError(f"unknown optimizer method {self.method!r}")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")


class OptimizationError(RuntimeError):
    def __init__(self, message: str, best: PQCParams, residual: float):
        super().__init__(message)
        self.best = best
        self.residual = residual


def _exact_energy(theta: float, phi: float, d: np.ndarray) -> float:
    return float(d[2] * np.cos(theta) + np.sin(theta) * (d[0] * np.cos(phi) + d[1] * np.sin(phi)))


def energy_expectation(params: PQCParams, d: BlochVector, mode: Shots | None = None) -> float:
    """<H> = d_x<sx> + d_y<sy> + d_z<sz> on U3(theta, phi, lam)|0>."""
    dv = d.as_array()
    if mode is None:
        return _exact_energy(params.theta, params.phi, dv)
    e, _ = measure_pauli_expectations(params.circuit(), physical=0, mode=mode)
    return float(dv @ e.as_array())


def _parameter_shift_descent(x0, d, cfg: OptimizerConfig):
    x = np.array(x0, dtype=float)
    f = lambda v: _exact_energy(v[0], v[1], d)
    shift = np.pi / 2
    for _ in range(cfg.max_iters):
        grad = np.array(
            [
                (f(x + [shift, 0]) - f(x - [shift, 0])) / 2,
                (f(x + [0, shift]) - f(x - [0, shift])) / 2,
            ]
        )
        x = x - cfg.learning_rate * grad
        if np.linalg.norm(grad) < 1e-9:
            break
    return x, f(x)


def optimize_ground(d: BlochVector, cfg: OptimizerConfig | None = None, mode: Shots | None = None):
    """Minimize the energy over (theta, phi) with lam fixed to zero.

    The search always runs on the exact energy, normalized by |d|; a shot
    mode only matters when ``cfg.refine_with_shots`` is set, in which case a
    short simplex run on sampled energies follows.

    Returns
    -------
    params : PQCParams
    energy : float
        Exact energy of ``params``.

    Raises
    ------
    OptimizationError
        If no restart reaches -|d| + tol.
    """
    cfg = cfg or OptimizerConfig()
    r = d.norm
    if d.gapless:
        raise GaplessError(f"cannot optimize at a gapless point (|d| = {r:.3e})")
    unit = d.as_array() / r
    rng = np.random.default_rng(cfg.seed)
    best_x, best_e = None, np.inf
    for _ in range(cfg.restarts):
        x0 = rng.uniform([0.0, 0.0], [np.pi, 2 * np.pi])
        if cfg.method == "simplex":
            res = minimize(
                lambda v: _exact_energy(v[0], v[1], unit),
                x0,
                method="Nelder-Mead",
                options={"xatol": 1e-11, "fatol": 1e-15, "maxiter": cfg.max_iters},
            )
            x, e = res.x, float(res.fun)
        else:
            x, e = _parameter_shift_descent(x0, unit, cfg)
        if e < best_e:
            best_x, best_e = x, e
        if best_e * r <= -r + cfg.tol:
            break
    theta, phi = float(best_x[0] % (2 * np.pi)), float(best_x[1] % (2 * np.pi))
    params = PQCParams(theta, phi, 0.0)
    energy = _exact_energy(theta, phi, d.as_array())
    if energy > -r + cfg.tol:
        raise OptimizationError(
            f"optimizer did not reach the ground energy: residual {energy + r:.3e}", params, energy + r
        )
    if mode is not None and cfg.refine_with_shots:
        res = minimize(
            lambda v: energy_expectation(PQCParams(v[0], v[1]), d, mode),
            [theta, phi],
            method="Nelder-Mead",
            options={"maxiter": 40, "initial_simplex": [[theta, phi], [theta + 0.05, phi], [theta, phi + 0.05]]},
        )
        params = PQCParams(float(res.x[0] % (2 * np.pi)), float(res.x[1] % (2 * np.pi)), 0.0)
        energy = _exact_energy(params.theta, params.phi, d.as_array())
    return params, energy


def prepare_ground_projector_vqa(
    p: ModelPoint,
    mode: Shots | None = None,
    cfg: OptimizerConfig | None = None,
    purify: bool = True,
) -> np.ndarray:
    """Optimize the ansatz at ``p``, then measure sx, sy, sz and rebuild P_g."""
    params, _ = optimize_ground(bloch_vector(p), cfg, mode)
    e, _ = measure_pauli_expectations(params.circuit(), physical=0, mode=mode)
    return reconstruct_projector(e, purify=purify)
