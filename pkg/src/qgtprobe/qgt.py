"""
Abelian geometric tensor from ground-state projectors.

With L = dP_mu . P_e . dP_nu, the metric and curvature satisfy

    (L + L')/2   = g_{mu nu} P_g
    i (L - L')   = F_{mu nu} P_g,        L' = dP_nu . P_e . dP_mu

element by element. Each scalar is the average of the element-wise
quotients by P_g.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

DEFAULT_DELTA = 0.04 * np.pi
DEFAULT_GRID_N = 15
DEFAULT_ROBUST_EPS = 0.05


@dataclass
class QGTPoint:
    g_xx: float
    g_xy: float
    g_yy: float
    F_xy: float
    flags: list[str] = field(default_factory=list)
    residual: float = 0.0  # largest spurious imaginary part across the recovered scalars

    @property
    def g_yx(self) -> float:
        return self.g_xy

    @property
    def F_yx(self) -> float:
        return -self.F_xy

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.g_xx, self.g_xy, self.g_yy, self.F_xy)

    def metric(self) -> np.ndarray:
        return np.array([[self.g_xx, self.g_xy], [self.g_xy, self.g_yy]])


@dataclass(frozen=True)
class GridSpec:
    n: int = DEFAULT_GRID_N
    delta: float = DEFAULT_DELTA
    m: float = 1.0

    def __post_init__(self):
        if self.n < 3:
            raise ValueError(f"grid needs n >= 3, got {self.n}")
        if not 0 < self.delta < 2 * np.pi / self.n:
            raise ValueError(f"delta must lie in (0, 2pi/n), got {self.delta}")

    @property
    def ks(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.n) / self.n

    def points(self):
        """(i, j, kx, ky) for every grid point, row-major in i."""
        ks = self.ks
        for i in range(self.n):
            for j in range(self.n):
                yield i, j, float(ks[i]), float(ks[j])


def projector_derivative(p_at_k, p_at_k_plus, delta: float) -> np.ndarray:
    """Forward difference (P(k + delta) - P(k)) / delta."""
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    return (np.asarray(p_at_k_plus, dtype=complex) - np.asarray(p_at_k, dtype=complex)) / delta


def central_projector_derivative(p_minus, p_plus, delta: float) -> np.ndarray:
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    return (np.asarray(p_plus, dtype=complex) - np.asarray(p_minus, dtype=complex)) / (2 * delta)


def recover_scalar(lhs: np.ndarray, p: np.ndarray, robust_eps: float = DEFAULT_ROBUST_EPS):
    """Solve ``lhs = c * p`` for the scalar ``c`` by element-wise averaging.

    Elements with ``|p_ij| < robust_eps`` are skipped; with ``robust_eps = 0``
    only exact zeros are skipped. If every element is skipped, ``c`` comes
    from the trace, ``Tr(lhs) / Tr(p)``.

    Returns
    -------
    value : complex
    used_trace : bool
    """
    mags = np.abs(p)
    mask = mags >= robust_eps if robust_eps > 0 else mags > 0
    if not mask.any():
        return complex(np.trace(lhs) / np.trace(p)), True
    return complex(np.mean(lhs[mask] / p[mask])), False


def qgt_pair(p_g, p_e, dp_mu, dp_nu, robust_eps: float = DEFAULT_ROBUST_EPS):
    """Metric and curvature for one (mu, nu) pair.

    Returns ``(g, F, flags, residual)`` with ``g``, ``F`` real.
    """
    a = dp_mu @ p_e @ dp_nu
    b = dp_nu @ p_e @ dp_mu
    g, g_trace = recover_scalar(0.5 * (a + b), p_g, robust_eps)
    f, f_trace = recover_scalar(1j * (a - b), p_g, robust_eps)
    flags = ["trace_fallback"] if (g_trace or f_trace) else []
    return g.real, f.real, flags, max(abs(g.imag), abs(f.imag))


def extract_qgt(p_g, p_e, dp_x, dp_y, robust_eps: float = DEFAULT_ROBUST_EPS) -> QGTPoint:
    """Metric components and Berry curvature at one momentum.

    Parameters
    ----------
    p_g, p_e : (2, 2) complex arrays
        Ground and excited projectors, ``p_e = 1 - p_g``.
    dp_x, dp_y : (2, 2) complex arrays
        Momentum derivatives of ``p_g``.
    robust_eps : float
        Magnitude below which a ``p_g`` element is left out of the average.
        0 keeps every nonzero element.
    """
    p_g = np.asarray(p_g, dtype=complex)
    p_e = np.asarray(p_e, dtype=complex)
    dev = np.max(np.abs(p_g + p_e - np.eye(p_g.shape[0])))
    if dev > 1e-8:
        raise ValueError(f"p_e must equal 1 - p_g (deviation {dev:.2e})")
    g_xx, _, fl1, r1 = qgt_pair(p_g, p_e, dp_x, dp_x, robust_eps)
    g_yy, _, fl2, r2 = qgt_pair(p_g, p_e, dp_y, dp_y, robust_eps)
    g_xy, f_xy, fl3, r3 = qgt_pair(p_g, p_e, dp_x, dp_y, robust_eps)
    flags = sorted(set(fl1 + fl2 + fl3))
    return QGTPoint(g_xx, g_xy, g_yy, f_xy, flags, max(r1, r2, r3))


def chern_number(f_field, grid: GridSpec) -> float:
    """(1/2pi) sum_ij F_xy(k_i, k_j) (2pi/n)^2.

    ``f_field`` is an ``(n, n)`` array or a mapping ``(i, j) -> F_xy``.
    """
    n = grid.n
    if isinstance(f_field, Mapping):
        missing = [(i, j) for i in range(n) for j in range(n) if (i, j) not in f_field]
        if missing:
            raise ValueError(f"curvature field is missing {len(missing)} grid point(s), e.g. {missing[0]}")
        arr = np.array([[f_field[(i, j)] for j in range(n)] for i in range(n)], dtype=float)
    else:
        arr = np.asarray(f_field, dtype=float)
        if arr.shape != (n, n):
            raise ValueError(f"curvature field has shape {arr.shape}, expected {(n, n)}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"curvature field has {int(np.sum(~np.isfinite(arr)))} non-finite value(s)")
    return float(arr.sum() * (2 * np.pi / n) ** 2 / (2 * np.pi))
