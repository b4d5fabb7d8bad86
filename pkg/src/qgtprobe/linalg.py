"""
Dense linear algebra on small complex matrices (2x2 up to 8x8).

Everything here is a pure function of its arguments. Matrices are plain
``numpy`` arrays of dtype ``complex128``.
"""

from __future__ import annotations

import numpy as np

HERMITIAN_TOL = 1e-10
_EXP_LIMIT = 700.0  # exp(709) is the float64 ceiling


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] > 8:
        raise ValueError(f"matrices beyond 8x8 are not supported (got {m.shape[0]})")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def is_hermitian(a, tol: float = HERMITIAN_TOL) -> bool:
    a = np.asarray(a, dtype=complex)
    return bool(np.max(np.abs(a - dagger(a)), initial=0.0) <= tol)


def is_unitary(a, tol: float = HERMITIAN_TOL) -> bool:
    a = np.asarray(a, dtype=complex)
    return bool(np.max(np.abs(dagger(a) @ a - np.eye(a.shape[0])), initial=0.0) <= tol)


def is_upper_triangular(a, tol: float = HERMITIAN_TOL) -> bool:
    a = np.asarray(a)
    return bool(np.max(np.abs(np.tril(a, -1)), initial=0.0) <= tol)


def is_psd(a, tol: float = HERMITIAN_TOL) -> bool:
    if not is_hermitian(a, tol):
        return False
    return bool(np.min(np.linalg.eigvalsh(np.asarray(a, dtype=complex))) >= -tol)


def is_projector(a, tol: float = HERMITIAN_TOL) -> bool:
    a = np.asarray(a, dtype=complex)
    return is_hermitian(a, tol) and bool(np.max(np.abs(a @ a - a)) <= tol)


def fix_phase(v: np.ndarray) -> np.ndarray:
    """Rotate ``v`` so that its largest-magnitude entry is real and positive.

    Ties between entries of equal magnitude go to the lowest index, up to a
    relative slack of 1e-12 so that rounding does not flip the choice.
    """
    mags = np.abs(v)
    i = int(np.argmax(mags >= mags.max() * (1 - 1e-12)))
    return v * (mags[i] / v[i])


def _eigh_2x2(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # a = a0 I + d.sigma, eigenvalues a0 -/+ |d|
    a0 = 0.5 * (a[0, 0].real + a[1, 1].real)
    dz = 0.5 * (a[0, 0].real - a[1, 1].real)
    dx = a[1, 0].real
    dy = a[1, 0].imag
    r = np.sqrt(dx * dx + dy * dy + dz * dz)
    vals = np.array([a0 - r, a0 + r])
    if r == 0.0:
        return vals, np.eye(2, dtype=complex)
    vecs = np.empty((2, 2), dtype=complex)
    for col, sign in enumerate((-1.0, 1.0)):
        # columns of the spectral projector (I + sign*n.sigma)/2
        proj = 0.5 * np.array(
            [[r + sign * dz, sign * (dx - 1j * dy)], [sign * (dx + 1j * dy), r - sign * dz]]
        ) / r
        j = int(np.argmax([np.linalg.norm(proj[:, 0]), np.linalg.norm(proj[:, 1])]))
        v = proj[:, j] / np.linalg.norm(proj[:, j])
        vecs[:, col] = fix_phase(v)
    return vals, vecs


def hermitian_eigensolve(a) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix.

    Returns
    -------
    eigenvalues : ndarray
        Ascending real eigenvalues.
    eigenvectors : ndarray
        Orthonormal eigenvectors as columns, each phase-fixed so that its
        largest-magnitude component is real and positive.

    Raises
    ------
    ValueError
        If ``a`` is not Hermitian within 1e-10.
    """
    a = as_matrix(a)
    dev = np.max(np.abs(a - dagger(a)))
    if dev > HERMITIAN_TOL:
        raise ValueError(f"matrix is not Hermitian (max |A - A^dagger| = {dev:.3e})")
    a = 0.5 * (a + dagger(a))
    if a.shape[0] == 2:
        return _eigh_2x2(a)
    vals, vecs = np.linalg.eigh(a)
    for j in range(vecs.shape[1]):
        vecs[:, j] = fix_phase(vecs[:, j])
    return vals, vecs


def matrix_exponential_hermitian(h, s: float) -> np.ndarray:
    """Return ``exp(s * h)`` for Hermitian ``h`` via its spectral decomposition."""
    vals, vecs = hermitian_eigensolve(h)
    arg = s * vals
    if np.max(np.abs(arg)) > _EXP_LIMIT:
        raise OverflowError(
            f"exp(s*lambda) out of floating range: max |s*lambda| = {np.max(np.abs(arg)):.1f}"
        )
    out = (vecs * np.exp(arg)) @ dagger(vecs)
    return 0.5 * (out + dagger(out))


def qr_decompose(m, rank_tol: float = 1e-12) -> tuple[np.ndarray, np.ndarray]:
    """QR decomposition by modified Gram-Schmidt with one re-orthogonalization pass.

    ``R`` has a real, positive diagonal. With that convention, leading columns
    of ``m`` that are already orthonormal come back unchanged in ``Q``.

    Raises
    ------
    numpy.linalg.LinAlgError
        If a column is linearly dependent on the preceding ones (relative
        residual below ``rank_tol``).
    """
    a = as_matrix(m)
    n = a.shape[0]
    q = np.zeros((n, n), dtype=complex)
    r = np.zeros((n, n), dtype=complex)
    for j in range(n):
        v = a[:, j].copy()
        col_norm = np.linalg.norm(v)
        for _ in range(2):
            for i in range(j):
                c = np.vdot(q[:, i], v)
                r[i, j] += c
                v = v - c * q[:, i]
        nv = np.linalg.norm(v)
        if col_norm == 0.0 or nv <= rank_tol * max(col_norm, 1.0):
            raise np.linalg.LinAlgError(f"matrix is rank deficient at column {j}")
        r[j, j] = nv
        q[:, j] = v / nv
    return q, r


def sqrt_psd(a, neg_tol: float = 1e-9) -> np.ndarray:
    """Principal square root of a Hermitian positive semidefinite matrix.

    Eigenvalues in ``[-neg_tol, 0)`` are treated as rounding noise and clamped
    to zero; anything more negative is rejected.
    """
    vals, vecs = hermitian_eigensolve(a)
    if vals[0] < -neg_tol:
        raise ValueError(f"matrix is not positive semidefinite (min eigenvalue {vals[0]:.3e})")
    root = np.sqrt(np.clip(vals, 0.0, None))
    out = (vecs * root) @ dagger(vecs)
    return 0.5 * (out + dagger(out))


def trace_distance(a, b) -> float:
    """(1/2) sum |eigenvalues of a - b| for Hermitian ``a``, ``b``."""
    diff = np.asarray(a, dtype=complex) - np.asarray(b, dtype=complex)
    diff = 0.5 * (diff + dagger(diff))
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(diff))))
