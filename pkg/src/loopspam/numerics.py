"""Small dense matrix algebra for the 2x2 ... 6x6 matrices used in the package.

Everything here is a pure function on numpy arrays. The Hermitian eigensolver
is a cyclic complex Jacobi method, which is robust and accurate at these sizes.
"""

from typing import NamedTuple

import numpy as np

from .errors import NotHermitian, NotPSD, SingularCorner

HERMITIAN_TOL = 1e-9
PSD_CLIP_TOL = 1e-9
PSD_REJECT_TOL = 1e-6
SINGULAR_DET_REL = 1e-12
SINGULAR_COND = 1e8


class EigenSystem(NamedTuple):
    """Ascending real eigenvalues with orthonormal eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray


def _as_square(m, dtype):
    a = np.asarray(m, dtype=dtype)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def kron(a, b):
    """Kronecker product, entry [(i*n + k), (j*n + l)] = a[i, j] * b[k, l]."""
    a = np.asarray(a)
    b = np.asarray(b)
    m, n = a.shape[0], b.shape[0]
    # outer product over (i, j, k, l), then regroup rows (i, k) and cols (j, l)
    out = a[:, None, :, None] * b[None, :, None, :]
    return out.reshape(m * n, m * n)


def hermitian_eigensystem(h, tol=1e-15, max_sweeps=60):
    """Diagonalize a Hermitian matrix with cyclic Jacobi rotations.

    Parameters
    ----------
    h : array_like
        Square Hermitian matrix (complex or real).
    tol : float
        Sweeps stop once the off-diagonal Frobenius norm falls below
        ``tol`` times the full Frobenius norm.
    max_sweeps : int
        Hard cap on the number of full sweeps.

    Returns
    -------
    EigenSystem
        Eigenvalues in ascending order and the matching unitary matrix of
        eigenvector columns, so that ``h = V diag(w) V^dagger``.
    """
    a = _as_square(h, complex).copy()
    if np.max(np.abs(a - a.conj().T), initial=0.0) > HERMITIAN_TOL:
        raise NotHermitian("matrix is not Hermitian within 1e-9")
    a = 0.5 * (a + a.conj().T)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)

    scale = np.linalg.norm(a)
    if scale == 0.0:
        return EigenSystem(np.zeros(n), v)

    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                g = a[p, q]
                r = abs(g)
                if r <= 1e-300:
                    continue
                # phase out g, then a real symmetric 2x2 rotation
                phase = g / r
                app = a[p, p].real
                aqq = a[q, q].real
                theta = 0.5 * np.arctan2(2.0 * r, app - aqq)
                c, s = np.cos(theta), np.sin(theta)
                u = np.array([[c, -s], [np.conj(phase) * s, np.conj(phase) * c]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ u
                a[idx, :] = u.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                v[:, idx] = v[:, idx] @ u

    w = np.real(np.diag(a))
    order = np.argsort(w, kind="stable")
    return EigenSystem(w[order], v[:, order])


def eigvalsh(h):
    """Ascending eigenvalues of a Hermitian matrix."""
    return hermitian_eigensystem(h).values


def invert3(m):
    """Invert a real 3x3 matrix through its adjugate.

    Raises
    ------
    SingularCorner
        If ``|det| < 1e-12 * max|m|**3`` or the 1-norm condition number
        exceeds 1e8.
    """
    m = _as_square(m, float)
    if m.shape != (3, 3):
        raise ValueError(f"invert3 expects a 3x3 matrix, got {m.shape}")
    cof = np.empty((3, 3))
    for i in range(3):
        for j in range(3):
            rows = [r for r in range(3) if r != i]
            cols = [c for c in range(3) if c != j]
            minor = m[rows][:, cols]
            cof[i, j] = (-1) ** (i + j) * (minor[0, 0] * minor[1, 1] - minor[0, 1] * minor[1, 0])
    det = float(m[0] @ cof[0])
    scale = np.max(np.abs(m))
    if scale == 0.0 or abs(det) < SINGULAR_DET_REL * scale**3:
        raise SingularCorner(f"determinant {det:.3e} is negligible at scale {scale:.3e}")
    inv = cof.T / det
    cond = np.abs(m).sum(axis=0).max() * np.abs(inv).sum(axis=0).max()
    if cond > SINGULAR_COND:
        raise SingularCorner(f"condition number {cond:.3e} exceeds {SINGULAR_COND:.0e}")
    return inv


def cond1(m):
    """1-norm condition number of a square matrix."""
    m = np.asarray(m, dtype=float)
    return np.linalg.norm(m, 1) * np.linalg.norm(np.linalg.inv(m), 1)


def psd_sqrt(h):
    """Principal square root of a positive semidefinite Hermitian matrix.

    Eigenvalues down to -1e-9 are clipped to zero; anything more negative than
    -1e-6 raises :class:`NotPSD`.
    """
    w, v = hermitian_eigensystem(h)
    if w[0] < -PSD_REJECT_TOL:
        raise NotPSD(f"minimum eigenvalue {w[0]:.3e} is below -1e-6")
    w = np.where(w < PSD_CLIP_TOL, np.maximum(w, 0.0), w)
    root = (v * np.sqrt(w)) @ v.conj().T
    return 0.5 * (root + root.conj().T)


def partial_transpose_b(rho):
    """Transpose the second qubit of a 4x4 two-qubit operator."""
    rho = np.asarray(rho)
    if rho.shape != (4, 4):
        raise ValueError(f"partial_transpose_b expects 4x4, got {rho.shape}")
    # axes (i, k, j, l) -> (i, l, j, k)
    return rho.reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4)
