"""Dense Hermitian eigensolvers for dimensions 2 through 4.

Dimension 2 delegates to the closed form in :mod:`bcattack.qubit`; dimensions
3 and 4 use a cyclic Jacobi sweep with complex Givens rotations, iterated
until the off-diagonal Frobenius norm drops below 1e-13.  Nothing here calls
an iterative black-box solver, which keeps the oracle and simulator paths
self-contained.
"""

from __future__ import annotations

import numpy as np

from .qubit import NegativeEigenvalue, eig2_hermitian

JACOBI_OFFDIAG_TOL = 1e-13
_MAX_SWEEPS = 60


def _offdiag_norm(h: np.ndarray) -> float:
    off = h - np.diag(np.diag(h))
    return float(np.linalg.norm(off))


def jacobi_eigh(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigensystem of a small complex Hermitian matrix by cyclic Jacobi.

    Returns (w, V) with eigenvalues descending and h = V diag(w) V^dagger.
    """
    a = np.array(h, dtype=complex)
    d = a.shape[0]
    if a.shape != (d, d):
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if np.max(np.abs(a - a.conj().T)) > 1e-9:
        raise ValueError("matrix is not Hermitian within tolerance")
    a = 0.5 * (a + a.conj().T)
    v = np.eye(d, dtype=complex)
    for _ in range(_MAX_SWEEPS):
        if _offdiag_norm(a) < JACOBI_OFFDIAG_TOL:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[p, q]
                if abs(apq) < JACOBI_OFFDIAG_TOL / (d * d):
                    continue
                app = a[p, p].real
                aqq = a[q, q].real
                # Unitary 2x2 rotation diagonalizing the (p,q) block.
                phase = apq / abs(apq)
                theta = 0.5 * np.arctan2(2 * abs(apq), app - aqq)
                cs, sn = np.cos(theta), np.sin(theta)
                rot = np.eye(d, dtype=complex)
                rot[p, p] = cs
                rot[p, q] = -sn * phase
                rot[q, p] = sn * np.conj(phase)
                rot[q, q] = cs
                a = rot.conj().T @ a @ rot
                v = v @ rot
    else:
        raise ArithmeticError("Jacobi sweep did not converge")
    w = np.diag(a).real.copy()
    order = np.argsort(-w)
    return w[order], v[:, order]


def eigh_small(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Closed form at d=1,2, cyclic Jacobi at d=3,4.

    d=1 arises as the degenerate ancilla of a rank-1 purification.
    """
    d = np.asarray(h).shape[0]
    if d == 1:
        return (
            np.array([float(np.asarray(h, dtype=complex)[0, 0].real)]),
            np.eye(1, dtype=complex),
        )
    if d == 2:
        return eig2_hermitian(np.asarray(h, dtype=complex))
    if d in (3, 4):
        return jacobi_eigh(h)
    raise ValueError(f"dimension {d} not supported (1..4)")


def sqrt_psd_small(h: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """PSD square root via eigh_small; raises on negative eigenvalues."""
    w, v = eigh_small(h)
    if w[-1] < -tol:
        raise NegativeEigenvalue(f"eigenvalue {w[-1]:.3e} below -{tol}")
    return (v * np.sqrt(np.maximum(w, 0.0))) @ v.conj().T


def inv_sqrt_psd_small(h: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Inverse square root on the support of a PSD matrix (pseudo-inverse)."""
    w, v = eigh_small(h)
    if w[-1] < -tol:
        raise NegativeEigenvalue(f"eigenvalue {w[-1]:.3e} below -{tol}")
    inv = np.where(w > tol, 1.0 / np.sqrt(np.maximum(w, tol)), 0.0)
    return (v * inv) @ v.conj().T
