"""Exact 2x2 complex operator algebra and the Bloch-ball mapping.

Density operators are plain (2, 2) complex ``numpy`` arrays validated at the
API boundary; pure states are stored as half-polar-angle pairs so that global
phase is quotiented out at the type level.  Eigendecompositions of 2x2
Hermitian matrices are done in closed form (trace/determinant), never
iteratively.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Validity tolerance for type invariants (hermiticity, trace, positivity).
TOL = 1e-9
# Comparison tolerance for algebraic identities.
ALGEBRA_TOL = 1e-12

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)


class BallViolation(ValueError):
    """Bloch vector lies outside the closed unit ball."""


class InvalidDensity(ValueError):
    """Matrix violates a density-operator invariant beyond tolerance."""


class InternalMismatch(ArithmeticError):
    """Two independent computation routes disagree beyond tolerance."""


class NegativeEigenvalue(ValueError):
    """Operator expected to be positive semidefinite is not."""


@dataclass(frozen=True)
class QubitState:
    """Pure state cos(theta)|0> + e^{i phi} sin(theta)|1>.

    ``theta`` is the half-polar angle, so the Bloch vector is
    (sin 2theta cos phi, sin 2theta sin phi, cos 2theta) and always has unit
    length.
    """

    theta: float
    phi: float = 0.0

    def ket(self) -> np.ndarray:
        return np.array(
            [np.cos(self.theta), np.exp(1j * self.phi) * np.sin(self.theta)],
            dtype=complex,
        )

    def bloch(self) -> np.ndarray:
        s, c = np.sin(2 * self.theta), np.cos(2 * self.theta)
        return np.array([s * np.cos(self.phi), s * np.sin(self.phi), c])

    def projector(self) -> np.ndarray:
        k = self.ket()
        return np.outer(k, k.conj())


def ket_to_state(vec: np.ndarray) -> QubitState:
    """Quotient out normalization and global phase of a 2-vector."""
    v = np.asarray(vec, dtype=complex).reshape(2)
    n = np.linalg.norm(v)
    if n < TOL:
        raise ValueError("cannot normalize a (near-)zero vector")
    v = v / n
    theta = float(np.arctan2(abs(v[1]), abs(v[0])))
    if abs(v[0]) < 1e-14 or abs(v[1]) < 1e-14:
        phi = 0.0
    else:
        phi = float(np.angle(v[1]) - np.angle(v[0]))
    return QubitState(theta, phi)


def eig2_hermitian(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form eigensystem of a 2x2 Hermitian matrix.

    Returns (w, V) with eigenvalues in descending order and matching unit
    eigenvector columns, so h = V diag(w) V^dagger.
    """
    a = float(h[0, 0].real)
    c = float(h[1, 1].real)
    b = complex(h[0, 1])
    mean = 0.5 * (a + c)
    delta = np.hypot(0.5 * (a - c), abs(b))
    w = np.array([mean + delta, mean - delta])
    if delta < 1e-15 or abs(b) < 1e-15:
        # (Nearly) diagonal: computational basis, larger entry first.
        if a >= c:
            return w, np.eye(2, dtype=complex)
        return w, np.array([[0, 1], [1, 0]], dtype=complex)
    # (h - w I) annihilates (b, w - a); orthogonal partner completes the basis.
    v0 = np.array([b, w[0] - a], dtype=complex)
    v0 /= np.linalg.norm(v0)
    v1 = np.array([-np.conj(v0[1]), np.conj(v0[0])], dtype=complex)
    return w, np.stack([v0, v1], axis=1)


def check_density(rho: np.ndarray, tol: float = TOL) -> np.ndarray:
    """Validate Hermiticity, unit trace and positivity; return as complex array."""
    m = np.asarray(rho, dtype=complex)
    if m.shape != (2, 2):
        raise InvalidDensity(f"expected a 2x2 matrix, got shape {m.shape}")
    if np.max(np.abs(m - m.conj().T)) > tol:
        raise InvalidDensity("matrix is not Hermitian within tolerance")
    if abs(m.trace() - 1.0) > tol:
        raise InvalidDensity(f"trace is {m.trace():.12g}, expected 1")
    w, _ = eig2_hermitian(m)
    if w[1] < -tol:
        raise InvalidDensity(f"negative eigenvalue {w[1]:.3e}")
    return m


def bloch_to_density(r: np.ndarray) -> np.ndarray:
    """Density operator (I + r.sigma)/2 for a point in the closed unit ball."""
    v = np.asarray(r, dtype=float).reshape(3)
    if np.linalg.norm(v) > 1.0 + TOL:
        raise BallViolation(f"|r| = {np.linalg.norm(v):.12g} exceeds 1")
    return 0.5 * (IDENTITY + v[0] * SIGMA_X + v[1] * SIGMA_Y + v[2] * SIGMA_Z)


def density_to_bloch(rho: np.ndarray) -> np.ndarray:
    """Bloch vector r_i = Tr(rho sigma_i) of a valid density operator."""
    m = check_density(rho)
    return np.array([float(np.trace(m @ p).real) for p in PAULIS])


def overlap(rho1: np.ndarray, rho2: np.ndarray) -> float:
    """Tr(rho1 rho2), equal to (1 + r1.r2)/2 on the Bloch ball."""
    m1 = check_density(rho1)
    m2 = check_density(rho2)
    return float(np.trace(m1 @ m2).real)


def trace_distance(rho0: np.ndarray, rho1: np.ndarray) -> float:
    """Half the trace norm of rho0 - rho1.

    Computed twice: from the eigenvalues of the difference and as half the
    Euclidean distance of the Bloch points.  The two routes must agree to
    1e-10 or InternalMismatch is raised.
    """
    m0 = check_density(rho0)
    m1 = check_density(rho1)
    w, _ = eig2_hermitian(m0 - m1)
    via_eigs = 0.5 * float(np.sum(np.abs(w)))
    via_bloch = 0.5 * float(np.linalg.norm(density_to_bloch(m0) - density_to_bloch(m1)))
    if abs(via_eigs - via_bloch) > 1e-10:
        raise InternalMismatch(
            f"trace-distance routes disagree: {via_eigs!r} vs {via_bloch!r}"
        )
    return via_eigs


def matrix_sqrt_psd(rho: np.ndarray) -> np.ndarray:
    """Unique PSD square root of a PSD 2x2 Hermitian matrix."""
    m = np.asarray(rho, dtype=complex)
    w, v = eig2_hermitian(m)
    if w[1] < -TOL:
        raise NegativeEigenvalue(f"eigenvalue {w[1]:.3e} below -{TOL}")
    w = np.maximum(w, 0.0)
    return (v * np.sqrt(w)) @ v.conj().T


def support_projector(rho: np.ndarray, tol: float = TOL) -> tuple[np.ndarray, int]:
    """Projector onto the support of a PSD matrix and its rank."""
    w, v = eig2_hermitian(np.asarray(rho, dtype=complex))
    cols = [v[:, i] for i in range(2) if w[i] > tol]
    p = np.zeros((2, 2), dtype=complex)
    for col in cols:
        p += np.outer(col, col.conj())
    return p, len(cols)


def is_pure(rho: np.ndarray, tol: float = TOL) -> bool:
    """Purity test via the determinant criterion det(rho) = 0."""
    m = np.asarray(rho, dtype=complex)
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    return abs(det) <= tol
