"""Convex decompositions, Jaynes' rule, the POVM bijection, and chord geometry.

A decomposition {(q_k, sigma_k)} of rho corresponds one-to-one to a POVM
{E_k} over the support of rho through q_k sigma_k = sqrt(rho) E_k sqrt(rho).
On the Bloch ball a 2-element extremal decomposition is a chord through the
point representing rho, which reduces the perfect-cheat condition to a
segment-intersection test.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .qubit import (
    IDENTITY,
    TOL,
    QubitState,
    check_density,
    density_to_bloch,
    eig2_hermitian,
    matrix_sqrt_psd,
    support_projector,
)

# Segment intersections are declared below this closest-approach distance.
CHORD_TOL = 1e-9


class SupportViolation(ValueError):
    """A state or element falls outside the support of the parent operator."""


class SupportMismatch(ValueError):
    """POVM carries weight outside the support of the density operator."""


@dataclass(frozen=True)
class ConvexDecomposition:
    """Weighted elements {(q_k, sigma_k)} with sum_k q_k sigma_k = parent.

    Elements with (numerically) zero weight may carry ``None``: the bijection
    with POVMs leaves such elements undefined rather than fabricating a state.
    """

    parent: np.ndarray
    weights: tuple[float, ...]
    elements: tuple[Optional[np.ndarray], ...]

    def __post_init__(self):
        parent = check_density(self.parent)
        object.__setattr__(self, "parent", parent)
        if len(self.weights) != len(self.elements):
            raise ValueError("weights and elements differ in length")
        if min(self.weights) < -TOL:
            raise ValueError(f"negative weight {min(self.weights):.3e}")
        if abs(sum(self.weights) - 1.0) > TOL:
            raise ValueError(f"weights sum to {sum(self.weights):.12g}")
        acc = np.zeros((2, 2), dtype=complex)
        for q, sigma in zip(self.weights, self.elements):
            if sigma is None:
                if q > TOL:
                    raise ValueError("positively weighted element is undefined")
                continue
            acc += q * check_density(sigma)
        if np.max(np.abs(acc - parent)) > 1e-8:
            raise ValueError("elements do not reconstruct the parent operator")

    @classmethod
    def trivial(cls, rho: np.ndarray) -> "ConvexDecomposition":
        rho = check_density(rho)
        return cls(rho, (1.0,), (rho,))

    @property
    def size(self) -> int:
        return len(self.weights)


@dataclass(frozen=True)
class Povm:
    """Positive operators summing to the identity on a stated support."""

    elements: tuple[np.ndarray, ...]
    support: np.ndarray = field(default_factory=lambda: IDENTITY.copy())

    def __post_init__(self):
        object.__setattr__(
            self, "elements", tuple(np.asarray(e, dtype=complex) for e in self.elements)
        )
        total = np.zeros((2, 2), dtype=complex)
        for e in self.elements:
            w, _ = eig2_hermitian(e)
            if w[1] < -TOL:
                raise ValueError(f"POVM element has eigenvalue {w[1]:.3e}")
            total += e
        if np.max(np.abs(total - self.support)) > 1e-8:
            raise ValueError("POVM elements do not sum to the stated support")

    @property
    def size(self) -> int:
        return len(self.elements)


def jaynes_weight(rho: np.ndarray, xi: QubitState) -> float:
    """Weight 1 / <xi| rho^{-1} |xi> with rho inverted on its support.

    This is the unique weight of |xi><xi| in an extremal decomposition whose
    cardinality equals the rank of rho.
    """
    m = check_density(rho)
    k = xi.ket()
    if float((k.conj() @ m @ k).real) <= TOL:
        raise SupportViolation("state is orthogonal to the support of rho")
    w, v = eig2_hermitian(m)
    inv = np.where(w > TOL, 1.0 / np.maximum(w, TOL), 0.0)
    rho_inv = (v * inv) @ v.conj().T
    return 1.0 / float((k.conj() @ rho_inv @ k).real)


def povm_to_decomposition(rho: np.ndarray, povm: Povm) -> ConvexDecomposition:
    """Decomposition generated by a POVM: q_k sigma_k = sqrt(rho) E_k sqrt(rho)."""
    m = check_density(rho)
    proj, _rank = support_projector(m)
    for i, e in enumerate(povm.elements):
        outside = float(np.trace(e @ (IDENTITY - proj)).real)
        if outside > TOL:
            raise SupportMismatch(
                f"element {i} has weight {outside:.3e} outside the support of rho"
            )
    root = matrix_sqrt_psd(m)
    weights = []
    elements: list[Optional[np.ndarray]] = []
    for e in povm.elements:
        prod = root @ e @ root
        q = float(np.trace(prod).real)
        if q < 1e-12:
            weights.append(0.0)
            elements.append(None)
        else:
            weights.append(q)
            elements.append(prod / q)
    total = sum(weights)
    weights = [q / total for q in weights]
    return ConvexDecomposition(m, tuple(weights), tuple(elements))


def decomposition_to_povm(decomp: ConvexDecomposition) -> Povm:
    """Unique generating POVM E_k = q_k rho^{-1/2} sigma_k rho^{-1/2}."""
    m = decomp.parent
    proj, _rank = support_projector(m)
    w, v = eig2_hermitian(m)
    inv_root = np.where(w > TOL, 1.0 / np.sqrt(np.maximum(w, TOL)), 0.0)
    root_inv = (v * inv_root) @ v.conj().T
    elements = []
    for q, sigma in zip(decomp.weights, decomp.elements):
        if sigma is None or q < 1e-12:
            elements.append(np.zeros((2, 2), dtype=complex))
            continue
        outside = float(np.trace(sigma @ (IDENTITY - proj)).real)
        if outside > TOL:
            raise SupportViolation(
                f"element has weight {outside:.3e} outside the support of rho"
            )
        elements.append(q * (root_inv @ sigma @ root_inv))
    return Povm(tuple(elements), support=proj)


@dataclass(frozen=True)
class StatePolytope:
    """A point or chord spanned by 1 or 2 unit Bloch vectors."""

    vertices: tuple[np.ndarray, ...]

    def __post_init__(self):
        verts = tuple(np.asarray(v, dtype=float).reshape(3) for v in self.vertices)
        object.__setattr__(self, "vertices", verts)
        if not 1 <= len(verts) <= 2:
            raise ValueError("polytope restricted to 1 or 2 vertices")
        for v in verts:
            if abs(np.linalg.norm(v) - 1.0) > TOL:
                raise ValueError(f"vertex norm {np.linalg.norm(v):.12g} is not 1")
        if len(verts) == 2 and np.linalg.norm(verts[0] - verts[1]) < CHORD_TOL:
            raise ValueError("chord vertices coincide")

    @classmethod
    def from_states(cls, states: Sequence[QubitState]) -> "StatePolytope":
        return cls(tuple(s.bloch() for s in states))

    @property
    def kind(self) -> str:
        return "point" if len(self.vertices) == 1 else "chord"


def _segment_closest(p0, p1, q0, q1):
    """Closest points of two segments (Ericson-style clamped solve)."""
    d1 = p1 - p0
    d2 = q1 - q0
    r = p0 - q0
    a = float(d1 @ d1)
    e = float(d2 @ d2)
    f = float(d2 @ r)
    c = float(d1 @ r)
    b = float(d1 @ d2)
    denom = a * e - b * b
    if denom > 1e-15:
        s = np.clip((b * f - c * e) / denom, 0.0, 1.0)
    else:
        s = 0.0  # parallel: pick an end and resolve t below
    t = (b * s + f) / e if e > 1e-15 else 0.0
    if t < 0.0:
        t = 0.0
        s = np.clip(-c / a, 0.0, 1.0) if a > 1e-15 else 0.0
    elif t > 1.0:
        t = 1.0
        s = np.clip((b - c) / a, 0.0, 1.0) if a > 1e-15 else 0.0
    return p0 + s * d1, q0 + t * d2


def certainty_region(set0: StatePolytope, set1: StatePolytope) -> Optional[np.ndarray]:
    """A Bloch point decomposed by both sets, if the polytopes intersect.

    Point-point, point-chord and chord-chord (closest-approach of segments in
    R^3) are all handled; chords intersect when the minimum distance is below
    CHORD_TOL with both parameters inside the segments.
    """
    v0, v1 = set0.vertices, set1.vertices
    if len(v0) == 1 and len(v1) == 1:
        if np.linalg.norm(v0[0] - v1[0]) < CHORD_TOL:
            return v0[0].copy()
        return None
    if len(v0) == 1 or len(v1) == 1:
        point = v0[0] if len(v0) == 1 else v1[0]
        a, b = (v1 if len(v0) == 1 else v0)
        p, q = _segment_closest(a, b, point, point)
        if np.linalg.norm(p - q) < CHORD_TOL:
            return point.copy()
        return None
    p, q = _segment_closest(v0[0], v0[1], v1[0], v1[1])
    if np.linalg.norm(p - q) < CHORD_TOL:
        return 0.5 * (p + q)
    return None


def decomposes(
    rho: np.ndarray, polytope: StatePolytope
) -> tuple[bool, Optional[tuple[float, ...]]]:
    """Whether rho lies on the polytope; if so, the convex weights.

    For a chord the weights are the unique solution of
    r = q s1 + (1-q) s2.
    """
    r = density_to_bloch(rho)
    verts = polytope.vertices
    if len(verts) == 1:
        if np.linalg.norm(r - verts[0]) < TOL:
            return True, (1.0,)
        return False, None
    s1, s2 = verts
    d = s1 - s2
    q = float(np.clip((r - s2) @ d / (d @ d), 0.0, 1.0))
    residual = np.linalg.norm(q * s1 + (1 - q) * s2 - r)
    if residual < TOL:
        return True, (q, 1.0 - q)
    return False, None
