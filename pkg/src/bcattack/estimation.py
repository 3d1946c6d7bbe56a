"""Binary state discrimination and the decomposition/estimation duality.

The receiver's best guess between two equiprobable density operators
succeeds with probability 1/2 + Tr|rho0 - rho1|/4, achieved by projecting
onto the positive eigenspace of the difference.  The committer's choice of
decomposition for a fixed submitted state maps onto exactly this kind of
estimation problem, which is what makes the closed-form attack tractable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .decomp import Povm, SupportViolation
from .qubit import (
    IDENTITY,
    TOL,
    InternalMismatch,
    QubitState,
    check_density,
    eig2_hermitian,
    ket_to_state,
    matrix_sqrt_psd,
)


@dataclass(frozen=True)
class EstimationProblem:
    """Pure states chi_k drawn with prior probabilities w_k."""

    states: tuple[tuple[float, QubitState], ...]

    def __post_init__(self):
        total = sum(w for w, _ in self.states)
        if abs(total - 1.0) > TOL:
            raise ValueError(f"priors sum to {total:.12g}")
        if min(w for w, _ in self.states) < -TOL:
            raise ValueError("negative prior")


@dataclass(frozen=True)
class DualityImage:
    """Estimation problem equivalent to choosing a decomposition of rho.

    ``scale`` is C = sum_k <psi_k| rho |psi_k>; for any POVM E over the
    support of rho, C * sum_k w_k <chi_k| E_k |chi_k> equals the unveiling
    probability of the decomposition generated by E.
    """

    problem: EstimationProblem
    scale: float


@dataclass(frozen=True)
class HelstromMeasurement:
    """Two-outcome projective measurement; outcome k is read as commitment k.

    ``degenerate`` flags rho0 = rho1, where {I, 0} is returned and any
    answer is equally optimal (downstream samplers need to know this).
    """

    povm: Povm
    degenerate: bool


def helstrom_pe(rho0: np.ndarray, rho1: np.ndarray) -> float:
    """Best estimation probability 1/2 + Tr|rho0 - rho1|/4 (equal priors)."""
    m0 = check_density(rho0)
    m1 = check_density(rho1)
    w, _ = eig2_hermitian(m0 - m1)
    return 0.5 + 0.25 * float(np.sum(np.abs(w)))


def helstrom_povm(rho0: np.ndarray, rho1: np.ndarray) -> HelstromMeasurement:
    """Projectors onto the positive / non-positive eigenspaces of rho0 - rho1."""
    m0 = check_density(rho0)
    m1 = check_density(rho1)
    diff = m0 - m1
    w, v = eig2_hermitian(diff)
    if np.max(np.abs(w)) < TOL:
        povm = Povm((IDENTITY.copy(), np.zeros((2, 2), dtype=complex)))
        return HelstromMeasurement(povm, degenerate=True)
    e0 = np.zeros((2, 2), dtype=complex)
    for i in range(2):
        if w[i] > 0:
            e0 += np.outer(v[:, i], v[:, i].conj())
    e1 = IDENTITY - e0
    achieved = 0.5 * float(np.trace(e0 @ m0).real) + 0.5 * float(
        np.trace(e1 @ m1).real
    )
    if abs(achieved - helstrom_pe(m0, m1)) > 1e-10:
        raise InternalMismatch(
            f"measurement achieves {achieved!r}, bound is {helstrom_pe(m0, m1)!r}"
        )
    return HelstromMeasurement(Povm((e0, e1)), degenerate=False)


def duality_map(rho: np.ndarray, states: list[QubitState]) -> DualityImage:
    """Map (rho, {psi_k}) to the equivalent estimation problem.

    chi_k is sqrt(rho)|psi_k> renormalized and w_k is proportional to
    <psi_k| rho |psi_k>.
    """
    m = check_density(rho)
    root = matrix_sqrt_psd(m)
    norms2 = []
    chis = []
    for psi in states:
        k = psi.ket()
        image = root @ k
        n2 = float(np.vdot(image, image).real)
        if n2 <= TOL:
            raise SupportViolation("state is annihilated by sqrt(rho)")
        norms2.append(n2)
        chis.append(ket_to_state(image))
    scale = float(sum(norms2))
    weighted = tuple((n2 / scale, chi) for n2, chi in zip(norms2, chis))
    return DualityImage(EstimationProblem(weighted), scale)


def estimation_success(problem: EstimationProblem, povm: Povm) -> float:
    """Success probability sum_k w_k <chi_k| E_k |chi_k> of a given POVM."""
    if povm.size != len(problem.states):
        raise ValueError("POVM size does not match the number of hypotheses")
    total = 0.0
    for (w, chi), e in zip(problem.states, povm.elements):
        k = chi.ket()
        total += w * float((k.conj() @ e @ k).real)
    return total
