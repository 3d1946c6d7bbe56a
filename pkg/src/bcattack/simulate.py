"""Monte-Carlo protocol simulation built on purifications.

The committer's measurement is realized exactly as the purification picture
prescribes: write the submitted operator in its eigenbasis, purify with the
ancilla copy of that basis (identity intertwiner), and measure the transpose
of the generating POVM on the ancilla.  Outcome probabilities and the
receiver's conditional states are computed through the tensor contraction,
not copied from the decomposition, so agreement with the decomposition
weights is a genuine check of the construction.

RNG: a counter-based Philox stream keyed by the seed; trial t consumes row t
of one pre-drawn uniform block, so runs are reproducible and portable.
Trials could be split across workers by splitting the counter space per
trial; this implementation keeps the single-stream (serial) layout.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .attack import CheatStrategy, ProtocolSpec
from .estimation import helstrom_povm
from .linalg import eigh_small, sqrt_psd_small
from .qubit import TOL, eig2_hermitian

_SUPPORT_TOL = 1e-12


class SpanViolation(ValueError):
    """A supposedly embedded state leaks out of the 2-d subspace."""


@dataclass(frozen=True)
class GeneralDensity:
    """Hermitian, unit-trace, PSD matrix of dimension 2 to 4."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        d = m.shape[0]
        if m.shape != (d, d) or not 2 <= d <= 4:
            raise ValueError(f"expected a square matrix of dim 2..4, got {m.shape}")
        if np.max(np.abs(m - m.conj().T)) > TOL:
            raise ValueError("matrix is not Hermitian within tolerance")
        if abs(m.trace() - 1.0) > TOL:
            raise ValueError(f"trace is {m.trace():.12g}")
        w, _ = eigh_small(m)
        if w[-1] < -TOL:
            raise ValueError(f"negative eigenvalue {w[-1]:.3e}")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class GeneralDecomposition:
    """Weighted d-dimensional elements reconstructing a stated parent."""

    parent: np.ndarray
    weights: tuple[float, ...]
    elements: tuple[np.ndarray, ...]

    def __post_init__(self):
        acc = np.zeros_like(np.asarray(self.parent, dtype=complex))
        for q, sigma in zip(self.weights, self.elements):
            acc += q * np.asarray(sigma, dtype=complex)
        if np.max(np.abs(acc - self.parent)) > 1e-8:
            raise ValueError("elements do not reconstruct the parent")


@dataclass(frozen=True)
class SimResult:
    """Outcome of a seeded simulation run.

    ``outcome_counts`` / ``outcome_successes`` are per decomposition element
    (unveiling runs) or per committed bit (estimation runs).
    """

    trials: int
    successes: int
    p_u_hat: float
    std_err: float
    seed: int
    outcome_counts: tuple[int, ...]
    outcome_successes: tuple[int, ...]

    def __post_init__(self):
        if not 0.0 <= self.p_u_hat <= 1.0:
            raise ValueError("estimate outside [0, 1]")


def _uniform_block(seed: int, trials: int, cols: int) -> np.ndarray:
    gen = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
    return gen.random((trials, cols))


def hjw_outcome_model(
    strategy: CheatStrategy, protocol: ProtocolSpec, target_bit: int
) -> tuple[np.ndarray, np.ndarray]:
    """(outcome probabilities, conditional pass rates) via the purification.

    Ancilla dimension equals the rank of the submitted operator; rank-1
    submissions reduce to a trivial one-dimensional ancilla.
    """
    if target_bit not in (0, 1):
        raise ValueError("target_bit must be 0 or 1")
    decomp = strategy.decomp0 if target_bit == 0 else strategy.decomp1
    announce = strategy.announce0 if target_bit == 0 else strategy.announce1
    states = protocol.states(target_bit)

    lam_all, vecs = eig2_hermitian(strategy.rho)
    keep = lam_all > _SUPPORT_TOL
    lam = lam_all[keep]
    basis = vecs[:, keep]  # columns: eigenvectors spanning the support
    m = len(lam)

    # Purification coordinates: psi = sum_j sqrt(lam_j) |j>_A (x) |e_j>_B,
    # stored as the m x 2 matrix Psi[j, :] = sqrt(lam_j) e_j^T.
    psi = np.sqrt(lam)[:, None] * basis.T

    inv_root = 1.0 / np.sqrt(lam)
    probs = np.zeros(len(decomp.weights))
    passes = np.zeros(len(decomp.weights))
    for k, (q, sigma) in enumerate(zip(decomp.weights, decomp.elements)):
        if sigma is None or q < 1e-14:
            continue
        sigma_support = basis.conj().T @ sigma @ basis
        generating = q * (inv_root[:, None] * sigma_support * inv_root[None, :])
        alice_povm = generating.T  # transpose in the eigenbasis, U = I
        probs[k] = float(np.vdot(psi, alice_povm @ psi).real)
        if probs[k] < 1e-14:
            probs[k] = 0.0
            continue
        collapsed = sqrt_psd_small(alice_povm) @ psi
        bob_state = collapsed.T @ collapsed.conj() / probs[k]
        ket = states[announce[k]].ket()
        passes[k] = float((ket.conj() @ bob_state @ ket).real)
    total = probs.sum()
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"outcome probabilities sum to {total:.12g}")
    return probs / total, np.clip(passes, 0.0, 1.0)


def hjw_simulate(
    strategy: CheatStrategy,
    protocol: ProtocolSpec,
    target_bit: int,
    trials: int,
    seed: int,
) -> SimResult:
    """Simulate unveiling attempts for one bit; deterministic for fixed seed."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    probs, passes = hjw_outcome_model(strategy, protocol, target_bit)
    u = _uniform_block(seed, trials, 2)
    edges = np.cumsum(probs)
    edges[-1] = 1.0
    outcomes = np.searchsorted(edges, u[:, 0], side="right")
    ok = u[:, 1] < passes[outcomes]
    counts = np.bincount(outcomes, minlength=len(probs))
    succ = np.bincount(outcomes[ok], minlength=len(probs))
    p_hat = float(ok.mean())
    return SimResult(
        trials,
        int(ok.sum()),
        p_hat,
        float(np.sqrt(p_hat * (1 - p_hat) / trials)),
        seed,
        tuple(int(c) for c in counts),
        tuple(int(s) for s in succ),
    )


def simulate_pe(protocol: ProtocolSpec, trials: int, seed: int) -> SimResult:
    """Honest commit, optimal binary measurement, score the receiver's guess."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    meas = helstrom_povm(protocol.honest_density(0), protocol.honest_density(1))
    e0 = meas.povm.elements[0]
    guess0 = []  # P(guess = 0 | bit, k)
    cums = []
    for bit in (0, 1):
        kets = [s.ket() for s in protocol.states(bit)]
        guess0.append(np.array([float((k.conj() @ e0 @ k).real) for k in kets]))
        cums.append(np.cumsum(protocol.probs(bit)))
    u = _uniform_block(seed, trials, 3)
    bits = (u[:, 0] >= 0.5).astype(int)
    idx0 = np.searchsorted(np.minimum(cums[0], 1.0), u[:, 1], side="right")
    idx1 = np.searchsorted(np.minimum(cums[1], 1.0), u[:, 1], side="right")
    idx0 = np.clip(idx0, 0, len(cums[0]) - 1)
    idx1 = np.clip(idx1, 0, len(cums[1]) - 1)
    p_zero = np.where(bits == 0, guess0[0][idx0], guess0[1][idx1])
    guesses = (u[:, 2] >= np.clip(p_zero, 0.0, 1.0)).astype(int)
    ok = guesses == bits
    counts = np.bincount(bits, minlength=2)
    succ = np.bincount(bits[ok], minlength=2)
    p_hat = float(ok.mean())
    return SimResult(
        trials,
        int(ok.sum()),
        p_hat,
        float(np.sqrt(p_hat * (1 - p_hat) / trials)),
        seed,
        tuple(int(c) for c in counts),
        tuple(int(s) for s in succ),
    )


@dataclass(frozen=True)
class ProjectionReport:
    """Comparison of a strategy with its projection onto the state span."""

    trace_in_span: float
    p_u_original: float
    p_u_projected: float
    ratio: float
    residual: float
    improved: bool


def support_projection_check(
    rho_star: GeneralDensity,
    decomps: tuple[GeneralDecomposition, GeneralDecomposition],
    states: tuple[Sequence[np.ndarray], Sequence[np.ndarray]],
) -> ProjectionReport:
    """Projecting a strategy onto the span of the target states scales its
    value by 1/Tr(rho* G), so leaving the span can never help.

    ``states`` holds the d=3 kets of both target sets, embedded in the span
    of the first two basis vectors; G is the projector onto that plane.
    Both sides of the identity are evaluated directly from the weighted
    overlap objective to the stated 1e-12.
    """
    rho = rho_star.matrix
    d = rho_star.dim
    if d != 3:
        raise ValueError("check is defined for dimension 3")
    proj = np.zeros((d, d), dtype=complex)
    proj[0, 0] = proj[1, 1] = 1.0
    for group in states:
        for ket in group:
            k = np.asarray(ket, dtype=complex).reshape(d)
            if abs(k[2]) > TOL:
                raise SpanViolation(f"state component {abs(k[2]):.3e} outside the plane")

    trace_in_span = float(np.trace(proj @ rho @ proj).real)

    def objective(weighted: Sequence[tuple[float, np.ndarray]], group) -> float:
        total = 0.0
        for (q, sigma), ket in zip(weighted, group):
            k = np.asarray(ket, dtype=complex).reshape(d)
            total += float((k.conj() @ (q * sigma) @ k).real)
        return total

    original = 0.0
    projected = 0.0
    for decomp, group in zip(decomps, states):
        if len(decomp.weights) != len(group):
            raise ValueError("decomposition size does not match the state set")
        pairs = list(zip(decomp.weights, decomp.elements))
        original += 0.5 * objective(pairs, group)
        shrunk = [
            (1.0, proj @ (q * np.asarray(s, dtype=complex)) @ proj / trace_in_span)
            for q, s in pairs
        ]
        projected += 0.5 * objective(shrunk, group)

    ratio = projected / original if original > 0 else float("nan")
    residual = abs(projected - original / trace_in_span)
    return ProjectionReport(
        trace_in_span,
        original,
        projected,
        ratio,
        residual,
        improved=trace_in_span < 1.0 - 1e-12,
    )
