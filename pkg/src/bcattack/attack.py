"""Optimal entanglement-assisted cheating for 1- and 2-state qubit commitments.

Everything is phrased on the Bloch ball.  For a fixed submitted operator at
point r, the best decomposition for unveiling against a 2-state set is the
chord through r parallel to the chord spanned by the two target states; its
value has a closed form.  Optimizing that value over r splits into a handful
of geometric cases (intersecting polytopes, parallel chords, an interior
critical point, or a surface midpoint), each with an exact answer.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .decomp import ConvexDecomposition, StatePolytope, certainty_region, decomposes
from .estimation import helstrom_pe
from .qubit import (
    TOL,
    InternalMismatch,
    QubitState,
    bloch_to_density,
    check_density,
    density_to_bloch,
)

# Chords are treated as parallel below this threshold on |d0 x d1|.
PARALLEL_TOL = 1e-9


class ParentMismatch(ValueError):
    """Decomposition does not decompose the submitted operator."""


class DegenerateStates(ValueError):
    """The two target states coincide."""


class UnsupportedSetSize(ValueError):
    """The optimizer only covers sets of one or two linearly independent states."""


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def _closest_pair(b0: list[np.ndarray], b1: list[np.ndarray]) -> tuple[int, int]:
    """Indices of the closest cross-set endpoint pair, lexicographic ties."""
    best = None
    for i, u in enumerate(b0):
        for j, v in enumerate(b1):
            dist = float(np.linalg.norm(u - v))
            if best is None or dist < best[0] - 1e-12:
                best = (dist, i, j)
    return best[1], best[2]


def _rotated(entries, first):
    return (entries[first],) + tuple(e for k, e in enumerate(entries) if k != first)


@dataclass(frozen=True)
class ProtocolSpec:
    """Two target-state sets with the honest sampling probabilities.

    On construction the sets are re-indexed so that the first elements of the
    two sets are the closest endpoint pair on the Bloch ball (equivalently,
    the cross-set pair of largest overlap magnitude), with ties kept in load
    order.  Anti-parallel chords are relabelled into the parallel orientation
    before re-indexing is re-applied.
    """

    name: str
    bit0: tuple[tuple[float, QubitState], ...]
    bit1: tuple[tuple[float, QubitState], ...]

    def __post_init__(self):
        bit0 = tuple((float(p), s) for p, s in self.bit0)
        bit1 = tuple((float(p), s) for p, s in self.bit1)
        for label, entries in (("bit0", bit0), ("bit1", bit1)):
            if len(entries) < 1:
                raise ValueError(f"{label} has no states")
            total = sum(p for p, _ in entries)
            if abs(total - 1.0) > TOL:
                raise ValueError(f"{label} probabilities sum to {total:.12g}")
            if min(p for p, _ in entries) < -TOL:
                raise ValueError(f"{label} has a negative probability")
            blochs = [s.bloch() for _, s in entries]
            for i in range(len(blochs)):
                for j in range(i + 1, len(blochs)):
                    if np.linalg.norm(blochs[i] - blochs[j]) < 1e-9:
                        raise ValueError(f"{label} states {i} and {j} coincide")
        if len(bit0) <= 2 and len(bit1) <= 2:
            bit0, bit1 = _canonicalize(bit0, bit1)
        object.__setattr__(self, "bit0", bit0)
        object.__setattr__(self, "bit1", bit1)

    def states(self, bit: int) -> tuple[QubitState, ...]:
        return tuple(s for _, s in (self.bit0 if bit == 0 else self.bit1))

    def probs(self, bit: int) -> tuple[float, ...]:
        return tuple(p for p, _ in (self.bit0 if bit == 0 else self.bit1))

    def honest_density(self, bit: int) -> np.ndarray:
        acc = np.zeros((2, 2), dtype=complex)
        for p, s in (self.bit0 if bit == 0 else self.bit1):
            acc += p * s.projector()
        return acc

    def swapped(self) -> "ProtocolSpec":
        return ProtocolSpec(self.name, self.bit1, self.bit0)


def _canonicalize(bit0, bit1):
    b0 = [s.bloch() for _, s in bit0]
    b1 = [s.bloch() for _, s in bit1]
    i, j = _closest_pair(b0, b1)
    bit0 = _rotated(bit0, i)
    bit1 = _rotated(bit1, j)
    if len(bit0) == 2 and len(bit1) == 2:
        d0 = _unit(bit0[0][1].bloch() - bit0[1][1].bloch())
        d1 = _unit(bit1[0][1].bloch() - bit1[1][1].bloch())
        if np.linalg.norm(np.cross(d0, d1)) < PARALLEL_TOL and d0 @ d1 < 0:
            # Parallel as lines but oppositely oriented: swap the second set
            # and redo the re-indexing.  (The closest-pair convention already
            # forces same orientation, so this is a safety net.)
            bit1 = (bit1[1], bit1[0])
            b1 = [s.bloch() for _, s in bit1]
            i, j = _closest_pair([s.bloch() for _, s in bit0], b1)
            bit0 = _rotated(bit0, i)
            bit1 = _rotated(bit1, j)
    return bit0, bit1


@dataclass(frozen=True)
class CheatStrategy:
    """Submitted operator plus one realized decomposition per unveiled bit.

    ``announceb[k]`` is the index of the target state announced when the
    decomposition for bit b collapses onto element k.
    """

    rho: np.ndarray
    decomp0: ConvexDecomposition
    decomp1: ConvexDecomposition
    announce0: tuple[int, ...]
    announce1: tuple[int, ...]

    def __post_init__(self):
        rho = check_density(self.rho)
        object.__setattr__(self, "rho", rho)
        for decomp, announce in ((self.decomp0, self.announce0), (self.decomp1, self.announce1)):
            if np.max(np.abs(decomp.parent - rho)) > 1e-8:
                raise ParentMismatch("decomposition parent differs from rho")
            if len(announce) != decomp.size:
                raise ValueError("announcement map is not total")


@dataclass(frozen=True)
class FamilySegment:
    """One-parameter family of optimal submitted operators.

    Points are base + lam * direction for lam in [0, lambda_max]; the base
    (lam = 0) is a pure state, so the canonical representative needs no
    entanglement.
    """

    base: np.ndarray
    direction: np.ndarray
    lambda_max: float

    def point(self, lam: float) -> np.ndarray:
        return self.base + lam * self.direction


@dataclass(frozen=True)
class GeometryFrame:
    """Chord directions and, when they are not parallel, the oblique frame."""

    d0: np.ndarray
    d1: np.ndarray
    n: Optional[np.ndarray]
    d0_perp: Optional[np.ndarray]
    d1_perp: Optional[np.ndarray]
    gamma0: Optional[float]
    gamma1: Optional[float]

    @property
    def parallel(self) -> bool:
        return self.n is None


@dataclass(frozen=True)
class AttackReport:
    """Optimal attack: value, submitted operator, case and full strategy."""

    p_u_max: float
    rho_opt: np.ndarray
    case_tag: str
    strategy: CheatStrategy
    p_ub0: float
    p_ub1: float
    family: Optional[FamilySegment] = None

    def __post_init__(self):
        if not (0.5 - TOL <= self.p_u_max <= 1.0 + TOL):
            raise ValueError(f"p_u_max {self.p_u_max!r} outside [1/2, 1]")


def p_ub(
    rho: np.ndarray,
    decomp: ConvexDecomposition,
    announce: Sequence[int],
    states: Sequence[QubitState],
) -> float:
    """Probability of passing the projector test for bit b.

    sum_k q_k <psi_announce(k)| sigma_k |psi_announce(k)>.  Merging elements
    that announce the same index leaves the value unchanged, which is why
    n_b-element decompositions suffice.
    """
    rho = check_density(rho)
    if np.max(np.abs(decomp.parent - rho)) > 1e-8:
        raise ParentMismatch("decomposition does not decompose rho")
    if len(announce) != decomp.size:
        raise ValueError("announcement map is not total on the decomposition")
    total = 0.0
    for q, sigma, idx in zip(decomp.weights, decomp.elements, announce):
        if q < 1e-12:
            continue
        if not 0 <= idx < len(states):
            raise ValueError(f"announced index {idx} out of range")
        k = states[idx].ket()
        total += q * float((k.conj() @ sigma @ k).real)
    return float(total)


def p_u(strategy: CheatStrategy, protocol: ProtocolSpec) -> float:
    """Probability of unveiling the bit of the committer's choosing."""
    pu0 = p_ub(strategy.rho, strategy.decomp0, strategy.announce0, protocol.states(0))
    pu1 = p_ub(strategy.rho, strategy.decomp1, strategy.announce1, protocol.states(1))
    return 0.5 * (pu0 + pu1)


def optimal_decomposition_fixed_rho(
    rho: np.ndarray, states: Sequence[QubitState]
) -> tuple[ConvexDecomposition, tuple[int, ...], float]:
    """Best decomposition of a fixed rho against a 2-state target set.

    For mixed rho this is the extremal pair on the chord through r parallel
    to the target chord, with Jaynes weights; element k announces state k.
    For pure rho the decomposition is trivial and the nearer state is
    announced (ties toward the first).
    """
    if len(states) != 2:
        raise ValueError("expected exactly two target states")
    a1 = states[0].bloch()
    a2 = states[1].bloch()
    gap = np.linalg.norm(a1 - a2)
    if gap < 1e-9:
        raise DegenerateStates("target states coincide")
    rho = check_density(rho)
    r = density_to_bloch(rho)
    rr = float(r @ r)
    if rr >= (1.0 - TOL) ** 2:
        # Pure: no freedom, only the announcement choice.
        v1 = 0.5 * (1 + float(a1 @ r))
        v2 = 0.5 * (1 + float(a2 @ r))
        k = 0 if v1 >= v2 else 1
        return ConvexDecomposition.trivial(rho), (k,), max(v1, v2)
    d = (a1 - a2) / gap
    rd = float(r @ d)
    root = np.sqrt(max(1.0 - rr + rd * rd, 0.0))
    s1 = r + (-rd + root) * d
    s2 = r + (-rd - root) * d
    q1 = 0.5 * (1 - rr) / (1 - float(r @ s1))
    q2 = 0.5 * (1 - rr) / (1 - float(r @ s2))
    total = q1 + q2
    q1, q2 = q1 / total, q2 / total
    decomp = ConvexDecomposition(
        rho, (q1, q2), (bloch_to_density(s1), bloch_to_density(s2))
    )
    value = 0.5 * (1 + float(a1 @ r) + (-rd + root) * float(a1 @ d))
    return decomp, (0, 1), value


def p_ub_max_values(points: np.ndarray, states: Sequence[QubitState]) -> np.ndarray:
    """Vectorized best per-bit unveiling value over Bloch points.

    Single-state sets give (1 + a.r)/2; two-state sets use the parallel-chord
    closed form, which degrades continuously to the best trivial announcement
    on the surface of the ball.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if len(states) == 1:
        return 0.5 * (1 + pts @ states[0].bloch())
    if len(states) != 2:
        raise UnsupportedSetSize(f"{len(states)} states in one set")
    a1 = states[0].bloch()
    a2 = states[1].bloch()
    d = _unit(a1 - a2)
    rd = pts @ d
    rr = np.einsum("ij,ij->i", pts, pts)
    lp = -rd + np.sqrt(np.maximum(1 - rr + rd * rd, 0.0))
    return 0.5 * (1 + pts @ a1 + lp * float(a1 @ d))


def p_u_values(points: np.ndarray, protocol: ProtocolSpec) -> np.ndarray:
    """Vectorized overall value (p_ub0 + p_ub1)/2 over Bloch points."""
    return 0.5 * (
        p_ub_max_values(points, protocol.states(0))
        + p_ub_max_values(points, protocol.states(1))
    )


def geometry_frame(
    a10: np.ndarray, a20: np.ndarray, a11: np.ndarray, a21: np.ndarray
) -> GeometryFrame:
    """Chord directions d_b and the normal frame used by the interior case."""
    d0 = _unit(np.asarray(a10, dtype=float) - np.asarray(a20, dtype=float))
    d1 = _unit(np.asarray(a11, dtype=float) - np.asarray(a21, dtype=float))
    cross = np.cross(d0, d1)
    sin_angle = float(np.linalg.norm(cross))
    if sin_angle < PARALLEL_TOL:
        return GeometryFrame(d0, d1, None, None, None, None, None)
    n = cross / sin_angle
    d0_perp = np.cross(d0, n)
    d1_perp = np.cross(d1, n)
    gamma0 = float(np.sqrt(1 - (a10 @ n) ** 2))
    gamma1 = float(np.sqrt(1 - (a11 @ n) ** 2))
    return GeometryFrame(d0, d1, n, d0_perp, d1_perp, gamma0, gamma1)


def _interior_candidate(
    frame: GeometryFrame, a10: np.ndarray, a11: np.ndarray
) -> np.ndarray:
    """Interior critical point of the two-chord value.

    The critical equations fix the projections x0 = r.d1_perp, x1 = r.d0_perp
    and x2 = r.n; since {d1_perp, d0_perp} are not orthogonal the point is
    recovered by solving the oblique system rather than summing projections.
    """
    n, d0, d1 = frame.n, frame.d0, frame.d1
    bign = float((a10 + a11) @ n)
    x2 = bign / np.hypot(bign, frame.gamma0 + frame.gamma1)
    root = np.sqrt(max(1 - x2 * x2, 0.0))
    x0 = float(a11 @ frame.d1_perp) / frame.gamma1 * root
    x1 = float(a10 @ frame.d0_perp) / frame.gamma0 * root
    cos_angle = float(d0 @ d1)
    sin_angle = float(np.linalg.norm(np.cross(d0, d1)))
    r_along_d0 = (x0 - cos_angle * x1) / sin_angle
    return r_along_d0 * d0 + x1 * frame.d0_perp + x2 * n


def _certainty_strategy(rho: np.ndarray, protocol: ProtocolSpec) -> CheatStrategy:
    parts = []
    for bit in (0, 1):
        states = protocol.states(bit)
        poly = StatePolytope.from_states(states)
        ok, weights = decomposes(rho, poly)
        if not ok:
            raise InternalMismatch("certainty point is not on a target polytope")
        elements = tuple(s.projector() for s in states)
        decomp = ConvexDecomposition(rho, tuple(weights), elements)
        parts.append((decomp, tuple(range(len(states)))))
    return CheatStrategy(rho, parts[0][0], parts[1][0], parts[0][1], parts[1][1])


def _bit_strategy(rho: np.ndarray, states: Sequence[QubitState]):
    if len(states) == 1:
        return ConvexDecomposition.trivial(rho), (0,)
    decomp, announce, _ = optimal_decomposition_fixed_rho(rho, states)
    return decomp, announce


def _check_family(family: FamilySegment, protocol: ProtocolSpec) -> None:
    lams = np.linspace(0.0, family.lambda_max, 5)
    pts = family.base[None, :] + lams[:, None] * family.direction[None, :]
    vals = p_u_values(pts, protocol)
    if float(vals.max() - vals.min()) > 1e-9:
        raise InternalMismatch("reported family is not value-constant")


def optimal_rho(protocol: ProtocolSpec) -> AttackReport:
    """Optimal submitted operator and strategy for a 1-or-2-state protocol.

    Dispatch: intersecting polytopes give certainty; parallel chords give a
    one-parameter family (canonical representative at lam = 0); non-parallel
    chords give the interior critical point when it lies in the ball and the
    surface midpoint of the closest endpoints otherwise; mixed 1/2-state and
    1/1-state sets are the corresponding chord-collapse limits.
    """
    n0, n1 = len(protocol.bit0), len(protocol.bit1)
    if n0 > 2 or n1 > 2:
        raise UnsupportedSetSize(f"set sizes ({n0}, {n1}) not supported")
    if n0 == 2 and n1 == 1:
        return _swap_report(optimal_rho(protocol.swapped()))

    states0, states1 = protocol.states(0), protocol.states(1)
    poly0 = StatePolytope.from_states(states0)
    poly1 = StatePolytope.from_states(states1)

    hit = certainty_region(poly0, poly1)
    if hit is not None:
        rho = bloch_to_density(hit)
        strategy = _certainty_strategy(rho, protocol)
        pu0 = p_ub(rho, strategy.decomp0, strategy.announce0, states0)
        pu1 = p_ub(rho, strategy.decomp1, strategy.announce1, states1)
        return AttackReport(1.0, hit.copy(), "certainty", strategy, pu0, pu1)

    family = None
    if n0 == 2 and n1 == 2:
        a10, a11 = states0[0].bloch(), states1[0].bloch()
        frame = geometry_frame(a10, states0[1].bloch(), a11, states1[1].bloch())
        if frame.parallel:
            if frame.d0 @ frame.d1 < 0:
                raise InternalMismatch("anti-parallel chords after canonicalization")
            base = _unit(a10 + a11)
            family = FamilySegment(base, -frame.d0, 2 * float(base @ frame.d0))
            r_opt, case = base, "parallel-family"
            value = 0.5 + 0.25 * float(np.linalg.norm(a10 + a11))
        else:
            r_max = _interior_candidate(frame, a10, a11)
            if np.linalg.norm(r_max) <= 1.0 + 1e-12:
                r_opt, case = r_max, "interior-max"
                value = float(p_u_values(r_max[None, :], protocol)[0])
            else:
                r_opt, case = _unit(a10 + a11), "surface-midpoint"
                value = float(p_u_values(r_opt[None, :], protocol)[0])
    elif n0 == 1 and n1 == 2:
        a0 = states0[0].bloch()
        a11 = states1[0].bloch()
        d1 = _unit(a11 - states1[1].bloch())
        if abs(float(a0 @ d1)) < 1e-9:
            # Equal overlaps with both chord endpoints: a family survives.
            base = _unit(a0 + a11)
            family = FamilySegment(base, -d1, 2 * float(base @ d1))
            r_opt, case = base, "single-double-symmetric"
        else:
            r_opt, case = _unit(a0 + a11), "single-double-asymmetric"
        value = 0.5 + 0.25 * float(np.linalg.norm(a0 + a11))
    else:  # n0 == n1 == 1
        a0, a1 = states0[0].bloch(), states1[0].bloch()
        if 0.5 * (1 + float(a0 @ a1)) < TOL:
            # Orthogonal targets: every rho gives exactly 1/2; report the
            # centre of the ball as the canonical representative.
            r_opt, case, value = np.zeros(3), "single-single-orthogonal", 0.5
        else:
            r_opt, case = _unit(a0 + a1), "single-single"
            value = 0.5 + 0.25 * float(np.linalg.norm(a0 + a1))

    if family is not None:
        _check_family(family, protocol)

    rho = bloch_to_density(r_opt)
    decomp0, announce0 = _bit_strategy(rho, states0)
    decomp1, announce1 = _bit_strategy(rho, states1)
    strategy = CheatStrategy(rho, decomp0, decomp1, announce0, announce1)
    pu0 = p_ub(rho, decomp0, announce0, states0)
    pu1 = p_ub(rho, decomp1, announce1, states1)
    if case != "single-single-orthogonal" and abs(0.5 * (pu0 + pu1) - value) > 1e-9:
        raise InternalMismatch(
            f"strategy value {0.5 * (pu0 + pu1)!r} differs from case value {value!r}"
        )
    value = min(value, 1.0)
    return AttackReport(value, np.asarray(r_opt, dtype=float), case, strategy, pu0, pu1, family)


def _swap_report(report: AttackReport) -> AttackReport:
    swapped = CheatStrategy(
        report.strategy.rho,
        report.strategy.decomp1,
        report.strategy.decomp0,
        report.strategy.announce1,
        report.strategy.announce0,
    )
    return AttackReport(
        report.p_u_max,
        report.rho_opt,
        report.case_tag,
        swapped,
        report.p_ub1,
        report.p_ub0,
        report.family,
    )


def p_u_max(protocol: ProtocolSpec) -> float:
    """Best achievable unveiling probability for the protocol."""
    return optimal_rho(protocol).p_u_max


def tradeoff_point(protocol: ProtocolSpec) -> tuple[float, float]:
    """(best estimation probability, best unveiling probability)."""
    pe = helstrom_pe(protocol.honest_density(0), protocol.honest_density(1))
    return pe, p_u_max(protocol)
