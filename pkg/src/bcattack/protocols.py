"""Built-in protocol families, trade-off curves and fair points.

Five named families ship as built-ins:

  bb84                 {|0>,|1>} vs {|+>,|->}; crossing chords, certainty
  aharonov (theta)     parallel chords at heights +-cos(2 theta)
  two-state (gamma)    single states |0> and |gamma>
  skew (theta, phi)    aharonov's bit-1 chord rotated by phi/2 about z,
                       so the chords meet the z axis at angle phi/2
  one-two (alpha)      |0> against the chord {|alpha>, |-alpha>}

aharonov, two-state and skew share the circular trade-off
(pu - 1/2)^2 + (pe - 1/2)^2 = 1/4; one-two obeys
2 (pu - 1/2)^2 + (pe - 1/2) = 1/2, which is strictly better for the
committer-side bound at a given concealment.
"""

from __future__ import annotations

import numpy as np

from .attack import ProtocolSpec, tradeoff_point
from .qubit import QubitState

GOLDEN_ALPHA = float(np.arccos((np.sqrt(5.0) - 1.0) / 2.0))


def bb84() -> ProtocolSpec:
    return ProtocolSpec(
        "bb84",
        ((0.5, QubitState(0.0)), (0.5, QubitState(np.pi / 2))),
        ((0.5, QubitState(np.pi / 4)), (0.5, QubitState(np.pi / 4, np.pi))),
    )


def aharonov(theta: float = np.pi / 8) -> ProtocolSpec:
    if not 0 < theta <= np.pi / 4:
        raise ValueError("theta must lie in (0, pi/4]")
    return ProtocolSpec(
        "aharonov",
        ((0.5, QubitState(theta)), (0.5, QubitState(-theta))),
        ((0.5, QubitState(np.pi / 2 - theta)), (0.5, QubitState(np.pi / 2 + theta))),
    )


def two_state(gamma: float = np.pi / 4) -> ProtocolSpec:
    if not 0 < gamma <= np.pi / 2:
        raise ValueError("gamma must lie in (0, pi/2]")
    return ProtocolSpec(
        "two-state",
        ((1.0, QubitState(0.0)),),
        ((1.0, QubitState(gamma)),),
    )


def skew(theta: float = np.pi / 8, phi: float = np.pi) -> ProtocolSpec:
    if not 0 < theta <= np.pi / 4:
        raise ValueError("theta must lie in (0, pi/4]")
    if not 0 < phi < 2 * np.pi:
        raise ValueError("phi must lie in (0, 2 pi)")
    half = phi / 2
    return ProtocolSpec(
        "skew",
        ((0.5, QubitState(theta)), (0.5, QubitState(-theta))),
        (
            (0.5, QubitState(np.pi / 2 - theta, half)),
            (0.5, QubitState(np.pi / 2 + theta, half)),
        ),
    )


def one_two(alpha: float = GOLDEN_ALPHA) -> ProtocolSpec:
    if not 0 < alpha <= np.pi / 2:
        raise ValueError("alpha must lie in (0, pi/2]")
    pair = (QubitState(alpha), QubitState(-alpha))
    if np.linalg.norm(pair[0].bloch() - pair[1].bloch()) < 1e-9:
        # alpha = pi/2: |alpha> and |-alpha> coincide up to phase and the
        # chord collapses to the single point |1>.
        bit1 = ((1.0, pair[0]),)
    else:
        bit1 = ((0.5, pair[0]), (0.5, pair[1]))
    return ProtocolSpec("one-two", ((1.0, QubitState(0.0)),), bit1)


# name -> (factory, swept parameter, (low, high] sweep range)
FAMILIES = {
    "aharonov": (aharonov, "theta", (0.0, np.pi / 4)),
    "two-state": (two_state, "gamma", (0.0, np.pi / 2)),
    "skew": (skew, "theta", (0.0, np.pi / 4)),
    "one-two": (one_two, "alpha", (0.0, np.pi / 2)),
}

BUILTINS = {
    "bb84": bb84,
    "aharonov": aharonov,
    "two-state": two_state,
    "skew": skew,
    "one-two": one_two,
}


def build(name: str, **params) -> ProtocolSpec:
    if name not in BUILTINS:
        raise KeyError(f"unknown built-in {name!r} (have {sorted(BUILTINS)})")
    return BUILTINS[name](**params)


def aharonov_legacy_bound(theta: float) -> float:
    """Previously published upper bound for the aharonov family.

    (1 + (sqrt(1 + 2 cos^2 2theta) - 1) / cos^2 2theta) / 2; at theta = pi/8
    this is (sqrt(8) - 1)/2, strictly above the exact value for every
    theta in (0, pi/4).
    """
    c2 = np.cos(2 * theta) ** 2
    return 0.5 * (1 + (np.sqrt(1 + 2 * c2) - 1) / c2)


def identity_residual(family: str, pe: float, pu: float) -> float:
    """Residual of the family's exact trade-off relation at (pe, pu)."""
    if family in ("aharonov", "two-state", "skew"):
        return (pu - 0.5) ** 2 + (pe - 0.5) ** 2 - 0.25
    if family == "one-two":
        return 2 * (pu - 0.5) ** 2 + (pe - 0.5) - 0.5
    raise KeyError(f"no trade-off identity for {family!r}")


def tradeoff_curve(family: str, steps: int, **fixed) -> list[tuple[float, float, float, float]]:
    """(param, pe_max, pu_max, identity_residual) at `steps` points.

    Parameters are sampled on the half-open range (low, high], endpoint
    included.
    """
    if steps < 2:
        raise ValueError("steps must be at least 2")
    factory, pname, (lo, hi) = FAMILIES[family]
    rows = []
    for i in range(steps):
        param = lo + (hi - lo) * (i + 1) / steps
        pe, pu = tradeoff_point(factory(**{pname: param, **fixed}))
        rows.append((param, pe, pu, identity_residual(family, pe, pu)))
    return rows


def fair_point(family: str, tol: float = 1e-12, **fixed) -> tuple[float, float]:
    """Parameter with pe_max = pu_max and the common value, by bisection."""
    factory, pname, (lo, hi) = FAMILIES[family]

    def gap(param: float) -> float:
        pe, pu = tradeoff_point(factory(**{pname: param, **fixed}))
        return pe - pu

    a, b = lo + (hi - lo) * 1e-6, hi
    ga, gb = gap(a), gap(b)
    if ga * gb > 0:
        raise ValueError(f"no sign change for {family!r} on the sweep range")
    while b - a > tol:
        mid = 0.5 * (a + b)
        gm = gap(mid)
        if ga * gm <= 0:
            b, gb = mid, gm
        else:
            a, ga = mid, gm
    param = 0.5 * (a + b)
    pe, pu = tradeoff_point(factory(**{pname: param, **fixed}))
    return param, 0.5 * (pe + pu)
