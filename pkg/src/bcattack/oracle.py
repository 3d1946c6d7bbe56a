"""Brute-force verification of the closed-form attack values.

Two independent search layers:

* ``oracle_p_ub_fixed_rho`` maximizes the unveiling probability of a fixed
  submitted operator over all extremal 2-element decompositions, which are
  parametrized by the chord direction through the Bloch point.  It never
  touches the closed-form optimum: each candidate is scored from the raw
  weighted-overlap objective, over a Fibonacci direction grid followed by
  golden-section refinement.

* ``oracle_p_u_max`` searches the whole ball on a radial-shell x
  Fibonacci-sphere product grid with local refinement rounds shrinking the
  search radius by 0.2.  The per-point score uses the analytic fixed-rho
  solver for speed; a configurable fraction of the best grid points is
  re-scored with the directional oracle as a guard.

No RNG is involved, so results are bit-reproducible.  Grid evaluation is
chunked; BCATTACK_THREADS caps the worker count and the chunk maxima are
reduced with an order-independent max.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .attack import ProtocolSpec, p_u_values, p_ub_max_values
from .qubit import TOL, QubitState, bloch_to_density, check_density, density_to_bloch

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class OracleConfig:
    """Grid sizes for the brute-force search.

    rho_grid: approximate number of ball sample points.
    direction_grid: chord directions per fixed-rho search.
    refine_rounds: local refinement passes (0 = raw grid only).
    """

    rho_grid: int = 1_000_000
    direction_grid: int = 512
    refine_rounds: int = 3

    def __post_init__(self):
        if self.rho_grid < 1 or self.direction_grid < 1:
            raise ValueError("grid sizes must be at least 1")
        if self.refine_rounds < 0:
            raise ValueError("refine_rounds must be non-negative")


@dataclass(frozen=True)
class OracleRun:
    """Full record of a ball search: stage_values[0] is the raw grid value."""

    value: float
    argmax: np.ndarray
    stage_values: tuple[float, ...]
    recheck_points: int
    recheck_max_gap: float
    recheck_max_excess: float


def thread_count() -> int:
    raw = os.environ.get("BCATTACK_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def fibonacci_sphere(n: int, phase: float = 0.0) -> np.ndarray:
    """n nearly-uniform unit vectors; ``phase`` decorrelates stacked shells."""
    i = np.arange(n) + 0.5
    azimuth = np.pi * (1 + np.sqrt(5.0)) * i + phase
    z = 1 - 2 * i / n
    s = np.sqrt(np.maximum(0.0, 1 - z * z))
    return np.stack([s * np.cos(azimuth), s * np.sin(azimuth), z], axis=1)


def ball_grid(n: int) -> np.ndarray:
    """Centre + volume-uniform shells + a denser surface shell.

    The explicit surface shell matters: several optima are pure states, where
    the value is linear in the radial offset and interior shells alone would
    lose accuracy.
    """
    shells = max(1, int(round((n / (4 * np.pi)) ** (1.0 / 3.0))))
    per_shell = max(64, n // shells)
    radii = ((np.arange(shells) + 0.5) / shells) ** (1.0 / 3.0)
    blocks = [np.zeros((1, 3))]
    for k, r in enumerate(radii):
        blocks.append(r * fibonacci_sphere(per_shell, phase=2.399963 * (k + 1)))
    blocks.append(fibonacci_sphere(4 * per_shell))
    return np.vstack(blocks)


def _chunked_argmax(
    score: Callable[[np.ndarray], np.ndarray], pts: np.ndarray
) -> tuple[float, np.ndarray]:
    workers = thread_count()
    if workers <= 1 or len(pts) < 65536:
        vals = score(pts)
        i = int(np.argmax(vals))
        return float(vals[i]), pts[i]
    chunks = np.array_split(pts, workers * 4)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(score, chunks))
    best_val, best_pt = -np.inf, pts[0]
    for chunk, vals in zip(chunks, results):
        i = int(np.argmax(vals))
        if vals[i] > best_val:
            best_val, best_pt = float(vals[i]), chunk[i]
    return best_val, best_pt


def _chord_scores(
    r: np.ndarray, a1: np.ndarray, a2: np.ndarray, dirs: np.ndarray
) -> np.ndarray:
    """Unveiling value of the extremal decomposition along each direction.

    Endpoints are the sphere intersections of the chord through r, weights
    follow from the decomposition constraint, and both announcement pairings
    are tried.  This is the raw objective, independent of any closed form.
    """
    rd = dirs @ r
    root = np.sqrt(np.maximum(1 - float(r @ r) + rd * rd, 0.0))
    lp, lm = -rd + root, -rd - root
    s1 = r[None, :] + lp[:, None] * dirs
    s2 = r[None, :] + lm[:, None] * dirs
    span = lp - lm
    safe = np.where(span > 1e-12, span, 1.0)
    q1 = np.where(span > 1e-12, -lm / safe, 1.0)
    q2 = 1.0 - q1
    paired = 0.5 * (1 + q1 * (s1 @ a1) + q2 * (s2 @ a2))
    flipped = 0.5 * (1 + q1 * (s1 @ a2) + q2 * (s2 @ a1))
    return np.maximum(paired, flipped)


def _golden_max(f: Callable[[float], float], lo: float, hi: float, iters: int = 32):
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(iters):
        if f1 >= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN * (hi - lo)
            f2 = f(x2)
    return (x1, f1) if f1 >= f2 else (x2, f2)


def _tangent_pair(u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    probe = np.array([1.0, 0.0, 0.0]) if abs(u[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    t1 = np.cross(u, probe)
    t1 /= np.linalg.norm(t1)
    return t1, np.cross(u, t1)


def oracle_p_ub_fixed_rho(
    rho: np.ndarray, states: Sequence[QubitState], cfg: OracleConfig = OracleConfig()
) -> float:
    """Grid + golden-section maximum of the fixed-rho unveiling value."""
    if len(states) != 2:
        raise ValueError("directional oracle expects a two-state set")
    m = check_density(rho)
    r = density_to_bloch(m)
    a1, a2 = states[0].bloch(), states[1].bloch()
    if float(r @ r) >= (1.0 - TOL) ** 2:
        return 0.5 * (1 + max(float(a1 @ r), float(a2 @ r)))
    dirs = fibonacci_sphere(cfg.direction_grid)
    vals = _chord_scores(r, a1, a2, dirs)
    i = int(np.argmax(vals))
    best_dir, best_val = dirs[i], float(vals[i])
    width = 2.5 * np.sqrt(4 * np.pi / cfg.direction_grid)
    for _ in range(max(1, cfg.refine_rounds) + 2):
        for tangent in _tangent_pair(best_dir):

            def lifted(step: float, t=tangent, base=best_dir) -> float:
                cand = base + step * t
                cand = cand / np.linalg.norm(cand)
                return float(_chord_scores(r, a1, a2, cand[None, :])[0])

            step, val = _golden_max(lifted, -width, width, iters=40)
            if val > best_val:
                best_val = val
                best_dir = best_dir + step * tangent
                best_dir /= np.linalg.norm(best_dir)
        width *= 0.3
    return best_val


def oracle_p_u_max_detailed(
    protocol: ProtocolSpec,
    cfg: OracleConfig = OracleConfig(),
    recheck_fraction: float = 1e-5,
) -> OracleRun:
    """Ball search for the best submitted operator, with guard re-checks."""

    def score(pts: np.ndarray) -> np.ndarray:
        return p_u_values(pts, protocol)

    pts = ball_grid(cfg.rho_grid)
    vals = score(pts) if thread_count() <= 1 else None
    if vals is None:
        best_val, best_pt = _chunked_argmax(score, pts)
    else:
        i = int(np.argmax(vals))
        best_val, best_pt = float(vals[i]), pts[i]
    stages = [best_val]

    # Guard: re-score a few of the best grid points with the directional
    # oracle, which shares nothing with the closed form.
    n_recheck = int(round(recheck_fraction * cfg.rho_grid))
    max_gap = 0.0
    max_excess = 0.0
    if n_recheck > 0 and any(len(protocol.states(b)) == 2 for b in (0, 1)):
        if vals is None:
            vals = score(pts)
        top = np.argsort(vals)[-n_recheck:]
        for idx in top:
            pt = pts[idx]
            rho_pt = bloch_to_density(pt / max(1.0, np.linalg.norm(pt)))
            for b in (0, 1):
                sts = protocol.states(b)
                if len(sts) != 2:
                    continue
                analytic = float(p_ub_max_values(pt[None, :], sts)[0])
                brute = oracle_p_ub_fixed_rho(rho_pt, sts, cfg)
                max_gap = max(max_gap, abs(analytic - brute))
                max_excess = max(max_excess, brute - analytic)

    radius = 0.2
    local_n = max(2000, cfg.rho_grid // 10)
    template = ball_grid(local_n)
    for _ in range(cfg.refine_rounds):
        local = best_pt[None, :] + radius * template
        norms = np.linalg.norm(local, axis=1)
        outside = norms > 1.0
        local[outside] /= norms[outside][:, None]
        local = np.vstack([best_pt[None, :], local])
        val, pt = _chunked_argmax(score, local)
        if val > best_val:
            best_val, best_pt = val, pt
        stages.append(best_val)
        radius *= 0.2

    return OracleRun(
        best_val, np.asarray(best_pt, dtype=float), tuple(stages),
        n_recheck, max_gap, max_excess,
    )


def oracle_p_u_max(
    protocol: ProtocolSpec, cfg: OracleConfig = OracleConfig()
) -> tuple[float, np.ndarray]:
    """Best grid value and its Bloch point."""
    run = oracle_p_u_max_detailed(protocol, cfg)
    return run.value, run.argmax
