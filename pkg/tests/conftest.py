import numpy as np
import pytest

from bcattack import ProtocolSpec, QubitState
from bcattack.decomp import Povm
from bcattack.qubit import bloch_to_density


def random_state(rng) -> QubitState:
    z = rng.uniform(-1.0, 1.0)
    phi = rng.uniform(-np.pi, np.pi)
    return QubitState(0.5 * np.arccos(z), phi)


def random_state_set(rng, n: int, min_gap: float = 0.15):
    """n states whose Bloch points are pairwise at least min_gap apart."""
    while True:
        states = [random_state(rng) for _ in range(n)]
        pts = [s.bloch() for s in states]
        gaps = [
            np.linalg.norm(pts[i] - pts[j])
            for i in range(n)
            for j in range(i + 1, n)
        ]
        if not gaps or min(gaps) >= min_gap:
            return states


def random_mixed_bloch(rng, rmax: float = 0.95) -> np.ndarray:
    direction = rng.standard_normal(3)
    direction /= np.linalg.norm(direction)
    return direction * rmax * rng.uniform() ** (1.0 / 3.0)


def random_mixed_density(rng, rmax: float = 0.95) -> np.ndarray:
    return bloch_to_density(random_mixed_bloch(rng, rmax))


def random_protocol(rng, n0=None, n1=None, name="random") -> ProtocolSpec:
    n0 = int(rng.integers(1, 3)) if n0 is None else n0
    n1 = int(rng.integers(1, 3)) if n1 is None else n1
    sides = []
    for n in (n0, n1):
        states = random_state_set(rng, n)
        probs = rng.uniform(0.2, 1.0, size=n)
        probs /= probs.sum()
        sides.append(tuple((float(p), s) for p, s in zip(probs, states)))
    return ProtocolSpec(name, sides[0], sides[1])


def random_povm(rng, n: int, dim: int = 2) -> Povm:
    """n-element POVM from a Gram-matrix construction (full support)."""
    blocks = []
    for _ in range(n):
        g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        blocks.append(g @ g.conj().T)
    total = sum(blocks)
    w, v = np.linalg.eigh(total)
    inv_root = (v / np.sqrt(w)) @ v.conj().T
    return Povm(tuple(inv_root @ b @ inv_root for b in blocks))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
