import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bcattack.qubit import (
    IDENTITY,
    BallViolation,
    InvalidDensity,
    NegativeEigenvalue,
    QubitState,
    bloch_to_density,
    check_density,
    density_to_bloch,
    eig2_hermitian,
    is_pure,
    ket_to_state,
    matrix_sqrt_psd,
    overlap,
    support_projector,
    trace_distance,
)
from conftest import random_mixed_density, random_state

KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)
PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)


def proj(ket):
    return np.outer(ket, ket.conj())


class TestBlochMaps:
    def test_centre_is_maximally_mixed(self):
        np.testing.assert_allclose(bloch_to_density([0, 0, 0]), IDENTITY / 2)

    def test_north_pole_is_ground_projector(self):
        np.testing.assert_allclose(bloch_to_density([0, 0, 1]), proj(KET0), atol=1e-15)

    def test_tilted_unit_vector_is_pi8_projector(self):
        r = np.array([1, 0, 1]) / np.sqrt(2)
        expected = QubitState(np.pi / 8, 0.0).projector()
        np.testing.assert_allclose(bloch_to_density(r), expected, atol=1e-15)
        np.testing.assert_allclose(density_to_bloch(expected), r, atol=1e-12)

    def test_ball_violation(self):
        with pytest.raises(BallViolation):
            bloch_to_density([1.1, 0, 0])

    def test_bloch_of_basis_states(self):
        np.testing.assert_allclose(density_to_bloch(IDENTITY / 2), np.zeros(3), atol=1e-15)
        np.testing.assert_allclose(density_to_bloch(proj(KET1)), [0, 0, -1], atol=1e-15)

    def test_bloch_map_is_convex(self):
        rho = 0.5 * proj(KET0) + 0.5 * proj(PLUS)
        np.testing.assert_allclose(density_to_bloch(rho), [0.5, 0, 0.5], atol=1e-15)

    def test_invalid_density_rejected(self):
        with pytest.raises(InvalidDensity):
            density_to_bloch(np.array([[0.5, 0.3], [0.1, 0.5]]))  # not Hermitian
        with pytest.raises(InvalidDensity):
            density_to_bloch(np.array([[0.9, 0], [0, 0.3]]))  # trace 1.2
        with pytest.raises(InvalidDensity):
            density_to_bloch(np.array([[1.2, 0], [0, -0.2]]))  # negative eigenvalue

    def test_round_trip_bulk(self, rng):
        for _ in range(1000):
            v = rng.standard_normal(3)
            v *= rng.uniform() / max(np.linalg.norm(v), 1e-12)
            back = density_to_bloch(bloch_to_density(v))
            assert np.linalg.norm(back - v) < 1e-12

    @settings(max_examples=100, deadline=None)
    @given(
        st.tuples(
            st.floats(-1, 1, allow_nan=False),
            st.floats(-1, 1, allow_nan=False),
            st.floats(-1, 1, allow_nan=False),
        )
    )
    def test_round_trip_property(self, xyz):
        v = np.array(xyz)
        norm = np.linalg.norm(v)
        if norm > 1:
            v = v / norm
        back = density_to_bloch(bloch_to_density(v))
        assert np.linalg.norm(back - v) < 1e-12


class TestOverlapAndDistance:
    def test_orthogonal_states_have_zero_overlap(self):
        assert overlap(proj(KET0), proj(KET1)) == pytest.approx(0.0, abs=1e-15)

    def test_mixed_self_overlap(self):
        assert overlap(IDENTITY / 2, IDENTITY / 2) == pytest.approx(0.5)

    def test_pi8_pair_overlap(self):
        # Tr(|t><t| |-t><-t|) = cos^2(2t) = 1/2 at t = pi/8, by both the
        # matrix trace and the Bloch dot product.
        a = QubitState(np.pi / 8).projector()
        b = QubitState(-np.pi / 8).projector()
        assert overlap(a, b) == pytest.approx(0.5, abs=1e-12)
        ra, rb = density_to_bloch(a), density_to_bloch(b)
        assert 0.5 * (1 + ra @ rb) == pytest.approx(0.5, abs=1e-12)

    def test_trace_distance_extremes(self):
        assert trace_distance(IDENTITY / 2, IDENTITY / 2) == 0.0
        assert trace_distance(proj(KET0), proj(KET1)) == pytest.approx(1.0)

    def test_trace_distance_of_uniform_mixtures(self):
        theta = np.pi / 8
        rho0 = 0.5 * QubitState(theta).projector() + 0.5 * QubitState(-theta).projector()
        rho1 = (
            0.5 * QubitState(np.pi / 2 - theta).projector()
            + 0.5 * QubitState(np.pi / 2 + theta).projector()
        )
        assert trace_distance(rho0, rho1) == pytest.approx(np.cos(np.pi / 4), abs=1e-12)

    def test_route_agreement_bulk(self, rng):
        for _ in range(1000):
            a = random_mixed_density(rng, rmax=1.0)
            b = random_mixed_density(rng, rmax=1.0)
            d = trace_distance(a, b)  # raises InternalMismatch beyond 1e-10
            w = np.linalg.eigvalsh(a - b)
            assert d == pytest.approx(0.5 * np.sum(np.abs(w)), abs=1e-10)

    def test_orthogonality_is_antipodality(self, rng):
        for _ in range(200):
            s1, s2 = random_state(rng), random_state(rng)
            tr = overlap(s1.projector(), s2.projector())
            dot = s1.bloch() @ s2.bloch()
            assert tr == pytest.approx(0.5 * (1 + dot), abs=1e-12)
            if abs(tr) < 1e-12:
                assert dot == pytest.approx(-1.0, abs=1e-10)


class TestSqrtAndEig:
    def test_sqrt_of_maximally_mixed(self):
        np.testing.assert_allclose(matrix_sqrt_psd(IDENTITY / 2), IDENTITY / np.sqrt(2))

    def test_projector_is_own_root(self):
        np.testing.assert_allclose(matrix_sqrt_psd(proj(KET0)), proj(KET0), atol=1e-15)

    def test_diagonal_case(self):
        np.testing.assert_allclose(
            matrix_sqrt_psd(np.diag([0.9, 0.1])),
            np.diag([np.sqrt(0.9), np.sqrt(0.1)]),
            atol=1e-15,
        )

    def test_square_recovers_input(self, rng):
        for _ in range(200):
            rho = random_mixed_density(rng, rmax=1.0)
            root = matrix_sqrt_psd(rho)
            np.testing.assert_allclose(root @ root, rho, atol=1e-12)

    def test_negative_eigenvalue_raises(self):
        with pytest.raises(NegativeEigenvalue):
            matrix_sqrt_psd(np.diag([1.5, -0.5]))

    def test_eig2_matches_numpy(self, rng):
        for _ in range(300):
            g = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
            h = g + g.conj().T
            w, v = eig2_hermitian(h)
            np.testing.assert_allclose(v @ np.diag(w) @ v.conj().T, h, atol=1e-12)
            np.testing.assert_allclose(v.conj().T @ v, np.eye(2), atol=1e-12)
            np.testing.assert_allclose(np.sort(w), np.linalg.eigvalsh(h), atol=1e-12)

    def test_purity_criterion(self, rng):
        for _ in range(200):
            pure = random_state(rng).projector()
            assert is_pure(pure, tol=1e-10)
            assert np.linalg.norm(density_to_bloch(pure)) == pytest.approx(1.0, abs=1e-10)
        for _ in range(200):
            mixed = random_mixed_density(rng, rmax=0.9)
            assert not is_pure(mixed, tol=1e-10)

    def test_support_projector_ranks(self):
        p, rank = support_projector(IDENTITY / 2)
        assert rank == 2
        np.testing.assert_allclose(p, IDENTITY)
        p, rank = support_projector(proj(KET0))
        assert rank == 1
        np.testing.assert_allclose(p, proj(KET0), atol=1e-12)


class TestQubitState:
    def test_ket_matches_angles(self):
        s = QubitState(np.pi / 8, 0.7)
        k = s.ket()
        assert k[0] == pytest.approx(np.cos(np.pi / 8))
        assert k[1] == pytest.approx(np.exp(0.7j) * np.sin(np.pi / 8))

    def test_bloch_is_unit(self, rng):
        for _ in range(100):
            assert np.linalg.norm(random_state(rng).bloch()) == pytest.approx(1.0)

    def test_ket_round_trip_ignores_global_phase(self, rng):
        for _ in range(200):
            s = random_state(rng)
            phase = np.exp(1j * rng.uniform(-np.pi, np.pi))
            back = ket_to_state(phase * s.ket())
            np.testing.assert_allclose(back.bloch(), s.bloch(), atol=1e-12)

    def test_check_density_accepts_projectors(self, rng):
        for _ in range(50):
            check_density(random_state(rng).projector())
