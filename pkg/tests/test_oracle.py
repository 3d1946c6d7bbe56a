import numpy as np
import pytest

from bcattack import protocols
from bcattack.attack import p_u_max
from bcattack.oracle import (
    OracleConfig,
    ball_grid,
    fibonacci_sphere,
    oracle_p_u_max,
    oracle_p_u_max_detailed,
    oracle_p_ub_fixed_rho,
)
from bcattack.qubit import IDENTITY, QubitState, bloch_to_density
from conftest import random_mixed_density, random_protocol, random_state_set

FAIR = 0.5 + 0.5 / np.sqrt(2)


def test_fibonacci_sphere_is_unit_and_spread():
    pts = fibonacci_sphere(500)
    np.testing.assert_allclose(np.linalg.norm(pts, axis=1), 1.0, atol=1e-12)
    # crude uniformity: mean should be near the origin
    assert np.linalg.norm(pts.mean(axis=0)) < 0.01


def test_ball_grid_inside_ball():
    pts = ball_grid(20_000)
    assert np.max(np.linalg.norm(pts, axis=1)) <= 1 + 1e-12
    assert np.min(np.linalg.norm(pts, axis=1)) == 0.0  # centre included
    # the surface shell is present
    assert np.sum(np.abs(np.linalg.norm(pts, axis=1) - 1.0) < 1e-12) > 100


class TestDirectionalOracle:
    def test_centre_against_pi8_pair(self):
        states = [QubitState(np.pi / 8), QubitState(-np.pi / 8)]
        value = oracle_p_ub_fixed_rho(IDENTITY / 2, states, OracleConfig())
        assert value == pytest.approx(FAIR, abs=1e-6)
        assert value <= FAIR + 1e-9

    def test_pure_rho_on_target(self):
        states = [QubitState(0.3), QubitState(-0.4)]
        value = oracle_p_ub_fixed_rho(states[0].projector(), states, OracleConfig())
        assert value == pytest.approx(1.0, abs=1e-12)

    def test_rho_on_chord_reaches_one(self, rng):
        states = random_state_set(rng, 2)
        r = 0.35 * states[0].bloch() + 0.65 * states[1].bloch()
        value = oracle_p_ub_fixed_rho(bloch_to_density(r), states, OracleConfig())
        assert value == pytest.approx(1.0, abs=1e-9)

    def test_never_beats_closed_form(self, rng):
        from bcattack.attack import optimal_decomposition_fixed_rho

        cfg = OracleConfig()
        for _ in range(20):
            rho = random_mixed_density(rng, rmax=0.9)
            states = random_state_set(rng, 2)
            _, _, analytic = optimal_decomposition_fixed_rho(rho, states)
            brute = oracle_p_ub_fixed_rho(rho, states, cfg)
            assert brute <= analytic + 1e-9
            assert abs(brute - analytic) < 1e-6


class TestBallOracle:
    def test_bb84_reaches_one(self):
        value, argmax = oracle_p_u_max(protocols.bb84(), OracleConfig(rho_grid=60_000))
        assert value == pytest.approx(1.0, abs=1e-9)
        assert np.linalg.norm(argmax) < 0.05

    def test_aharonov_within_tolerances(self):
        run = oracle_p_u_max_detailed(protocols.aharonov(np.pi / 8), OracleConfig())
        assert abs(run.stage_values[0] - FAIR) < 1e-4
        assert abs(run.value - FAIR) < 1e-7
        assert run.value <= FAIR + 1e-9

    def test_one_two_fair_value(self):
        run = oracle_p_u_max_detailed(
            protocols.one_two(protocols.GOLDEN_ALPHA), OracleConfig()
        )
        assert abs(run.value - 0.809016994375) < 1e-6

    def test_refinement_monotone_and_convergent(self):
        for protocol in (
            protocols.aharonov(0.3),
            protocols.two_state(0.8),
            protocols.skew(0.35, 2.0),
            protocols.one_two(0.7),
        ):
            analytic = p_u_max(protocol)
            base = oracle_p_u_max_detailed(
                protocol, OracleConfig(rho_grid=40_000, refine_rounds=3)
            )
            deeper = oracle_p_u_max_detailed(
                protocol, OracleConfig(rho_grid=40_000, refine_rounds=6)
            )
            # the incumbent is a running max: stages never decrease and extra
            # rounds can only help
            for run in (base, deeper):
                assert np.all(np.diff(run.stage_values) >= -1e-15)
            assert deeper.value >= base.value
            assert abs(deeper.value - analytic) <= abs(base.value - analytic)
            assert abs(base.stage_values[-1] - analytic) <= abs(
                base.stage_values[0] - analytic
            )

    def test_doubling_direction_grid_never_decreases(self, rng):
        # non-decreasing at the oracle's own precision scale (refinement
        # converges to ~1e-10 in value)
        for _ in range(10):
            rho = random_mixed_density(rng, rmax=0.9)
            states = random_state_set(rng, 2)
            small = oracle_p_ub_fixed_rho(rho, states, OracleConfig(direction_grid=256))
            big = oracle_p_ub_fixed_rho(rho, states, OracleConfig(direction_grid=512))
            assert big >= small - 1e-9

    def test_guard_recheck_stays_small(self, rng):
        protocol = random_protocol(rng, 2, 2)
        run = oracle_p_u_max_detailed(
            protocol, OracleConfig(rho_grid=60_000), recheck_fraction=1e-4
        )
        assert run.recheck_points >= 1
        assert run.recheck_max_excess <= 1e-9
        assert run.recheck_max_gap <= 1e-6

    def test_determinism(self):
        cfg = OracleConfig(rho_grid=30_000)
        a = oracle_p_u_max_detailed(protocols.skew(0.3, 1.2), cfg)
        b = oracle_p_u_max_detailed(protocols.skew(0.3, 1.2), cfg)
        assert a.value == b.value
        np.testing.assert_array_equal(a.argmax, b.argmax)
        assert a.stage_values == b.stage_values

    def test_thread_cap_matches_serial(self, monkeypatch):
        cfg = OracleConfig(rho_grid=80_000)
        serial = oracle_p_u_max_detailed(protocols.aharonov(0.4), cfg)
        monkeypatch.setenv("BCATTACK_THREADS", "3")
        threaded = oracle_p_u_max_detailed(protocols.aharonov(0.4), cfg)
        assert threaded.value == pytest.approx(serial.value, abs=1e-15)
