import math

import numpy as np
import pytest

from etclab import (
    ConfigError,
    HybridState,
    TriggerConfig,
    ZetaParams,
    in_flow,
    in_jump,
    masp,
    zeta_time,
)
from oracles import zeta_transit_time_reference


class TestMasp:
    def test_equal_gains_branch(self):
        for L in (0.5, 2.0, 4.1231):
            assert masp(L, L) == 1.0 / L

    def test_planar_benchmark_value(self):
        assert masp(17.3495, 4.1231) == pytest.approx(0.0790, abs=5e-4)

    def test_zero_growth_limit(self):
        # L = 0 limit is pi / (2 gamma); cross-checked by the transit-time oracle.
        gamma = 18.2574
        value = masp(gamma, 0.0)
        assert value == pytest.approx(math.pi / (2 * gamma), rel=1e-12)
        assert value == pytest.approx(0.08603, abs=1e-4)
        oracle = zeta_transit_time_reference(gamma, 0.0, theta=1e-5, eta=1e-8)
        assert value == pytest.approx(oracle, abs=1e-4)

    def test_arctanh_branch(self):
        value = masp(1.0, 2.0)
        assert value == pytest.approx(0.7603, abs=1e-4)
        oracle = zeta_transit_time_reference(1.0, 2.0, theta=1e-5, eta=1e-8)
        assert value == pytest.approx(oracle, abs=1e-4)

    def test_zero_gamma_diverges(self):
        assert masp(0.0, 2.0) == math.inf

    def test_degenerate_error(self):
        with pytest.raises(ConfigError):
            masp(0.0, 0.0)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            masp(-1.0, 1.0)

    def test_continuity_across_seam(self):
        for L in (0.5, 1.0, 4.1231):
            for side in (1.0 - 1e-6, 1.0 + 1e-6):
                assert abs(masp(L * side, L) - 1.0 / L) <= 1e-4

    def test_nonincreasing_in_both_gains(self):
        grid = [0.3, 0.7, 1.1, 2.5, 6.0, 15.0]
        for L in grid:
            values = [masp(g, L) for g in grid]
            assert all(a >= b - 1e-12 for a, b in zip(values, values[1:]))
        for g in grid:
            values = [masp(g, L) for L in grid]
            assert all(a >= b - 1e-12 for a, b in zip(values, values[1:]))


class TestZetaTime:
    def test_theta_near_one_gives_tiny_transit(self):
        assert zeta_time(2.0, 1.0, ZetaParams(theta=0.999, eta=0.01)) < 1e-3

    def test_below_masp(self):
        zp = ZetaParams(theta=0.01, eta=0.01)
        assert zeta_time(17.3495, 4.1231, zp) < masp(17.3495, 4.1231)

    def test_monotone_decreasing_in_theta_and_eta(self):
        grid = (0.01, 0.1, 0.5)
        table = {
            (th, eta): zeta_time(17.3495, 4.1231, ZetaParams(th, eta))
            for th in grid
            for eta in grid
        }
        for eta in grid:
            col = [table[(th, eta)] for th in grid]
            assert col[0] > col[1] > col[2]
        for th in grid:
            row = [table[(th, eta)] for eta in grid]
            assert row[0] > row[1] > row[2]

    def test_converges_to_masp(self):
        zp = ZetaParams(theta=1e-4, eta=1e-6)
        assert zeta_time(17.3495, 4.1231, zp) == pytest.approx(
            masp(17.3495, 4.1231), abs=1e-3
        )

    def test_matches_quadrature_oracle(self):
        zp = ZetaParams(theta=0.05, eta=0.02)
        oracle = zeta_transit_time_reference(3.0, 1.5, theta=0.05, eta=0.02)
        assert zeta_time(3.0, 1.5, zp) == pytest.approx(oracle, abs=1e-6)


class TestTriggerConfig:
    def test_pure_event_requires_zero_dwell(self):
        with pytest.raises(ConfigError):
            TriggerConfig(mode="pure-event", T=0.1, sigma=0.5)

    def test_state_feedback_requires_sigma(self):
        with pytest.raises(ConfigError):
            TriggerConfig(mode="state-feedback", T=0.05)

    def test_unknown_mode(self):
        with pytest.raises(ConfigError):
            TriggerConfig(mode="self-triggered", T=0.1)

    def test_dwell_must_stay_below_ceiling(self, tabuada):
        _, cert = tabuada
        cfg = TriggerConfig(mode="state-feedback", T=0.1, sigma=0.5)
        with pytest.raises(ConfigError, match="dwell time exceeds MASP"):
            cfg.validate_against(cert)
        TriggerConfig(mode="state-feedback", T=0.075, sigma=0.5).validate_against(cert)


class TestFlowJumpSets:
    def test_zero_clock_always_flows(self, tabuada, rng):
        _, cert = tabuada
        cfg = TriggerConfig(mode="state-feedback", T=0.075, sigma=0.5)
        for _ in range(20):
            q = HybridState(rng.standard_normal(2), rng.standard_normal(2), 0.0)
            assert in_flow(q, cert, cfg)

    def test_boundary_belongs_to_both_sets(self, tabuada):
        _, cert = tabuada
        cfg = TriggerConfig(mode="output-feedback", T=0.075)
        # Construct gamma^2 W(e)^2 == delta(y) exactly: both are zero at x = 0
        # with e = 0; use the equality case with tau > T.
        q = HybridState(np.zeros(2), np.zeros(2), 0.2)
        assert in_flow(q, cert, cfg)
        assert in_jump(q, cert, cfg)

    def test_pure_event_flows_with_zero_error(self, tabuada):
        _, cert = tabuada
        cfg = TriggerConfig(mode="pure-event", T=0.0, sigma=0.5)
        q = HybridState(np.array([1.0, -2.0]), np.zeros(2), 0.0)
        assert in_flow(q, cert, cfg)
        assert not in_jump(q, cert, cfg)

    def test_jump_set_examples(self, tabuada):
        _, cert = tabuada
        cfg = TriggerConfig(mode="state-feedback", T=0.075, sigma=0.5)
        x = np.array([0.1, 0.0])
        big_e = np.array([5.0, 5.0])
        # tau = T with the excess positive: in D.
        assert in_jump(HybridState(x, big_e, 0.075), cert, cfg)
        # tau < T: never in D.
        assert not in_jump(HybridState(x, big_e, 0.05), cert, cfg)
        # origin with tau = T: equality case drives periodic sampling.
        assert in_jump(HybridState(np.zeros(2), np.zeros(2), 0.075), cert, cfg)

    def test_periodic_mode(self, tabuada):
        _, cert = tabuada
        cfg = TriggerConfig(mode="periodic", T=0.05)
        q = HybridState(np.ones(2), np.ones(2), 0.02)
        assert in_flow(q, cert, cfg)
        assert not in_jump(q, cert, cfg)
        assert in_jump(HybridState(q.x, q.e, 0.05), cert, cfg)

    def test_mode_certificate_mismatch(self, lorenz):
        _, cert = lorenz  # output certificate: n_y = 1 < n_x = 3
        cfg = TriggerConfig(mode="state-feedback", T=0.005, sigma=0.5)
        q = HybridState(np.zeros(3), np.zeros(1), 0.0)
        with pytest.raises(ConfigError):
            in_flow(q, cert, cfg)
