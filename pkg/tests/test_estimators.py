import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from paramest.errors import ConfigurationError, UnsupportedDimensionError
from paramest.estimators import (
    adjugate,
    det,
    drem_rhs,
    ge_closed_form_scalar,
    ge_rhs,
    manifold_residual,
    mge_gain,
    mge_mre_rhs,
    mge_rhs,
    mre_rhs,
    storage,
)
from paramest.filters import FilterState
from paramest.signals import regressor_from_strings
from paramest.types import EstimatorState

finite = st.floats(-10.0, 10.0, allow_nan=False)
gains = st.floats(0.05, 20.0)


def state(theta_hat, omega_ext=None, g_ext=None):
    filt = None
    if omega_ext is not None:
        filt = FilterState(np.asarray(omega_ext, float), np.asarray(g_ext, float))
    return EstimatorState(theta_hat=np.asarray(theta_hat, float), filter=filt)


class TestGradient:
    def test_zero_error_at_truth(self):
        w = np.array([1.0, 0.0])
        g = float(w @ np.array([-2.0, 2.0]))
        assert np.array_equal(ge_rhs(state([-2.0, 2.0]), w, g, tau=1.0), [0.0, 0.0])

    def test_zero_regressor(self):
        assert np.array_equal(
            ge_rhs(state([3.0, -1.0]), np.zeros(2), 5.0, tau=2.0), [0.0, 0.0])

    def test_direct_substitution(self):
        # w=(1, 0.5), theta=(-2, 2): g = -1, prediction error -1
        w = np.array([1.0, 0.5])
        rhs = ge_rhs(state([0.0, 0.0]), w, -1.0, tau=1.0)
        assert np.allclose(rhs, [-1.0, -0.5])


class TestModifiedGain:
    def test_q2_example(self):
        assert np.allclose(mge_gain(np.array([1.0, 0.5]), 1.0, 0.95), [1.0, 0.05])

    def test_q3_example(self):
        assert np.allclose(mge_gain(np.array([0.0, 1.0, 0.0]), 1.0, 0.55), [0.0, 1.0, 1.0])

    def test_zero_mu_doubles_last_row(self):
        k = mge_gain(np.array([1.0, 0.5]), 2.0, 0.0)
        assert np.allclose(k, [2.0, 2.0])

    def test_scalar_falls_back_to_gradient(self):
        assert np.array_equal(mge_gain(np.array([0.7]), 3.0, 0.9), [0.7 * 3.0])

    def test_empty_regressor_rejected(self):
        with pytest.raises(ConfigurationError):
            mge_gain(np.array([]), 1.0, 0.5)

    @given(w1=finite, w2=finite, tau=gains, mu=st.floats(-1.5, 1.5))
    def test_q2_specialization_to_one_ulp(self, w1, w2, tau, mu):
        k = mge_gain(np.array([w1, w2]), tau, mu)
        expected = (tau * w1, 2 * tau * w2 - mu * tau * w1)
        for a, b in zip(k, expected):
            assert abs(a - b) <= math.ulp(max(abs(a), abs(b), 1e-300))

    @given(w1=finite, w2=finite, w3=finite, tau=gains, mu=st.floats(-1.5, 1.5))
    def test_q3_specialization_to_one_ulp(self, w1, w2, w3, tau, mu):
        k = mge_gain(np.array([w1, w2, w3]), tau, mu)
        expected = (tau * w1, tau * w2, 2 * tau * w3 + tau * w2 - 2 * mu * tau * w1)
        for a, b in zip(k, expected):
            assert abs(a - b) <= math.ulp(max(abs(a), abs(b), 1e-300))


class TestModifiedGradient:
    def test_equilibrium_at_truth(self):
        w = np.array([0.3, -1.2])
        theta = np.array([-2.0, 2.0])
        rhs = mge_rhs(state(theta), w, float(w @ theta), tau=1.0, mu=0.95)
        assert np.allclose(rhs, [0.0, 0.0], atol=1e-15)

    def test_example1_initial_row(self):
        w = np.array([1.0, 0.0])
        g = float(w @ np.array([-2.0, 2.0]))
        rhs = mge_rhs(state([0.0, 0.0]), w, g, tau=1.0, mu=0.95)
        assert np.allclose(rhs, [-2.0, 1.9])

    def test_example3_initial_row(self):
        w = np.array([0.0, 1.0, 0.0])
        g = float(w @ np.array([1.0, 2.0, 3.0]))
        rhs = mge_rhs(state([0.0, 0.0, 0.0]), w, g, tau=1.0, mu=0.55)
        assert np.allclose(rhs, [0.0, 2.0, 2.0])


class TestFilteredUpdates:
    def test_startup_is_stationary(self):
        s = state([0.0, 0.0], np.zeros((2, 2)), np.zeros(2))
        assert np.array_equal(mre_rhs(s, tau=1.0), [0.0, 0.0])

    def test_consistent_extension_at_truth(self):
        om = np.array([[1.0, 0.2], [0.2, 0.8]])
        theta = np.array([-2.0, 2.0])
        s = state(theta, om, om @ theta)
        assert np.allclose(mre_rhs(s, tau=3.0), [0.0, 0.0], atol=1e-15)

    def test_hand_example_against_loop_oracle(self):
        om = np.array([[1.0, 0.0], [0.0, 0.0]])
        gv = np.array([-2.0, 0.0])
        th = np.array([0.0, 0.0])
        got = mre_rhs(state(th, om, gv), tau=1.0)
        # independent matrix-vector evaluation, no numpy matmul
        expected = [1.0 * (gv[i] - sum(om[i, j] * th[j] for j in range(2)))
                    for i in range(2)]
        assert np.allclose(got, expected)
        assert np.allclose(got, [-2.0, 0.0])

    def test_missing_filter_rejected(self):
        with pytest.raises(ConfigurationError):
            mre_rhs(state([0.0, 0.0]), tau=1.0)
        with pytest.raises(ConfigurationError):
            mge_mre_rhs(state([0.0, 0.0]), tau=1.0, mu=0.5)

    def test_modified_rows_q2(self, rng):
        om = rng.normal(size=(2, 2))
        gv = rng.normal(size=2)
        th = rng.normal(size=2)
        tau, mu = 1.7, 0.6
        d = mge_mre_rhs(state(th, om, gv), tau, mu)
        eps = gv - om @ th
        assert d[0] == pytest.approx(tau * eps[0], rel=1e-15)
        assert d[1] == pytest.approx(2 * tau * eps[1] - mu * tau * eps[0], rel=1e-14)

    def test_modified_rows_q3(self, rng):
        om = rng.normal(size=(3, 3))
        gv = rng.normal(size=3)
        th = rng.normal(size=3)
        tau, mu = 0.9, 0.55
        d = mge_mre_rhs(state(th, om, gv), tau, mu)
        eps = gv - om @ th
        assert np.allclose(d[:2], tau * eps[:2])
        assert d[2] == pytest.approx(
            2 * tau * eps[2] + tau * eps[1] - 2 * mu * tau * eps[0], rel=1e-14)

    def test_zero_residual_is_equilibrium(self, rng):
        om = rng.normal(size=(3, 3))
        th = rng.normal(size=3)
        s = state(th, om, om @ th)
        assert np.allclose(mge_mre_rhs(s, tau=2.0, mu=0.8), np.zeros(3), atol=1e-14)


class TestDrem:
    def test_startup_stalls(self):
        s = state([5.0, -3.0], np.zeros((2, 2)), np.zeros(2))
        assert np.array_equal(drem_rhs(s, tau=1.0), [0.0, 0.0])

    def test_identity_extension_decouples(self):
        theta = np.array([-2.0, 2.0])
        s = state([0.0, 0.0], np.eye(2), theta)
        assert np.allclose(drem_rhs(s, tau=1.0), theta)

    def test_hand_example_against_2x2_oracle(self):
        om = np.array([[2.0, 0.0], [0.0, 1.0]])
        gv = np.array([-4.0, 2.0])
        got = drem_rhs(state([0.0, 0.0], om, gv), tau=1.0)
        # independent 2x2 determinant/adjugate arithmetic
        delta = om[0, 0] * om[1, 1] - om[0, 1] * om[1, 0]
        adj = [[om[1, 1], -om[0, 1]], [-om[1, 0], om[0, 0]]]
        y = [adj[0][0] * gv[0] + adj[0][1] * gv[1],
             adj[1][0] * gv[0] + adj[1][1] * gv[1]]
        expected = [1.0 * delta * (y[i] - delta * 0.0) for i in range(2)]
        assert np.allclose(got, expected)
        assert np.allclose(got, [-8.0, 8.0])

    @pytest.mark.parametrize("q", [1, 2, 3, 4])
    def test_det_and_adjugate_identities(self, q, rng):
        m = rng.normal(size=(q, q))
        assert det(m) == pytest.approx(np.linalg.det(m), rel=1e-10, abs=1e-12)
        assert np.allclose(adjugate(m) @ m, det(m) * np.eye(q), atol=1e-10)


class TestManifoldDiagnostics:
    def test_on_manifold_point(self):
        assert manifold_residual(np.array([1.0, 0.95]), mu=0.95) == pytest.approx(0.0)

    def test_off_manifold_q3(self):
        assert manifold_residual(np.array([1.0, 1.0, 1.0]), mu=0.5) == pytest.approx(1.0)

    def test_origin_is_on_manifold(self):
        assert manifold_residual(np.zeros(4), mu=0.3) == 0.0

    def test_scalar_rejected(self):
        with pytest.raises(ConfigurationError):
            manifold_residual(np.array([1.0]), mu=0.5)

    @pytest.mark.parametrize("residual,expected", [(0.0, 0.0), (2.0, 2.0), (-3.0, 4.5)])
    def test_storage(self, residual, expected):
        assert storage(residual) == expected


class TestClosedFormScalar:
    def test_constant_unit_signal(self):
        spec = regressor_from_strings(["1"])
        got = ge_closed_form_scalar(spec, tau=1.0, theta_err_0=1.0, t=1.0)
        assert got == pytest.approx(math.exp(-1.0), abs=1e-6)

    def test_zero_signal_freezes_error(self):
        spec = regressor_from_strings(["0"])
        for t in (0.0, 1.0, 17.0):
            assert ge_closed_form_scalar(spec, 2.0, 0.7, t) == pytest.approx(0.7)

    def test_sine_over_one_period(self):
        # integral of sin^2 over a period is pi
        spec = regressor_from_strings(["sin(t)"])
        got = ge_closed_form_scalar(spec, 1.0, 1.0, 2 * math.pi)
        assert got == pytest.approx(math.exp(-math.pi), abs=1e-6)

    def test_vector_dimension_rejected(self):
        spec = regressor_from_strings(["1", "sin(t)"])
        with pytest.raises(UnsupportedDimensionError):
            ge_closed_form_scalar(spec, 1.0, 1.0, 1.0)
