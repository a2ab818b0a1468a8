import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from paramest.catalog import BUILTIN_NAMES, builtin
from paramest.errors import (
    ConfigurationError,
    ScenarioNotFoundError,
    SignalEvalError,
    SignalParseError,
)
from paramest.signals import (
    excitation_report,
    excitation_sweep,
    parse_expr,
    regressor_from_strings,
)


class TestEval:
    def test_example1_at_zero(self):
        spec, _, _, _ = builtin("example1")
        assert np.allclose(spec.evaluate(0.0), [1.0, 0.0])

    def test_example3_at_zero(self):
        spec, _, _, _ = builtin("example3")
        assert np.allclose(spec.evaluate(0.0), [0.0, 1.0, 0.0])

    def test_example5_at_zero(self):
        spec, _, _, _ = builtin("example5")
        assert np.allclose(spec.evaluate(0.0), [1.0, 1.0])

    def test_parsed_matches_direct_formula(self):
        # the decaying component of examples 2/4/6, written out with numpy
        spec, _, _, _ = builtin("example2")
        for t in np.linspace(0.0, 40.0, 101):
            direct = (math.sin(t) + math.cos(t)) / (1 + t) ** 0.5 \
                - math.sin(t) / (2 * (1 + t) ** 1.5)
            assert spec.evaluate(t)[1] == pytest.approx(direct, abs=1e-14)

    def test_vectorized_sample_matches_scalar_eval(self):
        spec, _, _, _ = builtin("example6")
        ts = np.linspace(0.0, 20.0, 40)
        block = spec.sample(ts)
        for i, t in enumerate(ts):
            assert np.allclose(block[i], spec.evaluate(t), atol=1e-15)

    def test_nonfinite_names_component(self):
        spec = regressor_from_strings(["1", "exp(100*t)"])
        with pytest.raises(SignalEvalError, match="component 1"):
            spec.evaluate(10.0)

    def test_divide_near_zero_raises(self):
        spec = regressor_from_strings(["1/(t-1)"])
        with pytest.raises(SignalEvalError, match="denominator"):
            spec.evaluate(1.0)


class TestParser:
    def test_numbers_and_precedence(self):
        e = parse_expr("1+2*3-4/2")
        assert float(e(0.0)) == pytest.approx(5.0)

    def test_unary_minus_and_nesting(self):
        e = parse_expr("-sin(t)*(-2)")
        assert float(e(math.pi / 2)) == pytest.approx(2.0)

    def test_pow_two_arguments(self):
        e = parse_expr("pow(1+t, 0.5)")
        assert float(e(3.0)) == pytest.approx(2.0)

    @pytest.mark.parametrize("bad", [
        "sin(t", "1 +", "bogus(t)", "t t", "pow(t)", "1 $ 2",
    ])
    def test_rejects_malformed(self, bad):
        with pytest.raises(SignalParseError):
            parse_expr(bad)

    def test_empty_regressor_rejected(self):
        with pytest.raises(ConfigurationError):
            regressor_from_strings([])


class TestBuiltin:
    # name -> (q, theta, tau, mu)
    EXPECTED = {
        "example1": (2, (-2.0, 2.0), 1.0, 0.95),
        "example2": (2, (-2.0, 2.0), 1.0, 0.95),
        "example3": (3, (1.0, 2.0, 3.0), 1.0, 0.55),
        "example4": (2, (-2.0, 2.0), 1.0, 0.75),
        "example5": (2, (-2.0, 2.0), 50.0, 0.75),
        "example6": (3, (1.0, 2.0, 3.0), 10.0, 0.95),
    }

    def test_catalog_covers_expected_names(self):
        assert BUILTIN_NAMES == tuple(self.EXPECTED)

    @pytest.mark.parametrize("name", list(EXPECTED))
    def test_builtin_values(self, name):
        q, theta, tau, mu = self.EXPECTED[name]
        spec, got_theta, got_tau, got_mu = builtin(name)
        assert spec.dimension == q
        assert np.allclose(got_theta, theta)
        assert got_tau == tau and got_mu == mu

    def test_unknown_name(self):
        with pytest.raises(ScenarioNotFoundError):
            builtin("nosuch")


class TestExcitation:
    def test_example1_full_period_gram(self):
        # closed forms over one period: int 1 = 2*pi, int sin^2 = pi, int sin = 0
        spec, _, _, _ = builtin("example1")
        rep = excitation_report(spec, 0.0, 2 * math.pi, 1e-3)
        target = np.array([[2 * math.pi, 0.0], [0.0, math.pi]])
        assert np.max(np.abs(rep.gram - target)) < 1e-4
        assert rep.min_eigenvalue == pytest.approx(math.pi, abs=1e-4)

    def test_constant_rank_one_regressor(self):
        spec = regressor_from_strings(["1", "0"])
        rep = excitation_report(spec, 0.0, 3.0, 0.01)
        assert np.allclose(rep.gram, [[3.0, 0.0], [0.0, 0.0]], atol=1e-12)
        assert abs(rep.min_eigenvalue) < 1e-12

    def test_example5_tail_below_analytic_bound(self):
        # rho <= integral of the decayed component energy over the window
        spec, _, _, _ = builtin("example5")
        rep = excitation_report(spec, 100.0, 10.0, 1e-3)
        bound = 2.0 * (math.exp(-50.0) - math.exp(-55.0))
        assert 0.0 <= rep.min_eigenvalue <= bound + 1e-12

    def test_example1_stays_excited_across_window_starts(self):
        spec, _, _, _ = builtin("example1")
        starts = np.arange(0.0, 20.0 + 1e-9, 0.5)
        for _, rho in excitation_sweep(spec, starts, 2 * math.pi, 1e-3):
            assert rho >= 3.0

    def test_example5_excitation_dies_out(self):
        spec, _, _, _ = builtin("example5")
        rep = excitation_report(spec, 100.0, 10.0, 1e-3)
        assert rep.min_eigenvalue < 1e-2

    def test_trapezoid_is_second_order(self):
        spec = regressor_from_strings(["sin(t)"])
        ref = excitation_report(spec, 0.0, 1.3, 1.3 / 8192).gram[0, 0]
        e1 = abs(excitation_report(spec, 0.0, 1.3, 1.3 / 16).gram[0, 0] - ref)
        e2 = abs(excitation_report(spec, 0.0, 1.3, 1.3 / 32).gram[0, 0] - ref)
        assert 3.5 < e1 / e2 < 4.5

    def test_validates_window_and_step(self):
        spec = regressor_from_strings(["1"])
        with pytest.raises(ConfigurationError):
            excitation_report(spec, 0.0, -1.0, 0.01)
        with pytest.raises(ConfigurationError):
            excitation_report(spec, 0.0, 1.0, 0.5)  # dt > T/10

    @given(
        coeffs=st.lists(
            st.tuples(st.floats(-1, 1), st.floats(-1, 1), st.floats(0.3, 3.0)),
            min_size=1, max_size=3),
        start=st.floats(0.0, 20.0),
        window=st.floats(0.5, 8.0),
    )
    def test_gram_symmetric_psd(self, coeffs, start, window):
        spec = regressor_from_strings(
            [f"{c0} + {c1}*sin({a}*t)" for c0, c1, a in coeffs])
        rep = excitation_report(spec, start, window, window / 64)
        assert np.max(np.abs(rep.gram - rep.gram.T)) < 1e-9
        assert rep.min_eigenvalue >= -1e-9
