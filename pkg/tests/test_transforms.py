import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from patentlab.transforms import (
    BoxCoxTransform,
    DegenerateDataError,
    DomainError,
    Log1pTransform,
    TransformError,
    ZScoreTransform,
    boxcox_log_likelihood,
    fit_lambda,
    fit_transform,
    transform_from_json,
)

LAMBDA_GRID = (-2.0, -0.5, 0.0, 0.5, 1.0, 2.0)


class TestApplyBranches:
    def test_identity_branch(self):
        assert BoxCoxTransform(lambda_=1.0).apply(5.0) == pytest.approx(4.0, abs=1e-12)

    def test_log_branch(self):
        assert BoxCoxTransform(lambda_=0.0).apply(math.e) == pytest.approx(1.0, abs=1e-12)

    def test_sqrt_branch(self):
        assert BoxCoxTransform(lambda_=0.5).apply(4.0) == pytest.approx(2.0, abs=1e-12)

    def test_nonpositive_after_shift_rejected(self):
        with pytest.raises(DomainError):
            BoxCoxTransform(lambda_=0.5).apply(-1.0)

    def test_inverse_out_of_image_rejected(self):
        t = BoxCoxTransform(lambda_=0.5)
        with pytest.raises(DomainError):
            t.inverse(-3.0)  # 1 + 0.5*(-3) < 0


class TestRoundTrip:
    @pytest.mark.parametrize("lam", LAMBDA_GRID)
    def test_round_trip_accuracy(self, lam):
        # grid capped at 1e2: extreme lambda*ln(y) saturates z toward -1/lambda,
        # where float64 cannot represent y to the required accuracy at all
        t = BoxCoxTransform(lambda_=lam)
        for y in np.geomspace(0.01, 100.0, 60):
            back = t.inverse(t.apply(y))
            assert abs(back - y) < 1e-9 * max(1.0, abs(y))

    @pytest.mark.parametrize("lam", LAMBDA_GRID)
    def test_round_trip_with_shift(self, lam):
        t = BoxCoxTransform(lambda_=lam, shift=2.5)
        for y in np.linspace(-2.0, 50.0, 40):
            back = t.inverse(t.apply(y))
            assert abs(back - y) < 1e-9 * max(1.0, abs(y))

    @given(st.floats(0.01, 100.0), st.sampled_from(LAMBDA_GRID))
    @settings(max_examples=200, deadline=None)
    def test_round_trip_property(self, y, lam):
        t = BoxCoxTransform(lambda_=lam)
        assert abs(t.inverse(t.apply(y)) - y) < 1e-9 * max(1.0, abs(y))


class TestMonotonicity:
    @pytest.mark.parametrize("lam", LAMBDA_GRID)
    def test_strictly_increasing(self, lam):
        t = BoxCoxTransform(lambda_=lam)
        ys = np.geomspace(0.01, 1e4, 500)
        zs = t.apply(ys)
        assert np.all(np.diff(zs) > 0)

    def test_train_fit_preserves_test_ranks(self):
        rng = np.random.default_rng(8)
        train = np.exp(rng.normal(size=500))
        test = np.exp(rng.normal(size=300))
        t = fit_lambda(train)
        z = t.apply(test)
        assert np.array_equal(np.argsort(z), np.argsort(test))


class TestContinuityAtZero:
    def test_small_lambda_close_to_log(self):
        t = BoxCoxTransform(lambda_=1e-8)
        for y in np.linspace(0.1, 100.0, 200):
            assert abs(t.apply(y) - math.log(y)) < 1e-6


class TestFitLambda:
    def test_normal_data_lambda_near_one(self):
        rng = np.random.default_rng(21)
        values = 10.0 + rng.normal(size=2000)
        t = fit_lambda(values)
        assert 0.5 <= t.lambda_ <= 1.5

    def test_lognormal_lambda_near_zero_vs_grid_oracle(self):
        rng = np.random.default_rng(22)
        values = np.exp(rng.normal(size=5000))
        t = fit_lambda(values)
        # independent dense-grid argmax of the profile likelihood
        grid = np.arange(-1.0, 1.0, 1e-3)
        ll = [boxcox_log_likelihood(values, float(l)) for l in grid]
        oracle = float(grid[int(np.argmax(ll))])
        assert abs(t.lambda_ - 0.0) <= 0.15
        assert abs(t.lambda_ - oracle) <= 2e-3

    def test_constant_input_rejected(self):
        with pytest.raises(DegenerateDataError):
            fit_lambda(np.full(100, 3.0))

    def test_too_few_values_rejected(self):
        with pytest.raises(TransformError):
            fit_lambda(np.arange(1.0, 6.0))

    def test_shift_rule_for_nonpositive_minimum(self):
        rng = np.random.default_rng(23)
        values = rng.normal(size=200)  # includes negatives
        t = fit_lambda(values)
        assert t.shift == pytest.approx(1e-6 - float(values.min()))
        assert t.fitted_on == 200

    def test_positive_values_get_zero_shift(self):
        rng = np.random.default_rng(24)
        t = fit_lambda(np.exp(rng.normal(size=100)))
        assert t.shift == 0.0


class TestAlternativeStrategies:
    def test_log1p_round_trip(self):
        t = fit_transform("log1p", np.array([0.0, 1.0, 10.0, 100.0]))
        for y in (0.0, 0.5, 7.0, 99.0):
            assert t.inverse(t.apply(y)) == pytest.approx(y, abs=1e-12)

    def test_zscore_round_trip(self):
        t = fit_transform("zscore", np.array([1.0, 2.0, 3.0, 4.0]))
        assert isinstance(t, ZScoreTransform)
        assert t.inverse(t.apply(2.7)) == pytest.approx(2.7, abs=1e-12)

    def test_zscore_constant_rejected(self):
        with pytest.raises(DegenerateDataError):
            fit_transform("zscore", np.full(20, 1.0))

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            fit_transform("quantile", np.arange(1.0, 20.0))


class TestSerialization:
    def test_boxcox_json_round_trip(self):
        t = BoxCoxTransform(lambda_=0.37, shift=1.5, fitted_on=100)
        back = transform_from_json(t.to_json())
        assert back.lambda_ == t.lambda_ and back.shift == t.shift

    def test_all_kinds_round_trip(self):
        for t in (BoxCoxTransform(0.5, 0.1), Log1pTransform(0.2), ZScoreTransform(3.0, 2.0)):
            back = transform_from_json(t.to_json())
            assert back.apply(5.0) == t.apply(5.0)
