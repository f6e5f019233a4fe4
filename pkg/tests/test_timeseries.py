import math

import numpy as np
import pytest

from core.exceptions import InsufficientData, InvalidInput
from timeseries.arima import ArimaModel, ArimaOrder, difference, fit, forecast, integrate
from timeseries.transforms import adjust_width, apply_transforms, invert_forecast

W = 3840


class TestArimaOrder:

    def test_parse(self):
        assert ArimaOrder.parse("2,1,1").as_tuple() == (2, 1, 1)
        assert ArimaOrder.parse("(3, 1, 0)").as_tuple() == (3, 1, 0)

    @pytest.mark.parametrize("text", ["2,1", "a,b,c", "-1,0,0"])
    def test_parse_rejects(self, text):
        with pytest.raises(InvalidInput):
            ArimaOrder.parse(text)

    def test_minimum_observations(self):
        assert ArimaOrder(2, 1, 1).min_observations == 12
        assert ArimaOrder(3, 1, 0).min_observations == 12


class TestDifference:

    def test_first_difference(self):
        np.testing.assert_array_equal(difference([1, 3, 6], 1), [2, 3])

    def test_zero_order_is_identity(self):
        np.testing.assert_array_equal(difference([4, 1, 7], 0), [4, 1, 7])

    def test_second_difference(self):
        np.testing.assert_array_equal(difference([1, 3, 6, 10], 2), [1, 1])

    def test_too_short(self):
        with pytest.raises(InsufficientData):
            difference([1, 2], 2)

    def test_integrate_inverts(self):
        series = np.array([2.0, 5.0, 4.0, 9.0, 11.0])
        tails = [series[0], np.diff(series)[0]]
        np.testing.assert_allclose(integrate(difference(series, 2), tails), series)


class TestFit:

    def test_recovers_ar1_coefficient(self):
        rng = np.random.default_rng(42)
        noise = rng.normal(size=10_000)
        series = np.zeros(10_000)
        for t in range(1, len(series)):
            series[t] = 0.6 * series[t - 1] + noise[t]
        model = fit(series, ArimaOrder(1, 0, 0))
        # OLS oracle on the same data
        design = np.column_stack([np.ones(len(series) - 1), series[:-1]])
        oracle = np.linalg.lstsq(design, series[1:], rcond=None)[0][1]
        assert 0.55 <= model.ar[0] <= 0.65
        assert model.ar[0] == pytest.approx(oracle, abs=1e-9)

    def test_constant_series(self):
        model = fit([5.0] * 20, ArimaOrder(0, 1, 0))
        assert model.intercept == 0.0
        assert model.ar.size == 0 and model.ma.size == 0

    def test_constant_differences_give_intercept_only(self):
        model = fit(np.arange(40, dtype=float), ArimaOrder(2, 1, 1))
        assert model.intercept == 1.0
        np.testing.assert_array_equal(model.ar, [0.0, 0.0])
        np.testing.assert_array_equal(model.ma, [0.0])

    def test_random_walk_has_no_coefficients(self):
        model = fit([3.0, 1.0, 4.0, 1.0, 5.0], ArimaOrder(0, 1, 0))
        assert model.intercept == 0.0
        assert not model.ma_dropped

    def test_singular_second_stage_drops_ma(self):
        # alternating series: the long AR fits exactly, so every innovation is zero
        model = fit([0.0, 1.0] * 10, ArimaOrder(0, 0, 1))
        assert model.ma_dropped
        np.testing.assert_array_equal(model.ma, [0.0])
        assert model.intercept == pytest.approx(0.5)

    def test_too_short(self):
        with pytest.raises(InsufficientData):
            fit([1.0, 2.0, 3.0], ArimaOrder(2, 1, 1))

    def test_non_finite(self):
        with pytest.raises(InvalidInput):
            fit([1.0, float("nan")] + [1.0] * 20, ArimaOrder(1, 0, 0))

    def test_ma_model_on_noise(self):
        rng = np.random.default_rng(5)
        series = np.cumsum(rng.normal(size=60))
        model = fit(series, ArimaOrder(2, 1, 1))
        assert np.all(np.isfinite(model.ar)) and np.all(np.isfinite(model.ma))
        assert model.last_residuals.size == 1


class TestForecast:

    def test_random_walk_repeats_last_value(self):
        model = fit([1.0, 4.0, 2.0, 7.0], ArimaOrder(0, 1, 0))
        np.testing.assert_array_equal(forecast(model, 3), [7.0, 7.0, 7.0])

    def test_geometric_decay(self):
        model = ArimaModel(order=ArimaOrder(1, 0, 0), ar=[0.5], intercept=0.0, last_values=[8.0])
        np.testing.assert_allclose(forecast(model, 2), [4.0, 2.0])

    def test_ramp(self):
        model = fit(np.arange(1, 101, dtype=float), ArimaOrder(2, 1, 1))
        np.testing.assert_allclose(forecast(model, 5), np.arange(101, 106), atol=0.5)

    def test_horizon_must_be_positive(self):
        model = fit([1.0, 2.0, 3.0], ArimaOrder(0, 1, 0))
        with pytest.raises(InvalidInput):
            forecast(model, 0)

    def test_explosive_model_stays_finite(self):
        model = ArimaModel(order=ArimaOrder(1, 1, 0), ar=[3.0], intercept=0.0, last_values=[1.0],
                           level_tails=[10.0], clip=5.0)
        values = forecast(model, 30)
        assert np.all(np.isfinite(values))
        assert np.all(np.abs(np.diff(np.concatenate([[10.0], values]))) <= 5.0)


class TestTransforms:

    def test_width_adjustment_forward_crossing(self):
        np.testing.assert_allclose(adjust_width([3800, 10], W), [3800, 3850])

    def test_width_adjustment_backward_crossing(self):
        np.testing.assert_allclose(adjust_width([40, 3830], W), [40, -10])

    def test_horizontal_chain(self):
        values, chain = apply_transforms([40, 3830], W, jitter_seed=0)
        assert chain.shift == W
        raw = np.exp(values)
        # -10 + 3840 = 3830 plus jitter below 0.1
        assert 3830 <= raw[1] < 3830.1
        assert 3880 <= raw[0] < 3880.1

    def test_vertical_chain_has_no_shift(self):
        values, chain = apply_transforms([0.0, 960.0], W, jitter_seed=0, horizontal=False)
        assert chain.shift == 0.0
        assert np.all(np.exp(values) > 0)

    def test_jitter_is_seeded(self):
        a, _ = apply_transforms([1.0, 2.0, 3.0], W, jitter_seed=[4, 2])
        b, _ = apply_transforms([1.0, 2.0, 3.0], W, jitter_seed=[4, 2])
        np.testing.assert_array_equal(a, b)

    def test_invert_removes_shift(self):
        _, chain = apply_transforms([3800, 10], W, jitter_seed=0)
        np.testing.assert_allclose(invert_forecast([math.log(3850 + W)], chain, W), [3850])

    def test_invert_vertical_is_exp(self):
        _, chain = apply_transforms([5.0, 6.0], W, jitter_seed=0, horizontal=False)
        np.testing.assert_allclose(invert_forecast([math.log(700.0)], chain, W), [700.0])

    def test_invert_clamps_overflow(self):
        _, chain = apply_transforms([3800, 10], W, jitter_seed=0)
        result = invert_forecast([1e6, float("nan")], chain, W)
        assert np.all(np.isfinite(result))
        assert result[0] == pytest.approx(2 * W)
