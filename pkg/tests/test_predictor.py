from dataclasses import replace

import numpy as np
import pytest

import predictors.base
from core.exceptions import InsufficientData, InvalidInput, InvalidState
from geometry.projection import EquirectPoint
from predictors.ablations import ArimaOnlyPredictor, PaOnlyPredictor
from predictors.base import (
    ObjectFrame,
    PredictorSession,
    nearest_representative,
    object_frame_at,
    object_frames_from_rows,
    tracks_to_object_frames,
)
from predictors.factory import PredictorFactory
from predictors.parima import ParimaPredictor
from predictors.passive_aggressive import PaModel, pa_update
from timeseries.arima import fit
from tracking.tracker import ObjectTrack
from utils import console

W, H = 3840, 1920


def constant_trace(n, x=1000.0, y=900.0):
    return [EquirectPoint(x, y) for _ in range(n)]


def moving_trace(n, start=3000.0, speed=30.0, y=900.0):
    return [EquirectPoint((start + speed * f) % W, y) for f in range(n)]


def following_objects(viewports, offset=0.0):
    return [ObjectFrame(frame=f, coords={0: EquirectPoint((v.x + offset) % W, v.y)}) for f, v in enumerate(viewports)]


class TestObjectFrames:

    def test_from_rows_is_dense(self):
        frames = object_frames_from_rows([(0, 1, 10.0, 20.0), (2, 1, 12.0, 22.0), (2, 4, 5.0, 6.0)])
        assert [f.frame for f in frames] == [0, 1, 2]
        assert frames[1].coords == {}
        assert frames[2].coords[4] == EquirectPoint(5.0, 6.0)

    @pytest.mark.parametrize("row", [(0, 1, float("nan"), 20.0), (0, 1, 10.0, float("inf")), (-1, 1, 10.0, 20.0)])
    def test_from_rows_rejects_bad_rows(self, row):
        with pytest.raises(InvalidInput):
            object_frames_from_rows([row])

    @pytest.mark.parametrize("cx, cy", [(1e12, 20.0), (W, 20.0), (10.0, H), (-0.5, 20.0)])
    def test_from_rows_rejects_points_outside_frame(self, cx, cy):
        with pytest.raises(InvalidInput):
            object_frames_from_rows([(0, 1, cx, cy)], frame_dims=(W, H))

    def test_from_rows_accepts_frame_edge(self):
        frames = object_frames_from_rows([(0, 1, 0.0, H - 0.5)], frame_dims=(W, H))
        assert frames[0].coords[1] == EquirectPoint(0.0, H - 0.5)

    def test_from_tracks(self):
        track = ObjectTrack(id=3, points=[(1, EquirectPoint(1.0, 2.0)), (2, EquirectPoint(3.0, 4.0))])
        frames = tracks_to_object_frames([track], n_frames=4)
        assert len(frames) == 4
        assert frames[2].coords == {3: EquirectPoint(3.0, 4.0)}
        assert frames[3].coords == {}

    def test_frame_at_out_of_range(self):
        assert object_frame_at([], 10) == ObjectFrame(frame=10)

    def test_nearest_representative(self):
        assert nearest_representative(10.0, 3830.0, W) == 3850.0
        assert nearest_representative(3830.0, 40.0, W) == -10.0
        assert nearest_representative(500.0, 520.0, W) == 500.0


class TestSessionLifecycle:

    def test_predict_before_warmup(self, cfg):
        predictor = ParimaPredictor.from_config(cfg)
        with pytest.raises(InvalidState):
            predictor.predict_chunk([])

    def test_warmup_too_short(self, cfg):
        predictor = ParimaPredictor.from_config(cfg)
        with pytest.raises(InsufficientData):
            predictor.warmup(constant_trace(cfg.warmup_frames - 1), [])

    def test_warmup_twice(self, cfg):
        predictor = ParimaPredictor.from_config(cfg)
        predictor.warmup(constant_trace(cfg.warmup_frames), [])
        with pytest.raises(InvalidState):
            predictor.warmup(constant_trace(cfg.warmup_frames), [])

    def test_observe_without_prediction(self, cfg):
        predictor = ParimaPredictor.from_config(cfg)
        predictor.warmup(constant_trace(cfg.warmup_frames), [])
        with pytest.raises(InvalidState):
            predictor.observe_chunk(constant_trace(cfg.chunk_size), [])

    def test_observe_wrong_length(self, cfg):
        predictor = ParimaPredictor.from_config(cfg)
        predictor.warmup(constant_trace(cfg.warmup_frames), [])
        predictor.predict_chunk([])
        with pytest.raises(InvalidInput):
            predictor.observe_chunk(constant_trace(cfg.chunk_size - 1), [])

    def test_observing_the_prediction_keeps_models(self, cfg):
        trace = moving_trace(cfg.warmup_frames + cfg.chunk_size)
        objects = following_objects(trace)
        predictor = ParimaPredictor.from_config(cfg)
        predictor.warmup(trace, objects)
        before_x, before_y = predictor.session.pa_x, predictor.session.pa_y
        window = objects[cfg.warmup_frames:]
        prediction = predictor.predict_chunk(window)
        predictor.observe_chunk(prediction.viewports, window)
        assert predictor.session.pa_x is before_x
        assert predictor.session.pa_y is before_y

    def test_single_frame_chunk_is_one_update(self):
        session = PredictorSession(pa_x=PaModel(), pa_y=PaModel(), fps=30, chunk_size=1, frame_dims=(W, H), warmup=150)
        predictor = PaOnlyPredictor(session)
        trace = moving_trace(151)
        objects = following_objects(trace, offset=40.0)
        predictor.warmup(trace, objects)
        before = session.pa_x
        prediction = predictor.predict_chunk(objects[150:])
        inter_x, _ = prediction.intermediates[0]
        predictor.observe_chunk(trace[150:], objects[150:])
        expected = pa_update(before, inter_x, {0: objects[150].coords[0].x},
                             nearest_representative(trace[150].x, inter_x, W))
        assert session.pa_x == expected

    def test_frames_are_learned_in_order(self, cfg):
        trace = moving_trace(cfg.warmup_frames + cfg.chunk_size)
        objects = following_objects(trace, offset=40.0)
        predictor = PaOnlyPredictor.from_config(cfg)
        predictor.warmup(trace, objects)
        before = predictor.session.pa_x
        window = slice(cfg.warmup_frames, cfg.warmup_frames + cfg.chunk_size)
        prediction = predictor.predict_chunk(objects[window])
        predictor.observe_chunk(trace[window], objects[window])

        steps = [(inter_x, {0: frame.coords[0].x}, nearest_representative(actual.x, inter_x, W))
                 for (inter_x, _), frame, actual in zip(prediction.intermediates, objects[window], trace[window])]
        in_order, reversed_order = before, before
        for step in steps:
            in_order = pa_update(in_order, *step)
        for step in reversed(steps):
            reversed_order = pa_update(reversed_order, *step)
        assert predictor.session.pa_x == in_order
        assert predictor.session.pa_x != reversed_order

    def test_chunk_bookkeeping(self, cfg):
        predictor = ParimaPredictor.from_config(cfg)
        trace = constant_trace(cfg.warmup_frames + 2 * cfg.chunk_size)
        predictor.warmup(trace, [])
        first = predictor.predict_chunk([])
        predictor.observe_chunk(trace[150:180], [])
        second = predictor.predict_chunk([])
        assert (first.chunk, first.start_frame) == (0, 150)
        assert (second.chunk, second.start_frame) == (1, 180)
        assert len(second.viewports) == cfg.chunk_size


class TestPredictions:

    @pytest.mark.parametrize("predictor_class", [ParimaPredictor, ArimaOnlyPredictor, PaOnlyPredictor])
    def test_constant_viewport(self, cfg, predictor_class):
        predictor = predictor_class.from_config(cfg)
        trace = constant_trace(cfg.warmup_frames)
        predictor.warmup(trace, [])
        prediction = predictor.predict_chunk([])
        np.testing.assert_allclose([v.x for v in prediction.viewports], 1000.0, atol=1.0)
        np.testing.assert_allclose([v.y for v in prediction.viewports], 900.0, atol=1.0)

    @pytest.mark.parametrize("name", ["parima", "arima_only", "pa_only"])
    def test_seam_crossing_stays_in_frame(self, cfg, name):
        trace = moving_trace(cfg.warmup_frames + 8 * cfg.chunk_size)
        objects = following_objects(trace)
        predictor = PredictorFactory.create_predictor(name, cfg)
        predictor.warmup(trace[:cfg.warmup_frames], objects)
        for chunk in range(8):
            start = cfg.warmup_frames + chunk * cfg.chunk_size
            window = slice(start, start + cfg.chunk_size)
            prediction = predictor.predict_chunk(objects[window])
            assert all(0 <= v.x < W and 0 <= v.y <= H - 1 for v in prediction.viewports)
            predictor.observe_chunk(trace[window], objects[window])

    def test_seam_crossing_tracks_motion(self, cfg):
        trace = moving_trace(cfg.warmup_frames + 6 * cfg.chunk_size, start=3500.0)
        predictor = ArimaOnlyPredictor.from_config(cfg)
        predictor.warmup(trace[:cfg.warmup_frames], [])
        for chunk in range(6):
            start = cfg.warmup_frames + chunk * cfg.chunk_size
            prediction = predictor.predict_chunk([])
            for offset, v in enumerate(prediction.viewports):
                actual = trace[start + offset].x
                gap = abs((v.x - actual + W / 2) % W - W / 2)
                assert gap < 200
            predictor.observe_chunk(trace[start:start + cfg.chunk_size], [])

    def test_arima_only_never_trains(self, cfg):
        predictor = ArimaOnlyPredictor.from_config(cfg)
        trace = moving_trace(cfg.warmup_frames + cfg.chunk_size)
        predictor.warmup(trace, following_objects(trace))
        assert predictor.session.pa_x.bias == 0.0
        prediction = predictor.predict_chunk([])
        assert prediction.contributions == [None] * cfg.chunk_size

    def test_pa_only_chains_predictions(self, cfg):
        predictor = PaOnlyPredictor.from_config(cfg)
        trace = moving_trace(cfg.warmup_frames)
        predictor.warmup(trace, [])
        prediction = predictor.predict_chunk([])
        assert prediction.intermediates[0] == (trace[-1].x, trace[-1].y)
        assert prediction.intermediates[1][1] == pytest.approx(
            predictor._pa_frame(*prediction.intermediates[0], {}, {})[1])

    def test_unseen_objects_have_no_weight(self, cfg):
        predictor = ParimaPredictor.from_config(cfg)
        trace = moving_trace(cfg.warmup_frames)
        predictor.warmup(trace, following_objects(trace))
        assert set(predictor.session.pa_x.w_objects) <= {0}
        assert 1 not in predictor.session.pa_y.w_objects

    def test_zero_weights_predict_bias(self, cfg):
        predictor = PaOnlyPredictor.from_config(cfg)
        predictor.warmup(moving_trace(cfg.warmup_frames), [])
        predictor.session.pa_x = PaModel(bias=4000.0)
        predictor.session.pa_y = PaModel(bias=500.0)
        prediction = predictor.predict_chunk([])
        assert all(v == EquirectPoint(160.0, 500.0) for v in prediction.viewports)

    def test_identity_model_returns_forecast(self, cfg):
        predictor = ParimaPredictor.from_config(cfg)
        predictor.session.residual = False
        predictor.warmup(constant_trace(cfg.warmup_frames), [])
        predictor.session.pa_x = PaModel(w_intermediate=1.0)
        predictor.session.pa_y = PaModel(w_intermediate=1.0)
        prediction = predictor.predict_chunk([])
        np.testing.assert_allclose([v.x for v in prediction.viewports], 1000.0, atol=1.0)
        np.testing.assert_allclose([v.y for v in prediction.viewports], 900.0, atol=1.0)

    def test_distant_objects_are_gated_out(self, cfg):
        trace = moving_trace(cfg.warmup_frames)
        objects = [ObjectFrame(frame=f, coords={0: v, 1: EquirectPoint((v.x + W / 2) % W, v.y)})
                   for f, v in enumerate(trace)]
        predictor = ParimaPredictor.from_config(cfg)
        predictor.warmup(trace, objects)
        assert 0 in predictor.session.pa_x.w_objects
        assert 1 not in predictor.session.pa_x.w_objects
        assert 1 not in predictor.session.pa_y.w_objects

    def test_followed_object_is_the_main_contribution(self, cfg):
        trace = moving_trace(cfg.warmup_frames + 4 * cfg.chunk_size)
        objects = following_objects(trace)
        predictor = ParimaPredictor.from_config(cfg)
        predictor.warmup(trace[:cfg.warmup_frames], objects)
        for chunk in range(4):
            start = cfg.warmup_frames + chunk * cfg.chunk_size
            window = slice(start, start + cfg.chunk_size)
            prediction = predictor.predict_chunk(objects[window])
            predictor.observe_chunk(trace[window], objects[window])
        assert np.mean(prediction.contributions) > 0.5

    def test_public_contribution_matches_prediction(self, cfg):
        trace = moving_trace(cfg.warmup_frames + cfg.chunk_size)
        objects = following_objects(trace, offset=50.0)
        predictor = ParimaPredictor.from_config(cfg)
        predictor.warmup(trace, objects)
        window = objects[cfg.warmup_frames:]
        prediction = predictor.predict_chunk(window)
        for frame, intermediate, contribution in zip(window, prediction.intermediates, prediction.contributions):
            assert predictor.object_contribution(frame, intermediate) == pytest.approx(contribution)
            assert 0.0 <= contribution <= 1.0

    def test_singular_fit_warns(self, cfg, monkeypatch, capsys):
        monkeypatch.setattr(predictors.base, "fit", lambda series, order: replace(fit(series, order), ma_dropped=True))
        predictor = ArimaOnlyPredictor.from_config(cfg)
        predictor.warmup(moving_trace(cfg.warmup_frames), [])
        console.set_quiet(False)
        predictor.predict_chunk([])
        assert "MA terms" in capsys.readouterr().err

    def test_deterministic(self, cfg):
        trace = moving_trace(cfg.warmup_frames + cfg.chunk_size)
        objects = following_objects(trace, offset=50.0)
        runs = []
        for _ in range(2):
            predictor = ParimaPredictor.from_config(cfg)
            predictor.warmup(trace, objects)
            runs.append(predictor.predict_chunk(objects[150:180]).viewports)
        assert runs[0] == runs[1]


class TestFactory:

    def test_available(self):
        assert set(PredictorFactory.get_available_predictors()) >= {"parima", "arima_only", "pa_only"}

    def test_naba_has_no_predictor(self, cfg):
        assert PredictorFactory.create_predictor("naba", cfg) is None
        assert PredictorFactory.create_predictor("unknown", cfg) is None

    def test_names(self, cfg):
        assert PredictorFactory.create_predictor("PARIMA", cfg).get_name() == "PARIMA"
        assert PredictorFactory.create_predictor("arima_only", cfg).get_name() == "ARIMA"
        assert PredictorFactory.create_predictor("pa_only", cfg).get_name() == "PA"

    def test_register(self, cfg):
        PredictorFactory.register_predictor("Chained", PaOnlyPredictor)
        try:
            assert "chained" in PredictorFactory.get_available_predictors()
            assert isinstance(PredictorFactory.create_predictor("chained", cfg), PaOnlyPredictor)
        finally:
            PredictorFactory._predictors.pop("chained")
