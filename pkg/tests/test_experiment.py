import functools

import numpy as np
import pytest

from core.exceptions import InvalidConfig, InvalidInput
from geometry.projection import EquirectPoint
from utils.experiment import run_experiment, run_session, run_users
from utils.synthetic import ScenarioSpec, generate_synthetic

SEEDS = range(10)


@functools.lru_cache(maxsize=None)
def scenario(name="object_follower", seed=0, duration=60.0, noise=4.0, users=1, distractors=0):
    return generate_synthetic(ScenarioSpec(
        name=name, duration_seconds=duration, seed=seed, noise_px=noise, users=users, distractors=distractors))


def still_viewports(n):
    return [EquirectPoint(1000.0, 900.0)] * n


class TestSession:

    def test_naba_is_uniform(self, cfg):
        run = run_session(cfg.with_overrides(variant="naba"), still_viewports(240), [])
        assert run.predictions == []
        assert {rate for *_, rate in run.allocations} == {0.125}
        assert run.qoe.mean_tile_error is None
        assert run.mean_object_contribution is None
        assert all(t.update == 0.0 and t.predict == 0.0 for t in run.timings)

    def test_chunk_accounting(self, cfg):
        # 150 warm-up frames, 3 full chunks, 5 trailing frames
        run = run_session(cfg, still_viewports(245), [])
        assert run.qoe.chunks == 3
        assert len(run.predictions) == 90
        assert [row[1] for row in run.predictions] == list(range(150, 240))
        assert len(run.allocations) == 3 * 64
        assert [t.chunk for t in run.timings] == [0, 1, 2]

    def test_allocations_sum_to_bitrate(self, cfg):
        synthetic = scenario(duration=10.0)
        run = run_session(cfg, synthetic.viewports, synthetic.object_frames)
        for chunk in range(run.qoe.chunks):
            total = sum(rate for c, _, _, rate in run.allocations if c == chunk)
            assert total == pytest.approx(cfg.bitrate_mbps)

    def test_too_short(self, cfg):
        with pytest.raises(InvalidInput):
            run_session(cfg, still_viewports(179), [])

    def test_viewport_outside_frame(self, cfg):
        viewports = still_viewports(200) + [EquirectPoint(3840.0, 10.0)]
        with pytest.raises(InvalidInput):
            run_session(cfg, viewports, [])

    def test_invalid_config(self, cfg):
        with pytest.raises(InvalidConfig):
            run_session(cfg.with_overrides(variant="parima", chunk_seconds=10.0), still_viewports(400), [])

    def test_deterministic(self, cfg):
        synthetic = scenario(duration=15.0)
        first = run_session(cfg, synthetic.viewports, synthetic.object_frames)
        second = run_session(cfg, synthetic.viewports, synthetic.object_frames)
        assert first.predictions == second.predictions
        assert first.allocations == second.allocations
        assert first.qoe.to_dict() == second.qoe.to_dict()


class TestReports:

    def test_run_experiment_single_user(self, cfg):
        synthetic = scenario(duration=10.0)
        report = run_experiment(cfg, synthetic.viewports, synthetic.object_frames, user_id="alice")
        assert [run.user_id for run in report.users] == ["alice"]
        assert report.chunks == 5
        assert "timings" not in str(report.to_dict())

    def test_run_users_sorted(self, cfg):
        synthetic = scenario(duration=10.0, users=3)
        report = run_users(cfg, synthetic.users, synthetic.object_frames)
        assert [run.user_id for run in report.users] == ["user0", "user1", "user2"]
        assert report.chunks == 15
        assert report.mean_qoe == pytest.approx(np.mean([run.qoe.total for run in report.users]))

    def test_run_users_needs_users(self, cfg):
        with pytest.raises(InvalidInput):
            run_users(cfg, {}, [])

    def test_latency_with_fifty_objects(self, cfg):
        synthetic = scenario(duration=20.0, distractors=49)
        assert len(synthetic.object_frames[0].coords) == 50
        summary = run_experiment(cfg, synthetic.viewports, synthetic.object_frames).latency_summary()
        assert summary["chunks"] == 15
        assert summary["chunk_seconds"] == 1.0
        assert summary["mean_total_ms"] < 100.0
        assert summary["max_total_ms"] >= summary["mean_total_ms"]


class TestOrdering:
    """Directional outcomes over seeded 60 s object_follower sessions."""

    def test_parima_beats_naba_on_qoe(self, cfg):
        wins = 0
        for seed in SEEDS:
            synthetic = scenario(seed=seed)
            parima = run_experiment(cfg.with_overrides(seed=seed), synthetic.viewports, synthetic.object_frames)
            naba = run_experiment(
                cfg.with_overrides(seed=seed, variant="naba"), synthetic.viewports, synthetic.object_frames)
            wins += parima.mean_qoe > naba.mean_qoe
        assert wins == 10

    def test_parima_tile_error_not_worse_than_arima(self, cfg):
        wins = 0
        for seed in SEEDS:
            synthetic = scenario(seed=seed)
            parima = run_experiment(cfg.with_overrides(seed=seed), synthetic.viewports, synthetic.object_frames)
            arima = run_experiment(
                cfg.with_overrides(seed=seed, variant="arima_only"), synthetic.viewports, synthetic.object_frames)
            wins += parima.mean_tile_error <= arima.mean_tile_error
        assert wins >= 8

    def test_objects_dominate_when_followed(self, cfg):
        synthetic = scenario(noise=0.0)
        run = run_session(cfg, synthetic.viewports, synthetic.object_frames)
        late = [row[6] for row in run.predictions if row[1] >= 20 * cfg.fps]
        assert np.mean(late) > 0.5

    def test_parima_tile_error_not_worse_than_pa_only(self, cfg):
        wins = 0
        for seed in SEEDS:
            synthetic = scenario(seed=seed)
            parima = run_experiment(cfg.with_overrides(seed=seed), synthetic.viewports, synthetic.object_frames)
            pa_only = run_experiment(
                cfg.with_overrides(seed=seed, variant="pa_only"), synthetic.viewports, synthetic.object_frames)
            wins += parima.mean_tile_error <= pa_only.mean_tile_error
        assert wins >= 8

    def test_objects_ignored_when_not_followed(self, cfg):
        synthetic = scenario(name="wanderer")
        run = run_session(cfg, synthetic.viewports, synthetic.object_frames)
        late = [row[6] for row in run.predictions if row[1] >= 20 * cfg.fps]
        assert np.mean(late) < 0.2
