import math

import pytest

from core.exceptions import InvalidInput
from geometry.quaternion import HeadQuaternion
from utils.traces import HeadTrace, read_head_trace, resample_trace, write_head_trace

W, H = 3840, 1920
IDENTITY = (1.0, 0.0, 0.0, 0.0)
YAW_HALF_PI = (math.sqrt(0.5), 0.0, 0.0, math.sqrt(0.5))


def trace(samples):
    return HeadTrace(user_id="u", video_id="v",
                     samples=[HeadQuaternion(*q, timestamp=t) for t, q in samples])


class TestResample:

    def test_samples_at_frame_times(self):
        t = trace([(0.0, IDENTITY), (0.1, YAW_HALF_PI), (0.2, IDENTITY)])
        viewports = resample_trace(t, 10, W, H)
        assert len(viewports) == 3
        assert viewports[0].x == pytest.approx(W / 2)
        assert viewports[1].x == pytest.approx(3 * W / 4)
        assert viewports[2].x == pytest.approx(W / 2)

    def test_nearest_sample(self):
        t = trace([(0.0, IDENTITY), (0.09, YAW_HALF_PI), (0.5, IDENTITY)])
        viewports = resample_trace(t, 10, W, H, n_frames=2)
        assert viewports[1].x == pytest.approx(3 * W / 4)

    def test_tie_goes_to_earlier_sample(self):
        t = trace([(0.0, IDENTITY), (0.5, YAW_HALF_PI)])
        viewports = resample_trace(t, 4, W, H)
        assert len(viewports) == 3
        assert viewports[1].x == pytest.approx(W / 2)

    def test_constant_trace(self):
        t = trace([(k * 0.03, YAW_HALF_PI) for k in range(40)])
        viewports = resample_trace(t, 30, W, H)
        assert len({(round(v.x, 6), round(v.y, 6)) for v in viewports}) == 1

    def test_empty(self):
        with pytest.raises(InvalidInput):
            resample_trace(HeadTrace(user_id="u", video_id="v"), 30, W, H)

    def test_gap_is_not_fatal(self):
        t = trace([(0.0, IDENTITY), (3.0, IDENTITY)])
        assert len(resample_trace(t, 1, W, H)) == 4

    def test_decreasing_timestamps(self):
        with pytest.raises(InvalidInput):
            trace([(1.0, IDENTITY), (0.5, IDENTITY)])


class TestReaders:

    def test_generic_round_trip(self, tmp_path):
        original = trace([(0.0, IDENTITY), (0.5, YAW_HALF_PI)])
        path = write_head_trace(str(tmp_path / "alice.csv"), original)
        loaded = read_head_trace(path)
        assert loaded.user_id == "alice"
        assert [(q.timestamp, q.w, q.z) for q in loaded.samples] == [(0.0, 1.0, 0.0), (0.5, YAW_HALF_PI[0], YAW_HALF_PI[3])]

    def test_ds2_layout(self, tmp_path):
        path = tmp_path / "user03.csv"
        path.write_text(
            "Timestamp,PlaybackTime,UnitQuaternion.x,UnitQuaternion.y,UnitQuaternion.z,UnitQuaternion.w\n"
            "2017-01-01,0.0,0,0,0,1\n"
            "2017-01-01,0.5,0,0,0.7071067811865476,0.7071067811865476\n")
        loaded = read_head_trace(str(path), layout="ds2")
        assert [q.timestamp for q in loaded.samples] == [0.0, 0.5]
        assert loaded.samples[1].z == pytest.approx(math.sqrt(0.5))

    def test_ds1_layout_skips_junk(self, tmp_path):
        path = tmp_path / "video_0.txt"
        path.write_text("header line\n0.0 0 0 0 0 1\n0.033, 1, 0, 0, 0.7071067811865476, 0.7071067811865476\n")
        loaded = read_head_trace(str(path), layout="ds1")
        assert len(loaded.samples) == 2
        assert loaded.samples[0].w == 1.0

    def test_missing_file(self, tmp_path):
        with pytest.raises(InvalidInput):
            read_head_trace(str(tmp_path / "missing.csv"))

    def test_unknown_layout(self, tmp_path):
        with pytest.raises(InvalidInput):
            read_head_trace(str(tmp_path / "x.csv"), layout="ds9")

    def test_missing_columns(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("timestamp,w,x\n0,1,0\n")
        with pytest.raises(InvalidInput):
            read_head_trace(str(path))
