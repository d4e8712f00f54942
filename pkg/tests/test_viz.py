import numpy as np
import pytest

from fgseglab.errors import DimensionError
from fgseglab.viz import blend, heatmap, overlay_frame, threshold, write_outputs


class TestThreshold:
    def test_boundary_is_foreground(self):
        assert threshold(np.array([0.5]), 0.5)[0]

    def test_zero_theta_all_fg(self):
        assert threshold(np.zeros((3, 3)), 0.0).all()

    def test_theta_above_one_rejected(self):
        with pytest.raises(ValueError):
            threshold(np.zeros((2, 2)), 1.5)

    def test_simple_pair(self):
        out = threshold(np.array([0.2, 0.7]), 0.5)
        assert out.tolist() == [False, True]


class TestHeatmap:
    @pytest.mark.parametrize("p,rgb", [
        (0.0, (0, 0, 255)),
        (0.25, (0, 255, 255)),
        (0.5, (0, 255, 0)),
        (0.75, (255, 255, 0)),
        (1.0, (255, 0, 0)),
        (0.125, (0, 128, 255)),   # halfway blue->cyan, green rounds half up
    ])
    def test_anchors_and_interpolation(self, p, rgb):
        assert tuple(heatmap(np.array([[p]]))[0, 0]) == rgb

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            heatmap(np.array([1.2]))

    def test_monotone_red_high_blue_low(self):
        ramp_hi = np.linspace(0.75, 1.0, 16)
        reds = heatmap(ramp_hi)[:, 0].astype(int)
        assert (np.diff(reds) <= 0).all()      # red falls as p drops from 1
        ramp_lo = np.linspace(0.0, 0.25, 16)
        blues = heatmap(ramp_lo)[:, 2].astype(int)
        assert (np.diff(blues) <= 0).all()     # blue falls as p rises


class TestBlend:
    def test_alpha_zero_keeps_raw(self):
        raw = np.arange(12, dtype=np.uint8).reshape(2, 2, 3)
        heat = np.full((2, 2, 3), 200, dtype=np.uint8)
        assert np.array_equal(blend(raw, heat, 0.0), raw)

    def test_alpha_one_is_heatmap(self):
        raw = np.zeros((2, 2, 3), dtype=np.uint8)
        heat = np.full((2, 2, 3), 200, dtype=np.uint8)
        assert np.array_equal(blend(raw, heat, 1.0), heat)

    def test_hand_case_rounds_half_up(self):
        raw = np.array([[[100, 100, 100]]], dtype=np.uint8)
        heat = np.array([[[255, 0, 0]]], dtype=np.uint8)
        assert tuple(blend(raw, heat, 0.5)[0, 0]) == (178, 50, 50)

    def test_blend_with_self_is_identity(self):
        rng = np.random.default_rng(0)
        x = rng.integers(0, 256, size=(4, 4, 3), dtype=np.uint8)
        for alpha in (0.0, 0.3, 0.7, 1.0):
            assert np.array_equal(blend(x, x, alpha), x)

    def test_shape_mismatch(self):
        with pytest.raises(DimensionError):
            blend(np.zeros((2, 2, 3)), np.zeros((3, 3, 3)), 0.5)


class TestWriteOutputs:
    @staticmethod
    def _frames(n):
        rng = np.random.default_rng(1)
        for i in range(n):
            yield rng.random((8, 8, 3)), rng.random((8, 8)), f"frame{i:03d}"

    def test_writes_two_files_per_frame(self, tmp_path):
        paths = write_outputs(self._frames(3), tmp_path / "out")
        assert len(paths) == 6
        assert all(p.exists() for p in paths)

    def test_rerun_same_names(self, tmp_path):
        first = write_outputs(self._frames(2), tmp_path / "out")
        second = write_outputs(self._frames(2), tmp_path / "out")
        assert [p.name for p in first] == [p.name for p in second]

    def test_unwritable_target_raises(self, tmp_path):
        blocker = tmp_path / "not_a_dir"
        blocker.write_text("occupied")
        with pytest.raises(OSError):
            write_outputs(self._frames(1), blocker / "out")

    def test_overlay_frame_matches_manual_blend(self):
        rng = np.random.default_rng(2)
        image = rng.random((4, 4, 3))
        probs = rng.random((4, 4))
        manual = blend(np.floor(image * 255 + 0.5).astype(np.uint8),
                       heatmap(probs), 0.5)
        assert np.array_equal(overlay_frame(image, probs, 0.5), manual)
