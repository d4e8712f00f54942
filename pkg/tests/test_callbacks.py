import math

import pytest

from fgseglab.train.callbacks import LR_FLOOR, EarlyStopping, ReduceLROnPlateau


class TestReduceLROnPlateau:
    def test_six_flat_epochs_reduce_once(self):
        cb = ReduceLROnPlateau(1e-4, factor=0.1, patience=5)
        lrs = [cb.update(1.0) for _ in range(6)]
        assert lrs[:5] == [1e-4] * 5
        assert math.isclose(lrs[5], 1e-5, rel_tol=1e-12)

    def test_exactly_five_nonimproving_epochs(self):
        cb = ReduceLROnPlateau(1e-4, factor=0.1, patience=5)
        cb.update(0.5)                        # initial best
        for i in range(4):
            assert cb.update(0.5) == 1e-4     # epochs 1..4 of the plateau
        assert math.isclose(cb.update(0.5), 1e-5, rel_tol=1e-12)   # epoch 5

    def test_strictly_decreasing_never_reduces(self):
        cb = ReduceLROnPlateau(1e-4, factor=0.1, patience=5)
        for i in range(30):
            assert cb.update(1.0 - 0.01 * i) == 1e-4

    def test_floor(self):
        cb = ReduceLROnPlateau(LR_FLOOR, factor=0.1, patience=1)
        for _ in range(5):
            assert cb.update(1.0) >= LR_FLOOR
        assert cb.lr == LR_FLOOR

    def test_improvement_below_min_delta_counts_as_plateau(self):
        cb = ReduceLROnPlateau(1e-4, factor=0.1, patience=2, min_delta=1e-4)
        cb.update(1.0)
        cb.update(1.0 - 5e-5)    # not a real improvement
        out = cb.update(1.0 - 9e-5)
        assert math.isclose(out, 1e-5, rel_tol=1e-12)

    def test_patience_counter_resets_after_reduction(self):
        cb = ReduceLROnPlateau(1e-2, factor=0.1, patience=2)
        seq = [cb.update(1.0) for _ in range(7)]
        # best at epoch 1; reductions after epochs 3, 5, 7
        assert [f"{v:.0e}" for v in seq] == \
            ["1e-02", "1e-02", "1e-03", "1e-03", "1e-04", "1e-04", "1e-05"]


class TestEarlyStopping:
    def test_ten_flat_epochs_after_best(self):
        cb = EarlyStopping(patience=10)
        assert cb.update(0.7) is False
        flags = [cb.update(0.7) for _ in range(10)]
        assert flags[:9] == [False] * 9
        assert flags[9] is True

    def test_improvement_resets_counter(self):
        cb = EarlyStopping(patience=10)
        cb.update(1.0)
        for _ in range(8):
            assert cb.update(1.0) is False
        assert cb.update(0.5) is False      # improvement at epoch 9
        for _ in range(9):
            assert cb.update(0.5) is False
        assert cb.update(0.5) is True

    def test_fewer_epochs_than_patience(self):
        cb = EarlyStopping(patience=10)
        assert not any(cb.update(1.0) for _ in range(9))

    def test_tiny_improvement_does_not_reset(self):
        cb = EarlyStopping(patience=3, min_delta=1e-4)
        cb.update(1.0)
        assert cb.update(1.0 - 5e-5) is False
        assert cb.update(1.0 - 6e-5) is False
        assert cb.update(1.0 - 7e-5) is True
