import pytest

from hetda.tracking import OpCounter, TrackedValue


def test_add_sub_take_max_level_and_count_adds():
    c = OpCounter()
    x = TrackedValue(2.0, c, level=3)
    y = TrackedValue(5.0, c, level=1)
    z = x + y
    assert (z.value, z.level) == (7.0, 3)
    w = x - y
    assert (w.value, w.level) == (-3.0, 3)
    assert c.adds == 2 and c.mults == 0


def test_mult_bumps_max_level():
    c = OpCounter()
    x = TrackedValue(2.0, c, level=1)
    y = TrackedValue(3.0, c, level=4)
    z = x * y
    assert (z.value, z.level) == (6.0, 5)
    assert c.mults == 1


def test_constant_add_keeps_level_constant_mult_bumps():
    c = OpCounter()
    x = TrackedValue(2.0, c, level=2)
    assert (x + 1.5).level == 2
    assert (1.5 + x).level == 2
    assert (1.0 - x).level == 2
    assert (x * 0.5).level == 3
    assert (0.5 * x).level == 3
    assert c.adds == 3 and c.mults == 2


def test_constant_mult_uncharged_when_disabled():
    c = OpCounter(charge_constant_mult=False)
    x = TrackedValue(2.0, c, level=2)
    assert (x * 0.5).level == 2
    y = TrackedValue(3.0, c, level=2)
    assert (x * y).level == 3  # ciphertext products always charge
    assert c.mults == 2


def test_level_budget_triggers_bootstraps():
    c = OpCounter(level_budget=3)
    x = TrackedValue(1.0, c, level=0)
    for _ in range(7):
        x = x * x
    assert c.bootstraps == 2  # resets at levels 4 -> 1, twice
    assert x.level <= 3


def test_level_budget_validation():
    with pytest.raises(ValueError):
        OpCounter(level_budget=0)


def test_mixed_counters_rejected():
    a = TrackedValue(1.0, OpCounter())
    b = TrackedValue(1.0, OpCounter())
    with pytest.raises(ValueError):
        _ = a + b


def test_merge_folds_totals():
    a, b = OpCounter(), OpCounter()
    x = TrackedValue(1.0, a)
    _ = x * x
    y = TrackedValue(1.0, b)
    _ = y + y
    a.merge(b)
    assert a.mults == 1 and a.adds == 1
