"""Branch-free approximate primitives over tracked scalars.

All functions here are polynomial circuits: no comparisons or branches on
the data, only additions and multiplications, so they can run on values
an evaluator cannot inspect.  Inputs and outputs are
:class:`~hetda.tracking.TrackedValue` instances sharing one
:class:`~hetda.tracking.OpCounter`; levels and operation counts are
updated by the selected kernel backend.

Domain checks raise :class:`DomainError` by default.  Pass
``strict=False`` to skip them (the reduction drivers do this, since
mid-reduction values legitimately drift slightly outside the nominal
ranges and out-of-contract behaviour is itself of interest there).
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from . import _backend
from .params import CompParams, LowParams
from .tracking import OpCounter, TrackedValue

__all__ = [
    "DomainError",
    "inv",
    "transform_s",
    "transform_tl",
    "transform_tc",
    "maxidx",
    "low_circuit",
    "comp",
    "lowcomp",
    "gated_update",
]


class DomainError(ValueError):
    """An input lies outside a circuit's guaranteed operating range."""


def _shared_counter(values: Sequence[TrackedValue]) -> OpCounter:
    counter = values[0].counter
    for v in values[1:]:
        if v.counter is not counter:
            raise ValueError("all inputs must share one OpCounter")
    return counter


def inv(x: TrackedValue, d: int, *, strict: bool = True) -> TrackedValue:
    """Reciprocal approximation on (0, 2) with d refinement rounds.

    Exact at x = 1; the absolute error is |1 - x| ** (2 ** (d + 1)) / x,
    so accuracy degrades as x approaches either end of the interval.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    if strict and not (0.0 < x.value < 2.0):
        raise DomainError(f"inv requires a value in (0, 2), got {x.value}")
    rv, rl = _backend.active().inv_scalar(x.value, x.level, d, x.counter)
    return TrackedValue(rv, x.counter, rl)


def transform_s(values) -> np.ndarray:
    """Add the index slope i/n to each entry (plain floats)."""
    v = np.asarray(values, dtype=np.float64)
    n = v.shape[0]
    return v + np.arange(n, dtype=np.float64) / n


def transform_tl(values) -> np.ndarray:
    """Affinely map [0, 2) into [1/2, 3/2), preserving the argmax."""
    v = np.asarray(values, dtype=np.float64)
    return (v + 1.0) * 0.5


def transform_tc(x: float, n: int) -> float:
    """Monotone map of [0, (n-1)**2] into [1/2, 3/2): 1/2 + x / n**2."""
    return 0.5 + float(x) * (1.0 / (n * n))


def maxidx(
    values: Sequence[TrackedValue],
    d: int,
    dprime: int,
    m: int,
    t: int,
    *,
    strict: bool = True,
) -> list[TrackedValue]:
    """Approximate one-hot indicator of the largest entry.

    Entries must be pairwise distinct values in [1/2, 3/2).  The result
    has entries in [0, 1], close to 1 at the argmax and close to 0
    elsewhere; the last entry is derived as one minus the sum of the
    others, so the vector sums to 1 exactly.
    """
    if len(values) < 2:
        raise ValueError("maxidx needs at least two entries")
    counter = _shared_counter(values)
    vals = np.array([v.value for v in values], dtype=np.float64)
    levs = np.array([v.level for v in values], dtype=np.int64)
    if strict:
        if not np.all((vals >= 0.5) & (vals < 1.5)):
            raise DomainError("maxidx requires values in [1/2, 3/2)")
        if np.unique(vals).size != vals.size:
            raise DomainError("maxidx requires pairwise distinct values")
    bv, bl = _backend.active().maxidx_vec(vals, levs, d, dprime, m, t, counter)
    out = [TrackedValue(v, counter, l) for v, l in zip(bv, bl)]
    if strict:
        assert all(-1e-9 <= o.value <= 1.0 + 1e-9 for o in out), "indicator left [0, 1]"
    return out


def low_circuit(
    values: Sequence[TrackedValue], params: LowParams, *, strict: bool = True
) -> TrackedValue:
    """Approximate the largest index holding a 1 in an almost-binary vector.

    The all-zero vector yields approximately n - 1.  With parameters from
    :func:`hetda.params.low_params` the result is within delta of the
    exact value whenever each entry sits within epsilon/(2n) of a bit.
    """
    if len(values) < 2:
        raise ValueError("low_circuit needs at least two entries")
    counter = _shared_counter(values)
    vals = np.array([v.value for v in values], dtype=np.float64)
    levs = np.array([v.level for v in values], dtype=np.int64)
    n = vals.size
    if strict:
        if not np.all((vals >= 0.0) & (vals <= 1.0)):
            raise DomainError("low_circuit requires entries in [0, 1]")
        if not np.all(np.minimum(vals, 1.0 - vals) < 1.0 / (2.0 * n)):
            raise DomainError("low_circuit requires entries within 1/(2n) of a bit")
    rv, rl = _backend.active().low_vec(
        vals, levs, params.d, params.dprime, params.m, params.t, counter
    )
    return TrackedValue(rv, counter, rl)


def comp(
    a: TrackedValue,
    b: TrackedValue,
    d: int,
    dprime: int,
    m: int,
    t: int,
    *,
    strict: bool = True,
) -> TrackedValue:
    """Soft indicator of a > b for distinct a, b in [1/2, 3/2).

    The output lies in (0, 1): near 1 when a > b and near 0 when a < b.
    By construction the two complementary calls sum to 1.
    """
    counter = _shared_counter([a, b])
    if strict:
        for v in (a.value, b.value):
            if not (0.5 <= v < 1.5):
                raise DomainError("comp requires values in [1/2, 3/2)")
        if a.value == b.value:
            raise DomainError("comp requires distinct inputs")
    rv, rl = _backend.active().comp_scalar(
        a.value, a.level, b.value, b.level, d, dprime, m, t, counter
    )
    if strict:
        assert -1e-9 < rv < 1.0 + 1e-9, "comparison output left (0, 1)"
    return TrackedValue(rv, counter, rl)


def lowcomp(
    lx: TrackedValue,
    ly: TrackedValue,
    params: CompParams,
    n: int,
    *,
    strict: bool = True,
) -> TrackedValue:
    """Soft equality indicator for two low estimates in [0, n-1].

    Compares the squared difference against params.phi squared after the
    monotone rescale; near 1 when the underlying lows agree, near 0
    otherwise.
    """
    counter = _shared_counter([lx, ly])
    if strict:
        for v in (lx.value, ly.value):
            if not (-0.5 <= v <= n - 0.5):
                raise DomainError("lowcomp requires low estimates within [0, n-1]")
    rv, rl = _backend.active().lowcomp_scalar(
        lx.value,
        lx.level,
        ly.value,
        ly.level,
        params.phi,
        n,
        params.d,
        params.dprime,
        params.m,
        params.t,
        counter,
    )
    return TrackedValue(rv, counter, rl)


def gated_update(
    xs: Sequence[TrackedValue],
    ys: Sequence[TrackedValue],
    omega: TrackedValue,
) -> list[TrackedValue]:
    """Componentwise omega * (x - y)**2 + (1 - omega) * x.

    For binary vectors and omega in {0, 1} this is either the mod-2 sum
    (omega = 1) or the identity (omega = 0); a near-binary omega gives a
    proportionally blended column.
    """
    if len(xs) != len(ys):
        raise ValueError("column length mismatch")
    counter = _shared_counter(list(xs) + list(ys) + [omega])
    xv = np.array([v.value for v in xs], dtype=np.float64)
    xl = np.array([v.level for v in xs], dtype=np.int64)
    yv = np.array([v.value for v in ys], dtype=np.float64)
    yl = np.array([v.level for v in ys], dtype=np.int64)
    ov, ol = _backend.active().gated_update_vec(
        xv, xl, yv, yl, omega.value, omega.level, counter
    )
    return [TrackedValue(v, counter, l) for v, l in zip(ov, ol)]
