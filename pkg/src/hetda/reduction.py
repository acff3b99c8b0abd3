"""Branch-free boundary-matrix reduction over tracked approximate columns.

Two variants are provided.  ``he_reduce`` follows the double nested loop
literally: every inner step compares lows, applies one gated update and
re-estimates the column's low.  ``he_reduce_optimized`` folds each sweep
over the preceding columns into a single cumulative update followed by
one low re-estimation, which brings the output depth down to
n(n-1)/2 * (D_low + D_comp + 1) for the per-circuit depths D_low/D_comp.

Both process column j with exactly j sweeps over the finished prefix:
each finished column can trigger at most one real mod-2 addition into
column j (its low strictly decreases afterwards), so j sweeps suffice
regardless of the order in which matches occur.

Verification mode runs an exact GF(2) shadow of the same schedule in
lockstep and snapshots per-sweep errors; production mode never consults
the plaintext truth.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .exact import as_binary_matrix, low_exact, reduce_exact
from .params import CompParams, LowParams
from .tracking import OpCounter

__all__ = [
    "ApproxMatrix",
    "VerifyReport",
    "he_reduce",
    "he_reduce_optimized",
    "round_and_verify",
    "measure_circuit_depths",
]

RANGE_LO = -0.5
RANGE_HI = 1.5


@dataclass
class ApproxMatrix:
    """Result of an approximate reduction: values, levels and low estimates."""

    values: np.ndarray
    levels: np.ndarray
    low_values: np.ndarray
    low_levels: np.ndarray
    counter: OpCounter
    variant: str
    low_params: LowParams
    comp_params: CompParams
    range_escapes: int = 0
    error_trace: list[tuple[int, int, float]] | None = None
    omega_log: list[tuple[int, int, int, float]] | None = None

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def output_depth(self) -> int:
        """Largest level among the returned matrix entries."""
        return int(self.levels.max())

    def peak_level(self) -> int:
        """Largest level reached anywhere, including the final low estimates."""
        return max(self.output_depth(), int(self.low_levels.max()))

    def rounded(self) -> np.ndarray:
        """Entries cast to the nearest integer (as floats; escapes can be large)."""
        return np.rint(self.values)


def _run(delta, pl: LowParams, pc: CompParams, *, variant: str, counter, backend,
         verify: bool, record_omegas: bool) -> ApproxMatrix:
    b = as_binary_matrix(delta)
    n = b.shape[0]
    if n < 2:
        raise ValueError("reduction needs n >= 2")
    impl = _backend.get(backend)
    counter = counter if counter is not None else OpCounter()
    d_l, dp_l, m_l, t_l = pl.as_tuple()
    d_c, dp_c, m_c, t_c = pc.as_tuple()
    phi = pc.phi

    col_v = [b[:, j].astype(np.float64) for j in range(n)]
    col_l = [np.zeros(n, dtype=np.int64) for _ in range(n)]
    low_v = np.zeros(n, dtype=np.float64)
    low_l = np.zeros(n, dtype=np.int64)

    shadow = b.astype(np.int64) if verify else None
    shadow_lows = [low_exact(shadow[:, 0])] if verify else None
    trace: list[tuple[int, int, float]] | None = [] if verify else None
    omega_log: list[tuple[int, int, int, float]] | None = [] if record_omegas else None
    escapes = 0

    low_v[0], low_l[0] = impl.low_vec(col_v[0], col_l[0], d_l, dp_l, m_l, t_l, counter)

    for j in range(1, n):
        lv, ll = impl.low_vec(col_v[j], col_l[j], d_l, dp_l, m_l, t_l, counter)
        if variant == "optimized":
            ys_v = np.stack(col_v[:j])
            ys_l = np.stack(col_l[:j])
        for k in range(j):
            if variant == "optimized":
                om_v = np.empty(j, dtype=np.float64)
                om_l = np.empty(j, dtype=np.int64)
                for j0 in range(j):
                    om_v[j0], om_l[j0] = impl.lowcomp_scalar(
                        low_v[j0], low_l[j0], lv, ll, phi, n,
                        d_c, dp_c, m_c, t_c, counter,
                    )
                    if omega_log is not None:
                        omega_log.append((j, k, j0, float(om_v[j0])))
                col_v[j], col_l[j] = impl.cumulative_update_vec(
                    col_v[j], col_l[j], ys_v, ys_l, om_v, om_l, counter
                )
                lv, ll = impl.low_vec(col_v[j], col_l[j], d_l, dp_l, m_l, t_l, counter)
                inside = (col_v[j] >= RANGE_LO) & (col_v[j] <= RANGE_HI)
                escapes += int((~inside).sum())  # non-finite entries count too
            else:
                for j0 in range(j):
                    ov, ol = impl.lowcomp_scalar(
                        low_v[j0], low_l[j0], lv, ll, phi, n,
                        d_c, dp_c, m_c, t_c, counter,
                    )
                    if omega_log is not None:
                        omega_log.append((j, k, j0, float(ov)))
                    col_v[j], col_l[j] = impl.gated_update_vec(
                        col_v[j], col_l[j], col_v[j0], col_l[j0], ov, ol, counter
                    )
                    lv, ll = impl.low_vec(col_v[j], col_l[j], d_l, dp_l, m_l, t_l, counter)
                    inside = (col_v[j] >= RANGE_LO) & (col_v[j] <= RANGE_HI)
                    escapes += int((~inside).sum())
            if verify:
                _shadow_sweep(shadow, shadow_lows, j)
                err = float(np.abs(col_v[j] - shadow[:, j]).max())
                trace.append((j, k, err))
        low_v[j], low_l[j] = lv, ll
        if verify:
            shadow_lows.append(low_exact(shadow[:, j]))

    if escapes:
        warnings.warn(
            f"{escapes} entry update(s) left the range [{RANGE_LO}, {RANGE_HI}]; "
            "the reduction probably needs stronger parameters",
            RuntimeWarning,
            stacklevel=3,
        )
    return ApproxMatrix(
        values=np.column_stack(col_v),
        levels=np.column_stack(col_l),
        low_values=low_v,
        low_levels=low_l,
        counter=counter,
        variant=variant,
        low_params=pl,
        comp_params=pc,
        range_escapes=escapes,
        error_trace=trace,
        omega_log=omega_log,
    )


def _shadow_sweep(shadow: np.ndarray, shadow_lows: list[int], j: int) -> None:
    """Apply one exact sweep of the cumulative update to the shadow column j.

    Uses exact lows with the zero-column-maps-to-n-1 convention; matches
    against a finished prefix hit at most one nonzero column, so the
    cumulative and one-at-a-time schedules agree exactly.
    """
    n = shadow.shape[0]
    lj = low_exact(shadow[:, j])
    col = shadow[:, j]
    total = np.zeros(n, dtype=np.int64)
    matches = 0
    for j0 in range(j):
        if shadow_lows[j0] == lj:
            diff = col - shadow[:, j0]
            total += diff * diff
            matches += 1
    shadow[:, j] = total + (1 - matches) * col


def he_reduce(delta, low_params: LowParams, comp_params: CompParams, *,
              counter: OpCounter | None = None, backend: str | None = None,
              verify: bool = False, record_omegas: bool = False) -> ApproxMatrix:
    """Literal double-loop reduction: low re-estimated after every gated update."""
    return _run(delta, low_params, comp_params, variant="basic", counter=counter,
                backend=backend, verify=verify, record_omegas=record_omegas)


def he_reduce_optimized(delta, low_params: LowParams, comp_params: CompParams, *,
                        counter: OpCounter | None = None, backend: str | None = None,
                        verify: bool = False, record_omegas: bool = False) -> ApproxMatrix:
    """Cumulative-update reduction: one update and one low estimate per sweep."""
    return _run(delta, low_params, comp_params, variant="optimized", counter=counter,
                backend=backend, verify=verify, record_omegas=record_omegas)


def measure_circuit_depths(n: int, pl: LowParams, pc: CompParams, *,
                           charge_constant_mult: bool = True,
                           backend: str | None = None) -> tuple[int, int]:
    """Levels consumed by one low extraction and one low comparison.

    Measured by probing the kernels on fresh level-0 inputs; the figures
    depend only on (n, parameters, accounting flags), never on values.
    """
    impl = _backend.get(backend)
    scratch = OpCounter(charge_constant_mult=charge_constant_mult)
    vals = np.zeros(n, dtype=np.float64)
    levs = np.zeros(n, dtype=np.int64)
    _, d_low = impl.low_vec(vals, levs, pl.d, pl.dprime, pl.m, pl.t, scratch)
    _, d_comp = impl.lowcomp_scalar(
        0.0, 0, 1.0, 0, pc.phi, n, pc.d, pc.dprime, pc.m, pc.t, scratch
    )
    return int(d_low), int(d_comp)


@dataclass
class VerifyReport:
    """Outcome of checking an approximate reduction against the exact one."""

    n: int
    variant: str
    max_error: float
    within_half_n: bool
    within_half: bool
    rounded_equals_exact: bool
    pairs_match: bool
    duplicate_lows: bool
    entries_above_one: int
    errors_ge_half: int
    range_escapes: int
    depth_measured: int
    depth_formula: int
    d_low_measured: int
    d_comp_measured: int
    mults: int
    adds: int
    bootstrap_events: int
    extra: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "variant": self.variant,
            "max_error": self.max_error,
            "within_half_n": self.within_half_n,
            "within_half": self.within_half,
            "rounded_equals_exact": self.rounded_equals_exact,
            "pairs_match": self.pairs_match,
            "duplicate_lows": self.duplicate_lows,
            "entries_above_one": self.entries_above_one,
            "errors_ge_half": self.errors_ge_half,
            "range_escapes": self.range_escapes,
            "depth_measured": self.depth_measured,
            "depth_formula": self.depth_formula,
            "d_low_measured": self.d_low_measured,
            "d_comp_measured": self.d_comp_measured,
            "mults": self.mults,
            "adds": self.adds,
            "bootstrap_events": self.bootstrap_events,
            **self.extra,
        }


def _pairing(matrix: np.ndarray) -> tuple[set[tuple[int, int]], bool]:
    """Low pairing {(row, col)} of nonzero columns, plus a duplicate-low flag."""
    pairs: set[tuple[int, int]] = set()
    seen: set[int] = set()
    duplicates = False
    for j in range(matrix.shape[1]):
        nz = np.flatnonzero(matrix[:, j])
        if nz.size == 0:
            continue
        i = int(nz[-1])
        if i in seen:
            duplicates = True
        seen.add(i)
        pairs.add((i, j))
    return pairs, duplicates


def round_and_verify(approx: ApproxMatrix, delta) -> VerifyReport:
    """Compare an approximate reduction to the exact reduction of ``delta``.

    Reports the maximum componentwise error against the two standard
    thresholds 1/(2n) and 1/2, whether rounding recovers the exact
    matrix, and whether the implied low pairings agree even when entries
    differ.  Out-of-range entries (the signature of overly weak
    comparator parameters) and duplicate lows after rounding (overly weak
    low parameters) are flagged rather than raised.
    """
    exact = reduce_exact(as_binary_matrix(delta))
    n = approx.n
    if exact.shape[0] != n:
        raise ValueError("matrix size mismatch")
    errors = np.abs(approx.values - exact)
    max_error = float(errors.max())
    rounded = approx.rounded()
    rounded_equals = bool(np.array_equal(rounded, exact.astype(np.float64)))
    exact_pairs, _ = _pairing(exact)
    approx_pairs, duplicates = _pairing(rounded)
    d_low, d_comp = measure_circuit_depths(
        n,
        approx.low_params,
        approx.comp_params,
        charge_constant_mult=approx.counter.charge_constant_mult,
    )
    return VerifyReport(
        n=n,
        variant=approx.variant,
        max_error=max_error,
        within_half_n=bool(max_error < 1.0 / (2.0 * n)),
        within_half=bool(max_error < 0.5),
        rounded_equals_exact=rounded_equals,
        pairs_match=bool(not duplicates and approx_pairs == exact_pairs),
        duplicate_lows=bool(duplicates),
        entries_above_one=int((approx.values > 1.0).sum()),
        errors_ge_half=int((errors >= 0.5).sum()),
        range_escapes=approx.range_escapes,
        depth_measured=approx.output_depth(),
        depth_formula=n * (n - 1) // 2 * (d_low + d_comp + 1),
        d_low_measured=d_low,
        d_comp_measured=d_comp,
        mults=approx.counter.mults,
        adds=approx.counter.adds,
        bootstrap_events=approx.counter.bootstraps,
    )
