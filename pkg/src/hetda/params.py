"""Parameter selection, error budgets and depth/cost estimates.

The circuits in :mod:`hetda.circuits` are controlled by two tuples
``(d, d', m, t)``: one for the low extractor and one for the low
comparator.  This module derives the smallest integer tuples meeting a
requested accuracy budget, the optimal comparison threshold ``phi``, and
closed-form depth and operation-count estimates for a full reduction.

All logarithms are base 2, matching accuracy targets of the form
``2**-alpha``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "LowParams",
    "CompParams",
    "ErrorBudget",
    "BudgetResolution",
    "DepthReport",
    "ParameterInfeasible",
    "low_params",
    "lowcomp_params",
    "phi_optimal",
    "params_for_budget",
    "depth_estimate",
    "low_ratio_bound",
    "lowcomp_ratio_bound",
    "inverse_iterations_boost",
]


class ParameterInfeasible(Exception):
    """No finite parameter choice satisfies the requested budget.

    ``reason`` names the bound that collapsed, so callers (and the CLI)
    can report the cause instead of a bare failure.
    """

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


def _require_power_of_two(m: int) -> int:
    if m < 2 or (m & (m - 1)) != 0:
        raise ValueError("m must be a power of two >= 2")
    return m.bit_length() - 1


@dataclass(frozen=True)
class LowParams:
    """Knobs of the low extractor: reciprocal rounds d/d', power base m, rounds t."""

    d: int
    dprime: int
    m: int
    t: int

    def __post_init__(self):
        if min(self.d, self.dprime, self.t) < 1:
            raise ValueError("d, d' and t must be >= 1")
        _require_power_of_two(self.m)

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.d, self.dprime, self.m, self.t)


@dataclass(frozen=True)
class CompParams:
    """Knobs of the low comparator, plus the equality threshold phi."""

    d: int
    dprime: int
    m: int
    t: int
    phi: float

    def __post_init__(self):
        if min(self.d, self.dprime, self.t) < 1:
            raise ValueError("d, d' and t must be >= 1")
        _require_power_of_two(self.m)
        if not (0.0 < self.phi < 1.0):
            raise ValueError("phi must lie in (0, 1)")

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.d, self.dprime, self.m, self.t)


@dataclass(frozen=True)
class ErrorBudget:
    """Accuracy targets and the exponents derived from them."""

    n: int
    delta: float
    eta: float
    epsilon: float
    alpha_low: int
    alpha_comp: int


@dataclass(frozen=True)
class BudgetResolution:
    low: LowParams
    comp: CompParams
    budget: ErrorBudget


def _int_above(x: float) -> int:
    """Smallest integer strictly greater than x."""
    return math.floor(x) + 1


def inverse_iterations_boost(summands: int, m: int) -> int:
    """Extra reciprocal iterations used inside a normalize-and-power loop.

    The normalization sum over ``summands`` entries of a mass-one vector
    can be as small as ``summands**(1 - m)``; the plain iteration needs
    ``(m - 1) * ceil(log2(summands))`` extra doublings to keep its
    relative error scale-free there.  Kernels in both backends apply the
    same rule.
    """
    return (m - 1) * ((summands - 1).bit_length())


def low_ratio_bound(n: int, epsilon: float) -> float:
    """Lower bound on top-two ratio after the low transforms: 1 + (2-2eps)/(6n-4+eps)."""
    return 1.0 + (2.0 - 2.0 * epsilon) / (6.0 * n - 4.0 + epsilon)


def lowcomp_ratio_bound(n: int, delta: float) -> float:
    """Lower bound on the comparator's input ratio at the optimal threshold."""
    num = n * n + 2.0 * (1.0 - 2.0 * delta) ** 2
    den = n * n + 2.0 * (2.0 * delta) ** 2
    return math.sqrt(num / den)


def _validate_common(n: int, delta: float) -> None:
    if n < 2:
        raise ValueError("n must be >= 2")
    if not (0.0 < delta < 0.25):
        raise ValueError("delta must lie in (0, 1/4)")


def low_params(n: int, delta: float, epsilon: float = 0.5, m: int = 2) -> tuple[LowParams, int]:
    """Smallest (d, d', m, t) giving delta-accurate low estimates.

    ``epsilon`` scales how far inputs may sit from binary (at most
    ``epsilon / (2n)`` per entry).  Returns the tuple and the accuracy
    exponent alpha it was derived from.
    """
    _validate_common(n, delta)
    if epsilon < 0.0:
        raise ValueError("epsilon must be >= 0")
    lm = _require_power_of_two(m)
    if epsilon >= 1.0:
        raise ParameterInfeasible(
            "top-two ratio bound collapses to 1 at epsilon >= 1; "
            "no finite t exists for the low extractor"
        )
    alpha = _int_above(math.log2(3.0) + 2.0 * math.log2(n) - math.log2(delta) - 1.0)
    c = low_ratio_bound(n, epsilon)
    t_bound = (math.log2(alpha + 1.0 + math.log2(n)) - math.log2(math.log2(c))) / lm
    if not math.isfinite(t_bound):
        raise ParameterInfeasible("low extractor round bound t is not finite")
    t = max(1, math.ceil(t_bound))
    d_bound = math.log2(alpha + t + 2.0) + (m - 1.0) * math.log2(n) - 1.0
    d = max(1, math.ceil(d_bound))
    return LowParams(d=d, dprime=d, m=m, t=t), alpha


def phi_optimal(n: int, delta: float) -> float:
    """Equality threshold whose rescaled square is the geometric mean of the
    rescaled squares of the two gap extremes 2*delta and 1-2*delta."""
    _validate_common(n, delta)
    a = 0.5 + (2.0 * delta / n) ** 2
    c = 0.5 + ((1.0 - 2.0 * delta) / n) ** 2
    return n * math.sqrt(math.sqrt(a * c) - 0.5)


def lowcomp_params(n: int, delta: float, eta: float, m: int = 2) -> tuple[CompParams, int]:
    """Smallest (d, d', m, t) giving an eta-accurate low-equality indicator,
    together with the optimal threshold phi and the derived exponent alpha.

    The d' rule carries an extra gap term log2(2c / (c - 1)): the
    comparator's first normalization must have relative error well below
    the worst-case input gap (c - 1)/(2c), which shrinks like 1/n**2 here,
    or near-tie comparisons invert.  The term vanishes into the plain
    log2(alpha + 2) - 1 rule once c is bounded away from 1.
    """
    _validate_common(n, delta)
    if not (0.0 < eta < 1.0):
        raise ValueError("eta must lie in (0, 1)")
    lm = _require_power_of_two(m)
    alpha = _int_above(-math.log2(eta))
    c = lowcomp_ratio_bound(n, delta)
    if c <= 1.0:
        raise ParameterInfeasible(
            "comparator ratio bound collapsed to 1 (delta too close to 1/4)"
        )
    t_bound = (math.log2(alpha + 2.0) - math.log2(math.log2(c))) / lm
    if not math.isfinite(t_bound):
        raise ParameterInfeasible("comparator round bound t is not finite")
    t = max(1, math.ceil(t_bound))
    d = max(1, math.ceil(math.log2(alpha + t + 2.0) + m - 2.0))
    gap_term = math.log2(2.0 * c / (c - 1.0))
    dprime = max(1, math.ceil(math.log2(alpha + 2.0 + gap_term) - 1.0))
    return CompParams(d=d, dprime=dprime, m=m, t=t, phi=phi_optimal(n, delta)), alpha


def params_for_budget(
    n: int, delta: float, eta: float, epsilon: float = 0.5, m: int = 2
) -> BudgetResolution:
    """Resolve a full error budget (delta, eta, epsilon) into both tuples."""
    low, alpha_low = low_params(n, delta, epsilon, m)
    comp, alpha_comp = lowcomp_params(n, delta, eta, m)
    budget = ErrorBudget(
        n=n, delta=delta, eta=eta, epsilon=epsilon, alpha_low=alpha_low, alpha_comp=alpha_comp
    )
    return BudgetResolution(low=low, comp=comp, budget=budget)


# ---------------------------------------------------------------------------
# depth and operation-count estimates


@dataclass(frozen=True)
class DepthReport:
    """Closed-form depth and cost figures for a full optimized reduction.

    ``d_low``/``d_comp`` use the per-circuit convention
    ``d' + 2 + t * (d + log2(m) + 2)`` whose column sum ``d_column =
    d_low + d_comp + 1`` matches published parameter tables; the
    ``*_alt`` fields record the alternate published convention
    ``d + 1 + t * (d' + log2(m) + 2)``, which differs and is kept for
    reference rather than silently reconciled.  ``mult_count`` /
    ``add_count`` instantiate the asymptotic cost with this package's own
    counting convention (see the count helpers below); they track the
    implemented kernels exactly.
    """

    n: int
    d_low: int
    d_comp: int
    d_column: int
    total_depth: int
    d_low_alt: int
    d_comp_alt: int
    mult_count: int
    add_count: int

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "d_low": self.d_low,
            "d_comp": self.d_comp,
            "d_column": self.d_column,
            "total_depth": self.total_depth,
            "d_low_alt": self.d_low_alt,
            "d_comp_alt": self.d_comp_alt,
            "mult_count": self.mult_count,
            "add_count": self.add_count,
        }


def _header_depth(p) -> int:
    lm = p.m.bit_length() - 1
    return p.dprime + 2 + p.t * (p.d + lm + 2)


def _alt_depth(p) -> int:
    lm = p.m.bit_length() - 1
    return p.d + 1 + p.t * (p.dprime + lm + 2)


def inv_counts(d: int) -> tuple[int, int]:
    """(mults, adds) of one reciprocal call with d iterations."""
    return 2 * d, 2 + d


def maxidx_counts(n: int, d: int, dprime: int, m: int, t: int) -> tuple[int, int]:
    """(mults, adds) of one indicator extraction on an n-vector."""
    lm = m.bit_length() - 1
    de = d + inverse_iterations_boost(n, m)
    im0, ia0 = inv_counts(dprime)
    im, ia = inv_counts(de)
    mults = 1 + im0 + 2 * (n - 1) + t * (n * lm + im + (n - 1))
    adds = (n - 1) + ia0 + (n - 1) + t * ((n - 1) + ia + (n - 1))
    return mults, adds


def low_counts(n: int, p: LowParams) -> tuple[int, int]:
    """(mults, adds) of one low extraction on an n-vector."""
    mm, ma = maxidx_counts(n, p.d, p.dprime, p.m, p.t)
    mults = n + mm + (n - 1)
    adds = (n - 1) + n + ma + (n - 2)
    return mults, adds


def comp_counts(d: int, dprime: int, m: int, t: int) -> tuple[int, int]:
    """(mults, adds) of one comparison."""
    lm = m.bit_length() - 1
    de = d + inverse_iterations_boost(2, m)
    im0, ia0 = inv_counts(dprime)
    im, ia = inv_counts(de)
    mults = 1 + im0 + 2 + t * (2 * lm + im + 1)
    adds = 1 + ia0 + 1 + t * (1 + ia + 1)
    return mults, adds


def lowcomp_counts(p: CompParams) -> tuple[int, int]:
    """(mults, adds) of one low-equality indicator."""
    cm, ca = comp_counts(p.d, p.dprime, p.m, p.t)
    return cm + 2, ca + 2


def reduction_counts(n: int, pl: LowParams, pc: CompParams, variant: str = "optimized") -> tuple[int, int]:
    """(mults, adds) of a full n x n reduction, per implemented kernel walk."""
    lo_m, lo_a = low_counts(n, pl)
    lc_m, lc_a = lowcomp_counts(pc)
    sum_j = n * (n - 1) // 2
    sum_j2 = n * (n - 1) * (2 * n - 1) // 6
    if variant == "optimized":
        lows = n + sum_j
        lowcomps = sum_j2
        # rounds: column j runs j rounds of J = j gated terms each
        upd_m = sum(j * (2 * j * n + n) for j in range(1, n))
        upd_a = sum(j * (2 * j * n + j) for j in range(1, n))
    elif variant == "basic":
        lows = n + sum_j2
        lowcomps = sum_j2
        upd_m = sum_j2 * 3 * n
        upd_a = sum_j2 * (2 * n + 1)
    else:
        raise ValueError(f"unknown variant: {variant!r}")
    mults = lows * lo_m + lowcomps * lc_m + upd_m
    adds = lows * lo_a + lowcomps * lc_a + upd_a
    return mults, adds


def depth_estimate(n: int, pl: LowParams, pc: CompParams) -> DepthReport:
    """Formula-based depth and cost report for an n x n optimized reduction."""
    if n < 2:
        raise ValueError("n must be >= 2")
    d_low = _header_depth(pl)
    d_comp = _header_depth(pc)
    d_column = d_low + d_comp + 1
    mults, adds = reduction_counts(n, pl, pc, "optimized")
    return DepthReport(
        n=n,
        d_low=d_low,
        d_comp=d_comp,
        d_column=d_column,
        total_depth=n * (n - 1) // 2 * d_column,
        d_low_alt=_alt_depth(pl),
        d_comp_alt=_alt_depth(pc),
        mult_count=mults,
        add_count=adds,
    )
