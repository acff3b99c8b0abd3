"""Instrumented scalars: plaintext values that carry ciphertext-style costs.

Every arithmetic operation on a :class:`TrackedValue` updates a shared
:class:`OpCounter` and the value's *level* (the number of sequential
multiplications consumed so far).  The accounting rules are:

* adding or subtracting two tracked values: level = max of the operands,
  one addition counted;
* multiplying two tracked values: level = max of the operands + 1, one
  multiplication counted;
* adding a plain constant: level unchanged, one addition counted;
* multiplying by a plain constant: one multiplication counted, and the
  level goes up by 1 unless ``charge_constant_mult`` is disabled (rescale
  after a plaintext product costs a level in fixed-point style schemes).

When a ``level_budget`` is set, a multiplication that would push a value
past the budget instead records a bootstrap event and restarts the result
at level 1 (fresh ciphertext plus the multiplication itself).
"""

from __future__ import annotations

__all__ = ["OpCounter", "TrackedValue"]


class OpCounter:
    """Shared tally of multiplications, additions and bootstrap events.

    The counter also carries the two accounting knobs (``charge_constant_mult``
    and ``level_budget``) so that every operation on values bound to it uses
    one consistent convention.  Counters are cheap; use one per logical run.
    For multi-threaded use, give each thread its own counter and combine them
    with :meth:`merge`.
    """

    __slots__ = ("mults", "adds", "bootstraps", "charge_constant_mult", "level_budget")

    def __init__(self, *, charge_constant_mult: bool = True, level_budget: int | None = None):
        if level_budget is not None and level_budget < 1:
            raise ValueError("level_budget must be a positive integer or None")
        self.mults = 0
        self.adds = 0
        self.bootstraps = 0
        self.charge_constant_mult = charge_constant_mult
        self.level_budget = level_budget

    def reset(self) -> None:
        self.mults = 0
        self.adds = 0
        self.bootstraps = 0

    def merge(self, other: "OpCounter") -> None:
        """Fold another counter's totals into this one."""
        self.mults += other.mults
        self.adds += other.adds
        self.bootstraps += other.bootstraps

    def as_dict(self) -> dict:
        return {"mults": self.mults, "adds": self.adds, "bootstraps": self.bootstraps}

    def __repr__(self) -> str:  # pragma: no cover
        return f"OpCounter(mults={self.mults}, adds={self.adds}, bootstraps={self.bootstraps})"


class TrackedValue:
    """A real scalar wrapped with a multiplicative level and an OpCounter."""

    __slots__ = ("value", "level", "counter")

    def __init__(self, value: float, counter: OpCounter, level: int = 0):
        self.value = float(value)
        self.level = int(level)
        self.counter = counter

    def _bumped(self, level: int) -> int:
        new = level + 1
        budget = self.counter.level_budget
        if budget is not None and new > budget:
            self.counter.bootstraps += 1
            return 1
        return new

    def _coerce(self, other):
        if isinstance(other, TrackedValue):
            if other.counter is not self.counter:
                raise ValueError("tracked values must share one OpCounter")
            return other
        if isinstance(other, (int, float)):
            return None
        return NotImplemented

    def __add__(self, other):
        peer = self._coerce(other)
        if peer is NotImplemented:
            return NotImplemented
        self.counter.adds += 1
        if peer is None:
            return TrackedValue(self.value + other, self.counter, self.level)
        return TrackedValue(self.value + peer.value, self.counter, max(self.level, peer.level))

    __radd__ = __add__

    def __sub__(self, other):
        peer = self._coerce(other)
        if peer is NotImplemented:
            return NotImplemented
        self.counter.adds += 1
        if peer is None:
            return TrackedValue(self.value - other, self.counter, self.level)
        return TrackedValue(self.value - peer.value, self.counter, max(self.level, peer.level))

    def __rsub__(self, other):
        if not isinstance(other, (int, float)):
            return NotImplemented
        self.counter.adds += 1
        return TrackedValue(other - self.value, self.counter, self.level)

    def __mul__(self, other):
        peer = self._coerce(other)
        if peer is NotImplemented:
            return NotImplemented
        self.counter.mults += 1
        if peer is None:
            level = self._bumped(self.level) if self.counter.charge_constant_mult else self.level
            return TrackedValue(self.value * other, self.counter, level)
        return TrackedValue(
            self.value * peer.value, self.counter, self._bumped(max(self.level, peer.level))
        )

    __rmul__ = __mul__

    def __repr__(self) -> str:  # pragma: no cover
        return f"TrackedValue({self.value!r}, level={self.level})"
