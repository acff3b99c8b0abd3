"""Shared test utilities: independent oracles and reference circuits.

The reference circuits here are built directly from TrackedValue operator
arithmetic, giving a second, kernel-independent route to the same numbers;
the Betti-curve oracle checks diagrams using only GF(2) rank computations,
never the reduction pairing it is used to validate.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

from hetda.params import inverse_iterations_boost
from hetda.simplicial import Filtration, Simplex
from hetda.tracking import TrackedValue

# ---------------------------------------------------------------------------
# reference circuits over TrackedValue operators


def ref_inv(x: TrackedValue, d: int) -> TrackedValue:
    a = 2.0 - x
    b = 1.0 - x
    for _ in range(d):
        b = b * b
        a = a * (1.0 + b)
    return a


def ref_maxidx(values: list[TrackedValue], d: int, dp: int, m: int, t: int) -> list[TrackedValue]:
    n = len(values)
    lm = m.bit_length() - 1
    extra = inverse_iterations_boost(n, m)
    s = values[0]
    for v in values[1:]:
        s = s + v
    inv = ref_inv(s * (1.0 / n), dp)
    b = [None] * n
    for j in range(n - 1):
        b[j] = (values[j] * (1.0 / n)) * inv
    acc = b[0]
    for j in range(1, n - 1):
        acc = acc + b[j]
    b[n - 1] = 1.0 - acc
    for _ in range(t):
        p = list(b)
        for _ in range(lm):
            p = [x * x for x in p]
        s = p[0]
        for x in p[1:]:
            s = s + x
        inv = ref_inv(s, d + extra)
        for j in range(n - 1):
            b[j] = p[j] * inv
        acc = b[0]
        for j in range(1, n - 1):
            acc = acc + b[j]
        b[n - 1] = 1.0 - acc
    return b


def ref_low(values: list[TrackedValue], d: int, dp: int, m: int, t: int) -> TrackedValue:
    n = len(values)
    shifted = [values[0]] + [values[i] + (i / n) for i in range(1, n)]
    rescaled = [(v + 1.0) * 0.5 for v in shifted]
    b = ref_maxidx(rescaled, d, dp, m, t)
    r = b[1] * 1.0
    for i in range(2, n):
        r = r + b[i] * float(i)
    return r


def ref_comp(a: TrackedValue, b: TrackedValue, d: int, dp: int, m: int, t: int) -> TrackedValue:
    lm = m.bit_length() - 1
    extra = inverse_iterations_boost(2, m)
    inv = ref_inv((a + b) * 0.5, dp)
    a0 = (a * 0.5) * inv
    b0 = 1.0 - a0
    for _ in range(t):
        pa, pb = a0, b0
        for _ in range(lm):
            pa = pa * pa
            pb = pb * pb
        inv = ref_inv(pa + pb, d + extra)
        a0 = pa * inv
        b0 = 1.0 - a0
    return a0


# ---------------------------------------------------------------------------
# random filtrations and a rank-based homology oracle


def random_filtration(rng: np.random.Generator, n_vertices: int = 4, keep: float = 0.7) -> Filtration:
    """Random downward-closed complex in a random face-respecting order."""
    included = {()}
    for k in range(1, n_vertices + 1):
        for combo in combinations(range(n_vertices), k):
            faces = [combo[:i] + combo[i + 1 :] for i in range(k)]
            if all(f in included for f in faces):
                if k == 1 or rng.random() < keep:
                    included.add(combo)
    pending = set(included) - {()}
    order = [()]
    placed = {()}
    while pending:
        ready = sorted(
            s for s in pending
            if all(s[:i] + s[i + 1 :] in placed for i in range(len(s)))
        )
        pick = ready[int(rng.integers(len(ready)))]
        order.append(pick)
        placed.add(pick)
        pending.remove(pick)
    scales = [float(i) for i in range(len(order))]
    return Filtration(simplices=[Simplex(s) for s in order], scales=scales)


def gf2_rank(rows: list[int]) -> int:
    """Rank of a GF(2) matrix given as row bitmasks."""
    rank = 0
    pivots: list[int] = []
    for row in rows:
        for p in pivots:
            row = min(row, row ^ p)
        if row:
            pivots.append(row)
            rank += 1
    return rank


def betti_numbers(simplices: list[Simplex], max_dim: int) -> list[int]:
    """Betti numbers of a complex via boundary-operator ranks only.

    The empty simplex is ignored: vertices have zero boundary, so this is
    ordinary (non-reduced) homology.
    """
    by_dim: dict[int, list[Simplex]] = {}
    for s in simplices:
        if s.dimension >= 0:
            by_dim.setdefault(s.dimension, []).append(s)
    index = {
        dim: {s.vertices: i for i, s in enumerate(group)} for dim, group in by_dim.items()
    }
    ranks: dict[int, int] = {}
    for dim in range(1, max_dim + 2):
        cols = by_dim.get(dim, [])
        rows_index = index.get(dim - 1, {})
        matrix_rows = [0] * len(rows_index)
        for j, s in enumerate(cols):
            for face in s.boundary_faces():
                i = rows_index[face.vertices]
                matrix_rows[i] |= 1 << j
        ranks[dim] = gf2_rank(matrix_rows)
    betti = []
    for dim in range(max_dim + 1):
        n_k = len(by_dim.get(dim, []))
        betti.append(n_k - ranks.get(dim, 0) - ranks.get(dim + 1, 0))
    return betti


def diagram_betti_at(diagrams, scale: float, max_dim: int) -> list[int]:
    """Number of classes alive at a given scale, per dimension, from diagrams."""
    alive = [0] * (max_dim + 1)
    for dgm in diagrams:
        if dgm.dimension > max_dim or dgm.dimension < 0:
            continue
        for birth, death in dgm.points:
            if birth <= scale < death:
                alive[dgm.dimension] += 1
        for birth in dgm.essential:
            if birth <= scale:
                alive[dgm.dimension] += 1
    return alive
