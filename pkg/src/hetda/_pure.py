"""Pure-Python circuit kernels.

These are the reference kernels behind the public API in
:mod:`hetda.circuits` and the reduction drivers in :mod:`hetda.reduction`.
``hetda._speedups`` implements the same functions in Cython; the two must
perform the identical floating-point operations in the identical order so
that results, levels and operation counts agree bit for bit (enforced by
the backend parity tests).

Conventions shared by both backends:

* values are IEEE doubles, levels are integers;
* scalar kernels take/return ``(value, level)`` pairs, vector kernels
  take/return float64/int64 numpy arrays;
* operation tallies are accumulated locally and flushed once per call
  into the caller's :class:`~hetda.tracking.OpCounter`;
* the reciprocal used inside a normalize-and-power loop over ``k``
  summands runs ``(m - 1) * ceil(log2(k))`` extra iterations, because the
  normalization sum can be as small as ``k**(1 - m)`` and the plain
  iteration loses accuracy near zero.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "pure"


class _Scratch:
    __slots__ = ("mults", "adds", "boots", "charge", "budget")

    def __init__(self, tally):
        self.mults = 0
        self.adds = 0
        self.boots = 0
        self.charge = bool(tally.charge_constant_mult)
        budget = tally.level_budget
        self.budget = -1 if budget is None else int(budget)


def _flush(tally, st: _Scratch) -> None:
    tally.mults += st.mults
    tally.adds += st.adds
    tally.bootstraps += st.boots


def _bump(level: int, st: _Scratch) -> int:
    new = level + 1
    if 0 <= st.budget < new:
        st.boots += 1
        return 1
    return new


def _cmul_level(level: int, st: _Scratch) -> int:
    return _bump(level, st) if st.charge else level


def _pow2_exponent(m: int) -> int:
    e = m.bit_length() - 1
    if m < 2 or (1 << e) != m:
        raise ValueError("m must be a power of two >= 2")
    return e


def _boost(summands: int, m: int) -> int:
    return (m - 1) * ((summands - 1).bit_length())


def _inv_core(xv: float, xl: int, d: int, st: _Scratch):
    # a = 2 - x, b = 1 - x; then d rounds of b <- b^2, a <- a * (1 + b).
    av = 2.0 - xv
    al = xl
    st.adds += 1
    bv = 1.0 - xv
    bl = xl
    st.adds += 1
    for _ in range(d):
        bv = bv * bv
        bl = _bump(bl, st)
        st.mults += 1
        tv = 1.0 + bv
        tl = bl
        st.adds += 1
        av = av * tv
        al = _bump(al if al >= tl else tl, st)
        st.mults += 1
    return av, al


def inv_scalar(xv: float, xl: int, d: int, tally):
    """Iterative reciprocal of ``x`` in (0, 2); error ~ |1-x|**(2**(d+1))."""
    st = _Scratch(tally)
    rv, rl = _inv_core(float(xv), int(xl), int(d), st)
    _flush(tally, st)
    return rv, rl


def _maxidx_core(v, l, d: int, dp: int, m: int, t: int, st: _Scratch):
    n = len(v)
    lm = _pow2_exponent(m)
    extra = _boost(n, m)
    scale = 1.0 / n
    # normalize by the mean
    sv = v[0]
    sl = l[0]
    for j in range(1, n):
        sv = sv + v[j]
        if l[j] > sl:
            sl = l[j]
        st.adds += 1
    sv = sv * scale
    sl = _cmul_level(sl, st)
    st.mults += 1
    iv, il = _inv_core(sv, sl, dp, st)
    b = [0.0] * n
    bl = [0] * n
    for j in range(n - 1):
        tv = v[j] * scale
        tl = _cmul_level(l[j], st)
        st.mults += 1
        b[j] = tv * iv
        bl[j] = _bump(tl if tl >= il else il, st)
        st.mults += 1
    accv = b[0]
    accl = bl[0]
    for j in range(1, n - 1):
        accv = accv + b[j]
        if bl[j] > accl:
            accl = bl[j]
        st.adds += 1
    b[n - 1] = 1.0 - accv
    bl[n - 1] = accl
    st.adds += 1
    # t rounds of power-and-renormalize; the last slot re-derived as 1 - sum
    for _ in range(t):
        p = list(b)
        pl = list(bl)
        for _ in range(lm):
            for j in range(n):
                p[j] = p[j] * p[j]
                pl[j] = _bump(pl[j], st)
                st.mults += 1
        sv = p[0]
        sl = pl[0]
        for j in range(1, n):
            sv = sv + p[j]
            if pl[j] > sl:
                sl = pl[j]
            st.adds += 1
        iv, il = _inv_core(sv, sl, d + extra, st)
        for j in range(n - 1):
            b[j] = p[j] * iv
            bl[j] = _bump(pl[j] if pl[j] >= il else il, st)
            st.mults += 1
        accv = b[0]
        accl = bl[0]
        for j in range(1, n - 1):
            accv = accv + b[j]
            if bl[j] > accl:
                accl = bl[j]
            st.adds += 1
        b[n - 1] = 1.0 - accv
        bl[n - 1] = accl
        st.adds += 1
    return b, bl


def maxidx_vec(vals, levs, d: int, dp: int, m: int, t: int, tally):
    """Approximate one-hot indicator of the maximum entry of ``vals``."""
    st = _Scratch(tally)
    b, bl = _maxidx_core(list(map(float, vals)), [int(x) for x in levs], d, dp, m, t, st)
    _flush(tally, st)
    return np.asarray(b, dtype=np.float64), np.asarray(bl, dtype=np.int64)


def low_vec(vals, levs, d: int, dp: int, m: int, t: int, tally):
    """Approximate largest-set-index of an almost-binary vector.

    Index-slope then affine rescale, indicator extraction, and a dot
    product with [0, 1, ..., n-1].  The all-zero vector maps to n - 1.
    """
    st = _Scratch(tally)
    v = list(map(float, vals))
    l = [int(x) for x in levs]
    n = len(v)
    for i in range(1, n):
        v[i] = v[i] + (i / n)
        st.adds += 1
    for i in range(n):
        tv = v[i] + 1.0
        st.adds += 1
        v[i] = tv * 0.5
        l[i] = _cmul_level(l[i], st)
        st.mults += 1
    b, bl = _maxidx_core(v, l, d, dp, m, t, st)
    rv = b[1] * 1.0
    rl = _cmul_level(bl[1], st)
    st.mults += 1
    for i in range(2, n):
        tv = b[i] * float(i)
        tl = _cmul_level(bl[i], st)
        st.mults += 1
        rv = rv + tv
        if tl > rl:
            rl = tl
        st.adds += 1
    _flush(tally, st)
    return rv, rl


def _comp_core(av, al, bv, bl, d: int, dp: int, m: int, t: int, st: _Scratch):
    lm = _pow2_exponent(m)
    extra = _boost(2, m)
    sv = av + bv
    sl = al if al >= bl else bl
    st.adds += 1
    sv = sv * 0.5
    sl = _cmul_level(sl, st)
    st.mults += 1
    iv, il = _inv_core(sv, sl, dp, st)
    hv = av * 0.5
    hl = _cmul_level(al, st)
    st.mults += 1
    a0v = hv * iv
    a0l = _bump(hl if hl >= il else il, st)
    st.mults += 1
    b0v = 1.0 - a0v
    b0l = a0l
    st.adds += 1
    for _ in range(t):
        pav, pal = a0v, a0l
        pbv, pbl = b0v, b0l
        for _ in range(lm):
            pav = pav * pav
            pal = _bump(pal, st)
            st.mults += 1
            pbv = pbv * pbv
            pbl = _bump(pbl, st)
            st.mults += 1
        sv = pav + pbv
        sl = pal if pal >= pbl else pbl
        st.adds += 1
        iv, il = _inv_core(sv, sl, d + extra, st)
        a0v = pav * iv
        a0l = _bump(pal if pal >= il else il, st)
        st.mults += 1
        b0v = 1.0 - a0v
        b0l = a0l
        st.adds += 1
    return a0v, a0l


def comp_scalar(av, al, bv, bl, d: int, dp: int, m: int, t: int, tally):
    """Soft indicator of a > b for distinct a, b in [1/2, 3/2)."""
    st = _Scratch(tally)
    rv, rl = _comp_core(float(av), int(al), float(bv), int(bl), d, dp, m, t, st)
    _flush(tally, st)
    return rv, rl


def lowcomp_scalar(lxv, lxl, lyv, lyl, phi: float, n: int, d: int, dp: int, m: int, t: int, tally):
    """Soft equality indicator for two low estimates, thresholded at phi."""
    st = _Scratch(tally)
    inv_n2 = 1.0 / (n * n)
    dv = float(lxv) - float(lyv)
    dl = lxl if lxl >= lyl else lyl
    st.adds += 1
    sq = dv * dv
    sl = _bump(dl, st)
    st.mults += 1
    yv = sq * inv_n2
    yl = _cmul_level(sl, st)
    st.mults += 1
    yv = yv + 0.5
    st.adds += 1
    xv = 0.5 + (phi * phi) * inv_n2  # plaintext threshold
    rv, rl = _comp_core(xv, 0, yv, yl, d, dp, m, t, st)
    _flush(tally, st)
    return rv, rl


def gated_update_vec(xv, xl, yv, yl, ov, ol, tally):
    """Columnwise omega * (x - y)**2 + (1 - omega) * x."""
    st = _Scratch(tally)
    x = list(map(float, xv))
    lx = [int(e) for e in xl]
    y = list(map(float, yv))
    ly = [int(e) for e in yl]
    ov = float(ov)
    ol = int(ol)
    n = len(x)
    wv = 1.0 - ov
    wl = ol
    st.adds += 1
    out = [0.0] * n
    outl = [0] * n
    for i in range(n):
        dv = x[i] - y[i]
        dl = lx[i] if lx[i] >= ly[i] else ly[i]
        st.adds += 1
        sq = dv * dv
        sl = _bump(dl, st)
        st.mults += 1
        t1 = ov * sq
        t1l = _bump(ol if ol >= sl else sl, st)
        st.mults += 1
        t2 = wv * x[i]
        t2l = _bump(wl if wl >= lx[i] else lx[i], st)
        st.mults += 1
        out[i] = t1 + t2
        outl[i] = t1l if t1l >= t2l else t2l
        st.adds += 1
    _flush(tally, st)
    return np.asarray(out, dtype=np.float64), np.asarray(outl, dtype=np.int64)


def cumulative_update_vec(xv, xl, ys_v, ys_l, om_v, om_l, tally):
    """One cumulative round: x <- sum_q om[q]*(x - y_q)**2 + (1 - sum om)*x."""
    st = _Scratch(tally)
    x = list(map(float, xv))
    lx = [int(e) for e in xl]
    n = len(x)
    J = len(om_v)
    om = list(map(float, om_v))
    oml = [int(e) for e in om_l]
    cov = om[0]
    col = oml[0]
    for q in range(1, J):
        cov = cov + om[q]
        if oml[q] > col:
            col = oml[q]
        st.adds += 1
    acc = [0.0] * n
    accl = [0] * n
    for q in range(J):
        yq = ys_v[q]
        lq = ys_l[q]
        oq = om[q]
        oql = oml[q]
        for i in range(n):
            yv = float(yq[i])
            yl = int(lq[i])
            dv = x[i] - yv
            dl = lx[i] if lx[i] >= yl else yl
            st.adds += 1
            sq = dv * dv
            sl = _bump(dl, st)
            st.mults += 1
            tv = oq * sq
            tl = _bump(oql if oql >= sl else sl, st)
            st.mults += 1
            if q == 0:
                acc[i] = tv
                accl[i] = tl
            else:
                acc[i] = acc[i] + tv
                if tl > accl[i]:
                    accl[i] = tl
                st.adds += 1
    wv = 1.0 - cov
    wl = col
    st.adds += 1
    out = [0.0] * n
    outl = [0] * n
    for i in range(n):
        t2 = wv * x[i]
        t2l = _bump(wl if wl >= lx[i] else lx[i], st)
        st.mults += 1
        out[i] = acc[i] + t2
        outl[i] = accl[i] if accl[i] >= t2l else t2l
        st.adds += 1
    _flush(tally, st)
    return np.asarray(out, dtype=np.float64), np.asarray(outl, dtype=np.int64)
