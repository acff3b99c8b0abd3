# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled circuit kernels.

Cython transcription of :mod:`hetda._pure`.  Both backends must perform
the identical floating-point operations in the identical order; any edit
here must be mirrored there (the parity tests compare results, levels and
operation tallies bit for bit).
"""

import numpy as np

BACKEND_NAME = "compiled"


cdef class _Scratch:
    cdef public long mults
    cdef public long adds
    cdef public long boots
    cdef public long budget
    cdef public bint charge

    def __cinit__(self, tally):
        self.mults = 0
        self.adds = 0
        self.boots = 0
        self.charge = bool(tally.charge_constant_mult)
        budget = tally.level_budget
        self.budget = -1 if budget is None else int(budget)


cdef inline void _flush(tally, _Scratch st):
    tally.mults += st.mults
    tally.adds += st.adds
    tally.bootstraps += st.boots


cdef inline long _bump(long level, _Scratch st):
    cdef long new = level + 1
    if 0 <= st.budget < new:
        st.boots += 1
        return 1
    return new


cdef inline long _cmul_level(long level, _Scratch st):
    if st.charge:
        return _bump(level, st)
    return level


cdef int _pow2_exponent(long m) except -1:
    cdef int e = 0
    cdef long v = m
    while v > 1:
        v >>= 1
        e += 1
    if m < 2 or (1 << e) != m:
        raise ValueError("m must be a power of two >= 2")
    return e


cdef inline int _bit_length(long v):
    cdef int b = 0
    while v > 0:
        v >>= 1
        b += 1
    return b


cdef inline int _boost(long summands, long m):
    return <int> (m - 1) * _bit_length(summands - 1)


cdef void _inv_core(double xv, long xl, int d, _Scratch st, double* rv, long* rl):
    cdef double av = 2.0 - xv
    cdef long al = xl
    cdef double bv, tv
    cdef long bl, tl
    cdef int k
    st.adds += 1
    bv = 1.0 - xv
    bl = xl
    st.adds += 1
    for k in range(d):
        bv = bv * bv
        bl = _bump(bl, st)
        st.mults += 1
        tv = 1.0 + bv
        tl = bl
        st.adds += 1
        av = av * tv
        al = _bump(al if al >= tl else tl, st)
        st.mults += 1
    rv[0] = av
    rl[0] = al


def inv_scalar(xv, xl, d, tally):
    """Iterative reciprocal of ``x`` in (0, 2); error ~ |1-x|**(2**(d+1))."""
    cdef _Scratch st = _Scratch(tally)
    cdef double rv
    cdef long rl
    _inv_core(float(xv), int(xl), int(d), st, &rv, &rl)
    _flush(tally, st)
    return rv, rl


cdef void _maxidx_core(double[::1] v, long[::1] l, int d, int dp, long m, int t,
                       _Scratch st, double[::1] b, long[::1] bl,
                       double[::1] p, long[::1] pl):
    cdef Py_ssize_t n = v.shape[0]
    cdef int lm = _pow2_exponent(m)
    cdef int extra = _boost(n, m)
    cdef double scale = 1.0 / (<double> n)
    cdef double sv, iv, tv, accv
    cdef long sl, il, tl, accl
    cdef Py_ssize_t j
    cdef int r, s
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
    _inv_core(sv, sl, dp, st, &iv, &il)
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
    for r in range(t):
        for j in range(n):
            p[j] = b[j]
            pl[j] = bl[j]
        for s in range(lm):
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
        _inv_core(sv, sl, d + extra, st, &iv, &il)
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


def maxidx_vec(vals, levs, d, dp, m, t, tally):
    """Approximate one-hot indicator of the maximum entry of ``vals``."""
    cdef _Scratch st = _Scratch(tally)
    v_arr = np.ascontiguousarray(vals, dtype=np.float64)
    l_arr = np.ascontiguousarray(levs, dtype=np.int64)
    cdef Py_ssize_t n = v_arr.shape[0]
    b_arr = np.empty(n, dtype=np.float64)
    bl_arr = np.empty(n, dtype=np.int64)
    p_arr = np.empty(n, dtype=np.float64)
    pl_arr = np.empty(n, dtype=np.int64)
    _maxidx_core(v_arr, l_arr, int(d), int(dp), int(m), int(t), st, b_arr, bl_arr, p_arr, pl_arr)
    _flush(tally, st)
    return b_arr, bl_arr


def low_vec(vals, levs, d, dp, m, t, tally):
    """Approximate largest-set-index of an almost-binary vector.

    Index-slope then affine rescale, indicator extraction, and a dot
    product with [0, 1, ..., n-1].  The all-zero vector maps to n - 1.
    """
    cdef _Scratch st = _Scratch(tally)
    v_arr = np.array(vals, dtype=np.float64)
    l_arr = np.array(levs, dtype=np.int64)
    cdef double[::1] v = v_arr
    cdef long[::1] l = l_arr
    cdef Py_ssize_t n = v.shape[0]
    cdef Py_ssize_t i
    cdef double tv, rv
    cdef long tl, rl
    for i in range(1, n):
        v[i] = v[i] + ((<double> i) / (<double> n))
        st.adds += 1
    for i in range(n):
        tv = v[i] + 1.0
        st.adds += 1
        v[i] = tv * 0.5
        l[i] = _cmul_level(l[i], st)
        st.mults += 1
    b_arr = np.empty(n, dtype=np.float64)
    bl_arr = np.empty(n, dtype=np.int64)
    p_arr = np.empty(n, dtype=np.float64)
    pl_arr = np.empty(n, dtype=np.int64)
    cdef double[::1] b = b_arr
    cdef long[::1] bl = bl_arr
    _maxidx_core(v, l, int(d), int(dp), int(m), int(t), st, b, bl, p_arr, pl_arr)
    rv = b[1] * 1.0
    rl = _cmul_level(bl[1], st)
    st.mults += 1
    for i in range(2, n):
        tv = b[i] * (<double> i)
        tl = _cmul_level(bl[i], st)
        st.mults += 1
        rv = rv + tv
        if tl > rl:
            rl = tl
        st.adds += 1
    _flush(tally, st)
    return rv, rl


cdef void _comp_core(double av, long al, double bv, long bl, int d, int dp, long m, int t,
                     _Scratch st, double* outv, long* outl):
    cdef int lm = _pow2_exponent(m)
    cdef int extra = _boost(2, m)
    cdef double sv, iv, hv, a0v, b0v, pav, pbv
    cdef long sl, il, hl, a0l, b0l, pal, pbl
    cdef int r, s
    sv = av + bv
    sl = al if al >= bl else bl
    st.adds += 1
    sv = sv * 0.5
    sl = _cmul_level(sl, st)
    st.mults += 1
    _inv_core(sv, sl, dp, st, &iv, &il)
    hv = av * 0.5
    hl = _cmul_level(al, st)
    st.mults += 1
    a0v = hv * iv
    a0l = _bump(hl if hl >= il else il, st)
    st.mults += 1
    b0v = 1.0 - a0v
    b0l = a0l
    st.adds += 1
    for r in range(t):
        pav = a0v
        pal = a0l
        pbv = b0v
        pbl = b0l
        for s in range(lm):
            pav = pav * pav
            pal = _bump(pal, st)
            st.mults += 1
            pbv = pbv * pbv
            pbl = _bump(pbl, st)
            st.mults += 1
        sv = pav + pbv
        sl = pal if pal >= pbl else pbl
        st.adds += 1
        _inv_core(sv, sl, d + extra, st, &iv, &il)
        a0v = pav * iv
        a0l = _bump(pal if pal >= il else il, st)
        st.mults += 1
        b0v = 1.0 - a0v
        b0l = a0l
        st.adds += 1
    outv[0] = a0v
    outl[0] = a0l


def comp_scalar(av, al, bv, bl, d, dp, m, t, tally):
    """Soft indicator of a > b for distinct a, b in [1/2, 3/2)."""
    cdef _Scratch st = _Scratch(tally)
    cdef double rv
    cdef long rl
    _comp_core(float(av), int(al), float(bv), int(bl), int(d), int(dp), int(m), int(t), st, &rv, &rl)
    _flush(tally, st)
    return rv, rl


def lowcomp_scalar(lxv, lxl, lyv, lyl, phi, n, d, dp, m, t, tally):
    """Soft equality indicator for two low estimates, thresholded at phi."""
    cdef _Scratch st = _Scratch(tally)
    cdef long nn = int(n)
    cdef double inv_n2 = 1.0 / (<double> (nn * nn))
    cdef double phid = float(phi)
    cdef double dv, sq, yv, xv, rv
    cdef long dl, sl, yl, rl
    cdef long lxl_ = int(lxl), lyl_ = int(lyl)
    dv = float(lxv) - float(lyv)
    dl = lxl_ if lxl_ >= lyl_ else lyl_
    st.adds += 1
    sq = dv * dv
    sl = _bump(dl, st)
    st.mults += 1
    yv = sq * inv_n2
    yl = _cmul_level(sl, st)
    st.mults += 1
    yv = yv + 0.5
    st.adds += 1
    xv = 0.5 + (phid * phid) * inv_n2  # plaintext threshold
    _comp_core(xv, 0, yv, yl, int(d), int(dp), int(m), int(t), st, &rv, &rl)
    _flush(tally, st)
    return rv, rl


def gated_update_vec(xv, xl, yv, yl, ov, ol, tally):
    """Columnwise omega * (x - y)**2 + (1 - omega) * x."""
    cdef _Scratch st = _Scratch(tally)
    x_arr = np.ascontiguousarray(xv, dtype=np.float64)
    lx_arr = np.ascontiguousarray(xl, dtype=np.int64)
    y_arr = np.ascontiguousarray(yv, dtype=np.float64)
    ly_arr = np.ascontiguousarray(yl, dtype=np.int64)
    cdef double[::1] x = x_arr
    cdef long[::1] lx = lx_arr
    cdef double[::1] y = y_arr
    cdef long[::1] ly = ly_arr
    cdef double ovd = float(ov)
    cdef long old = int(ol)
    cdef Py_ssize_t n = x.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    outl_arr = np.empty(n, dtype=np.int64)
    cdef double[::1] out = out_arr
    cdef long[::1] outl = outl_arr
    cdef double wv, dv, sq, t1, t2
    cdef long wl, dl, sl, t1l, t2l
    cdef Py_ssize_t i
    wv = 1.0 - ovd
    wl = old
    st.adds += 1
    for i in range(n):
        dv = x[i] - y[i]
        dl = lx[i] if lx[i] >= ly[i] else ly[i]
        st.adds += 1
        sq = dv * dv
        sl = _bump(dl, st)
        st.mults += 1
        t1 = ovd * sq
        t1l = _bump(old if old >= sl else sl, st)
        st.mults += 1
        t2 = wv * x[i]
        t2l = _bump(wl if wl >= lx[i] else lx[i], st)
        st.mults += 1
        out[i] = t1 + t2
        outl[i] = t1l if t1l >= t2l else t2l
        st.adds += 1
    _flush(tally, st)
    return out_arr, outl_arr


def cumulative_update_vec(xv, xl, ys_v, ys_l, om_v, om_l, tally):
    """One cumulative round: x <- sum_q om[q]*(x - y_q)**2 + (1 - sum om)*x."""
    cdef _Scratch st = _Scratch(tally)
    x_arr = np.ascontiguousarray(xv, dtype=np.float64)
    lx_arr = np.ascontiguousarray(xl, dtype=np.int64)
    ys_arr = np.ascontiguousarray(ys_v, dtype=np.float64)
    lys_arr = np.ascontiguousarray(ys_l, dtype=np.int64)
    om_arr = np.ascontiguousarray(om_v, dtype=np.float64)
    oml_arr = np.ascontiguousarray(om_l, dtype=np.int64)
    cdef double[::1] x = x_arr
    cdef long[::1] lx = lx_arr
    cdef double[:, ::1] ys = ys_arr
    cdef long[:, ::1] lys = lys_arr
    cdef double[::1] om = om_arr
    cdef long[::1] oml = oml_arr
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t J = om.shape[0]
    acc_arr = np.empty(n, dtype=np.float64)
    accl_arr = np.empty(n, dtype=np.int64)
    out_arr = np.empty(n, dtype=np.float64)
    outl_arr = np.empty(n, dtype=np.int64)
    cdef double[::1] acc = acc_arr
    cdef long[::1] accl = accl_arr
    cdef double[::1] out = out_arr
    cdef long[::1] outl = outl_arr
    cdef double cov, wv, dv, sq, tv, t2, oq, yval
    cdef long col, wl, dl, sl, tl, t2l, oql, yl
    cdef Py_ssize_t q, i
    cov = om[0]
    col = oml[0]
    for q in range(1, J):
        cov = cov + om[q]
        if oml[q] > col:
            col = oml[q]
        st.adds += 1
    for q in range(J):
        oq = om[q]
        oql = oml[q]
        for i in range(n):
            yval = ys[q, i]
            yl = lys[q, i]
            dv = x[i] - yval
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
    for i in range(n):
        t2 = wv * x[i]
        t2l = _bump(wl if wl >= lx[i] else lx[i], st)
        st.mults += 1
        out[i] = acc[i] + t2
        outl[i] = accl[i] if accl[i] >= t2l else t2l
        st.adds += 1
    _flush(tally, st)
    return out_arr, outl_arr
