# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
# Compiled twin of _kernels_py.py. Keep the operation order identical: the
# test suite checks that both backends agree bit for bit.

import numpy as np
from libc.math cimport sin, log, fabs, sqrt, frexp, ldexp

ctypedef struct dd_t:
    double hi
    double lo

cdef double JACOBI_TOL = 1e-31
cdef int MAX_SWEEPS = 80


cdef inline dd_t mk(double hi, double lo) noexcept nogil:
    cdef dd_t r
    r.hi = hi
    r.lo = lo
    return r


cdef inline dd_t two_sum(double a, double b) noexcept nogil:
    cdef double s = a + b
    cdef double bb = s - a
    return mk(s, (a - (s - bb)) + (b - bb))


cdef inline dd_t quick_two_sum(double a, double b) noexcept nogil:
    cdef double s = a + b
    return mk(s, b - (s - a))


cdef inline dd_t two_prod(double a, double b) noexcept nogil:
    cdef double p = a * b
    cdef double t = 134217729.0 * a
    cdef double ah = t - (t - a)
    cdef double al = a - ah
    t = 134217729.0 * b
    cdef double bh = t - (t - b)
    cdef double bl = b - bh
    return mk(p, ((ah * bh - p) + ah * bl + al * bh) + al * bl)


cdef inline dd_t dd_add(dd_t a, dd_t b) noexcept nogil:
    cdef dd_t s = two_sum(a.hi, b.hi)
    cdef dd_t t = two_sum(a.lo, b.lo)
    cdef double e = s.lo + t.hi
    s = quick_two_sum(s.hi, e)
    e = s.lo + t.lo
    return quick_two_sum(s.hi, e)


cdef inline dd_t dd_add_d(dd_t a, double b) noexcept nogil:
    cdef dd_t s = two_sum(a.hi, b)
    cdef double e = s.lo + a.lo
    return quick_two_sum(s.hi, e)


cdef inline dd_t dd_neg(dd_t a) noexcept nogil:
    return mk(-a.hi, -a.lo)


cdef inline dd_t dd_sub(dd_t a, dd_t b) noexcept nogil:
    return dd_add(a, dd_neg(b))


cdef inline dd_t dd_mul(dd_t a, dd_t b) noexcept nogil:
    cdef dd_t p = two_prod(a.hi, b.hi)
    cdef double e = p.lo + (a.hi * b.lo + a.lo * b.hi)
    return quick_two_sum(p.hi, e)


cdef inline dd_t dd_mul_d(dd_t a, double b) noexcept nogil:
    cdef dd_t p = two_prod(a.hi, b)
    cdef double e = p.lo + a.lo * b
    return quick_two_sum(p.hi, e)


cdef inline dd_t dd_div(dd_t a, dd_t b) noexcept nogil:
    cdef double q1 = a.hi / b.hi
    cdef dd_t r = dd_sub(a, dd_mul_d(b, q1))
    cdef double q2 = r.hi / b.hi
    r = dd_sub(r, dd_mul_d(b, q2))
    cdef double q3 = r.hi / b.hi
    cdef dd_t q = quick_two_sum(q1, q2)
    return dd_add_d(q, q3)


cdef inline dd_t dd_sqrt(dd_t a) noexcept nogil:
    if a.hi <= 0.0:
        return mk(0.0, 0.0)
    cdef double x = 1.0 / sqrt(a.hi)
    cdef double ax = a.hi * x
    cdef dd_t r = dd_sub(a, two_prod(ax, ax))
    return two_sum(ax, r.hi * (x * 0.5))


cdef inline double bias_value(long kind, const double[:] prm, double x, double u) noexcept nogil:
    cdef double z = fabs(x - u)
    cdef double v
    cdef int c
    if kind == 0:
        return prm[0]
    if kind == 1:
        return prm[0] - prm[1] * z
    if kind == 2:
        return prm[0] - prm[1] * sin(z)
    if kind == 3:
        return prm[0] * log(prm[1] - x)
    v = 0.0
    for c in range(6, -1, -1):
        v = v * z + prm[c]
    return v


def simulate_f64(W, x0, long T, link_ptr, link_src, u, kinds, params):
    cdef const double[:, ::1] w = np.ascontiguousarray(W, dtype=np.float64)
    cdef Py_ssize_t n = w.shape[0]
    out = np.empty((T + 1, n))
    cdef double[:, ::1] X = out
    cdef const double[::1] s = np.ascontiguousarray(x0, dtype=np.float64)
    cdef const long long[::1] lp = np.ascontiguousarray(link_ptr, dtype=np.int64)
    cdef const long long[::1] ls = np.ascontiguousarray(link_src, dtype=np.int64)
    cdef const double[::1] uu = np.ascontiguousarray(u, dtype=np.float64)
    cdef const long long[::1] kd = np.ascontiguousarray(kinds, dtype=np.int64)
    cdef const double[:, ::1] pr = np.ascontiguousarray(params, dtype=np.float64)
    rowsum_arr = np.zeros(n)
    cdef double[::1] rowsum = rowsum_arr
    cdef Py_ssize_t i, j, k, t
    cdef double acc, h, src, g, alpha
    with nogil:
        for i in range(n):
            X[0, i] = s[i]
            for j in range(n):
                rowsum[i] = rowsum[i] + w[i, j]
        for k in range(T):
            for i in range(n):
                acc = 0.0
                for j in range(n):
                    acc = acc + w[i, j] * X[k, j]
                h = 0.0
                src = 0.0
                if kd[i] >= 0:
                    for t in range(lp[i], lp[i + 1]):
                        g = bias_value(kd[i], pr[i], X[k, i], uu[ls[t]])
                        h = h + g
                        src = src + g * uu[ls[t]]
                alpha = (1.0 - rowsum[i]) - h
                X[k + 1, i] = (alpha * s[i] + acc) + src
    return out


def simulate_dd(W, x0, long T, link_ptr, link_src, u, kinds, params):
    cdef const double[:, ::1] w = np.ascontiguousarray(W, dtype=np.float64)
    cdef Py_ssize_t n = w.shape[0]
    out_h = np.empty((T + 1, n))
    out_l = np.zeros((T + 1, n))
    cdef double[:, ::1] Xh = out_h
    cdef double[:, ::1] Xl = out_l
    cdef const double[::1] s = np.ascontiguousarray(x0, dtype=np.float64)
    cdef const long long[::1] lp = np.ascontiguousarray(link_ptr, dtype=np.int64)
    cdef const long long[::1] ls = np.ascontiguousarray(link_src, dtype=np.int64)
    cdef const double[::1] uu = np.ascontiguousarray(u, dtype=np.float64)
    cdef const long long[::1] kd = np.ascontiguousarray(kinds, dtype=np.int64)
    cdef const double[:, ::1] pr = np.ascontiguousarray(params, dtype=np.float64)
    rs_arr = np.zeros((n, 2))
    cdef double[:, ::1] rs = rs_arr
    cdef Py_ssize_t i, j, k, t
    cdef dd_t acc, h, src, alpha, r
    cdef double g
    with nogil:
        for i in range(n):
            Xh[0, i] = s[i]
            r = mk(0.0, 0.0)
            for j in range(n):
                r = dd_add_d(r, w[i, j])
            rs[i, 0] = r.hi
            rs[i, 1] = r.lo
        for k in range(T):
            for i in range(n):
                acc = mk(0.0, 0.0)
                for j in range(n):
                    acc = dd_add(acc, dd_mul_d(mk(Xh[k, j], Xl[k, j]), w[i, j]))
                h = mk(0.0, 0.0)
                src = mk(0.0, 0.0)
                if kd[i] >= 0:
                    for t in range(lp[i], lp[i + 1]):
                        g = bias_value(kd[i], pr[i], Xh[k, i], uu[ls[t]])
                        h = dd_add_d(h, g)
                        src = dd_add(src, two_prod(g, uu[ls[t]]))
                alpha = dd_add_d(mk(-rs[i, 0], -rs[i, 1]), 1.0)
                alpha = dd_sub(alpha, h)
                r = dd_mul_d(alpha, s[i])
                r = dd_add(r, acc)
                r = dd_add(r, src)
                Xh[k + 1, i] = r.hi
                Xl[k + 1, i] = r.lo
    return out_h, out_l


cdef inline void givens(dd_t a, dd_t b, dd_t* c, dd_t* s, dd_t* r) noexcept nogil:
    cdef int e
    cdef double m = fabs(a.hi) if fabs(a.hi) >= fabs(b.hi) else fabs(b.hi)
    frexp(m, &e)
    cdef dd_t sa = mk(ldexp(a.hi, -e), ldexp(a.lo, -e))
    cdef dd_t sb = mk(ldexp(b.hi, -e), ldexp(b.lo, -e))
    cdef dd_t q = dd_add(dd_mul(sa, sa), dd_mul(sb, sb))
    cdef dd_t rr = dd_sqrt(q)
    c[0] = dd_div(sa, rr)
    s[0] = dd_div(sb, rr)
    r[0] = mk(ldexp(rr.hi, e), ldexp(rr.lo, e))


cdef inline void rotate(double* xh, double* xl, double* yh, double* yl,
                        dd_t c, dd_t s) noexcept nogil:
    cdef dd_t x = mk(xh[0], xl[0])
    cdef dd_t y = mk(yh[0], yl[0])
    cdef dd_t nx = dd_add(dd_mul(x, c), dd_mul(y, s))
    cdef dd_t ny = dd_sub(dd_mul(y, c), dd_mul(x, s))
    xh[0] = nx.hi
    xl[0] = nx.lo
    yh[0] = ny.hi
    yl[0] = ny.lo


def window_qr_dd(Dh, Dl, starts, long p):
    cdef const double[:, ::1] dh = np.ascontiguousarray(Dh, dtype=np.float64)
    cdef const double[:, ::1] dl = np.ascontiguousarray(Dl, dtype=np.float64)
    cdef const long long[::1] st = np.ascontiguousarray(starts, dtype=np.int64)
    cdef Py_ssize_t n = dh.shape[1]
    cdef Py_ssize_t nw = st.shape[0]
    Rh_a = np.zeros((nw, n, n))
    Rl_a = np.zeros((nw, n, n))
    Ch_a = np.zeros((nw, n, n))
    Cl_a = np.zeros((nw, n, n))
    cdef double[:, :, ::1] Rh = Rh_a
    cdef double[:, :, ::1] Rl = Rl_a
    cdef double[:, :, ::1] Ch = Ch_a
    cdef double[:, :, ::1] Cl = Cl_a
    Mh_a = np.zeros((n, 2 * n))
    Ml_a = np.zeros((n, 2 * n))
    vh_a = np.zeros(2 * n)
    vl_a = np.zeros(2 * n)
    cdef double[:, ::1] Mh = Mh_a
    cdef double[:, ::1] Ml = Ml_a
    cdef double[::1] vh = vh_a
    cdef double[::1] vl = vl_a
    cdef Py_ssize_t k, j, c, a
    cdef Py_ssize_t w = nw - 1
    cdef dd_t cs, sn, r
    with nogil:
        k = p
        while k >= st[0]:
            for j in range(n):
                vh[j] = dh[k, j]
                vl[j] = dl[k, j]
                vh[n + j] = dh[k + 1, j]
                vl[n + j] = dl[k + 1, j]
            for j in range(n):
                if vh[j] == 0.0 and vl[j] == 0.0:
                    continue
                givens(mk(Mh[j, j], Ml[j, j]), mk(vh[j], vl[j]), &cs, &sn, &r)
                for c in range(j + 1, 2 * n):
                    rotate(&Mh[j, c], &Ml[j, c], &vh[c], &vl[c], cs, sn)
                Mh[j, j] = r.hi
                Ml[j, j] = r.lo
                vh[j] = 0.0
                vl[j] = 0.0
            while w >= 0 and st[w] == k:
                for j in range(n):
                    for c in range(n):
                        Rh[w, j, c] = Mh[j, c]
                        Rl[w, j, c] = Ml[j, c]
                        Ch[w, j, c] = Mh[j, n + c]
                        Cl[w, j, c] = Ml[j, n + c]
                w -= 1
            k -= 1
    return Rh_a, Rl_a, Ch_a, Cl_a


cdef inline dd_t col_dot(double[:, ::1] xh, double[:, ::1] xl, Py_ssize_t p,
                         double[:, ::1] yh, double[:, ::1] yl, Py_ssize_t q) noexcept nogil:
    cdef dd_t s = mk(0.0, 0.0)
    cdef Py_ssize_t r
    for r in range(xh.shape[0]):
        s = dd_add(s, dd_mul(mk(xh[r, p], xl[r, p]), mk(yh[r, q], yl[r, q])))
    return s


cdef inline void jacobi_rotation(dd_t a, dd_t b, dd_t g, dd_t* c, dd_t* s) noexcept nogil:
    cdef dd_t z = dd_div(dd_sub(b, a), dd_mul_d(g, 2.0))
    cdef dd_t az = mk(fabs(z.hi), z.lo if z.hi >= 0.0 else -z.lo)
    cdef dd_t inv, root, t
    if az.hi > 1.0:
        inv = dd_div(mk(1.0, 0.0), az)
        root = dd_mul(az, dd_sqrt(dd_add_d(dd_mul(inv, inv), 1.0)))
    else:
        root = dd_sqrt(dd_add_d(dd_mul(az, az), 1.0))
    t = dd_div(mk(1.0, 0.0), dd_add(az, root))
    if z.hi < 0.0:
        t = dd_neg(t)
    c[0] = dd_div(mk(1.0, 0.0), dd_sqrt(dd_add_d(dd_mul(t, t), 1.0)))
    s[0] = dd_mul(c[0], t)


def svd_solve_dd(Rh, Rl, Ch, Cl, double rel_cut):
    Ah_a = np.array(Rh, dtype=np.float64, order="C")
    Al_a = np.array(Rl, dtype=np.float64, order="C")
    cdef double[:, ::1] Ah = Ah_a
    cdef double[:, ::1] Al = Al_a
    cdef const double[:, ::1] ch = np.ascontiguousarray(Ch, dtype=np.float64)
    cdef const double[:, ::1] cl = np.ascontiguousarray(Cl, dtype=np.float64)
    cdef Py_ssize_t n = Ah.shape[1]
    cdef Py_ssize_t ncol = ch.shape[1]
    Vh_a = np.eye(n)
    Vl_a = np.zeros((n, n))
    cdef double[:, ::1] Vh = Vh_a
    cdef double[:, ::1] Vl = Vl_a
    sh_a = np.zeros(n)
    sl_a = np.zeros(n)
    cdef double[::1] sh = sh_a
    cdef double[::1] sl = sl_a
    Xh_a = np.zeros((n, ncol))
    Xl_a = np.zeros((n, ncol))
    cdef double[:, ::1] Xh = Xh_a
    cdef double[:, ::1] Xl = Xl_a
    coef_a = np.zeros((ncol, 2))
    cdef double[:, ::1] coef = coef_a
    cdef Py_ssize_t sweep, p, q, r, k, c
    cdef bint rotated
    cdef dd_t a, b, g, cs, sn, t, s2
    cdef double cut, smax
    with nogil:
        for sweep in range(MAX_SWEEPS):
            rotated = False
            for p in range(n - 1):
                for q in range(p + 1, n):
                    a = col_dot(Ah, Al, p, Ah, Al, p)
                    b = col_dot(Ah, Al, q, Ah, Al, q)
                    g = col_dot(Ah, Al, p, Ah, Al, q)
                    if g.hi == 0.0 or fabs(g.hi) <= JACOBI_TOL * sqrt(a.hi) * sqrt(b.hi):
                        continue
                    rotated = True
                    jacobi_rotation(a, b, g, &cs, &sn)
                    sn = dd_neg(sn)
                    for r in range(Ah.shape[0]):
                        rotate(&Ah[r, p], &Al[r, p], &Ah[r, q], &Al[r, q], cs, sn)
                    for r in range(n):
                        rotate(&Vh[r, p], &Vl[r, p], &Vh[r, q], &Vl[r, q], cs, sn)
            if not rotated:
                break
        smax = 0.0
        for k in range(n):
            t = dd_sqrt(col_dot(Ah, Al, k, Ah, Al, k))
            sh[k] = t.hi
            sl[k] = t.lo
            if k == 0 or sh[k] > smax:
                smax = sh[k]
        cut = rel_cut * smax
        for k in range(n):
            if not sh[k] > cut:
                continue
            s2 = dd_mul(mk(sh[k], sl[k]), mk(sh[k], sl[k]))
            for c in range(ncol):
                coef[c, 0] = 0.0
                coef[c, 1] = 0.0
            for r in range(n):
                for c in range(ncol):
                    t = dd_add(mk(coef[c, 0], coef[c, 1]),
                               dd_mul(mk(Ah[r, k], Al[r, k]), mk(ch[r, c], cl[r, c])))
                    coef[c, 0] = t.hi
                    coef[c, 1] = t.lo
            for c in range(ncol):
                t = dd_div(mk(coef[c, 0], coef[c, 1]), s2)
                coef[c, 0] = t.hi
                coef[c, 1] = t.lo
            for r in range(n):
                for c in range(ncol):
                    t = dd_add(mk(Xh[r, c], Xl[r, c]),
                               dd_mul(mk(Vh[r, k], Vl[r, k]), mk(coef[c, 0], coef[c, 1])))
                    Xh[r, c] = t.hi
                    Xl[r, c] = t.lo
    return Xh_a, Xl_a, sh_a, sl_a
