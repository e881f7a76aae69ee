"""Pure numpy implementation of the numerical kernels.

Mirrors ``_kernels.pyx`` operation for operation. Loops over individuals are
vectorized; loops over neighbours, rows and rotation pairs stay sequential
so the summation order matches the compiled version.
"""

import math

import numpy as np

from . import _ddnp as dd

KIND_NONE, KIND_LINEAR, KIND_SIN, KIND_LOG, KIND_POLY = range(5)


def bias_value(kind, prm, x, u):
    z = abs(x - u)
    if kind == KIND_NONE:
        return prm[0]
    if kind == KIND_LINEAR:
        return prm[0] - prm[1] * z
    if kind == KIND_SIN:
        return prm[0] - prm[1] * math.sin(z)
    if kind == KIND_LOG:
        return prm[0] * math.log(prm[1] - x)
    v = 0.0
    for c in range(6, -1, -1):
        v = v * z + prm[c]
    return v


def _source_terms(x_hi, link_ptr, link_src, u, kinds, params):
    """Per-link bias weights, evaluated in double at the leading opinion part."""
    n = len(link_ptr) - 1
    out = []
    for i in range(n):
        row = []
        if kinds[i] >= 0:
            prm = [float(v) for v in params[i]]
            for t in range(link_ptr[i], link_ptr[i + 1]):
                ud = float(u[link_src[t]])
                row.append((bias_value(int(kinds[i]), prm, float(x_hi[i]), ud), ud))
        out.append(row)
    return out


def _rowsum(W):
    n = W.shape[0]
    s = np.zeros(n)
    for j in range(n):
        s = s + W[:, j]
    return s


def simulate_f64(W, x0, T, link_ptr, link_src, u, kinds, params):
    W = np.ascontiguousarray(W, dtype=np.float64)
    n = W.shape[0]
    X = np.empty((T + 1, n))
    X[0] = x0
    rowsum = _rowsum(W)
    for k in range(T):
        x = X[k]
        terms = _source_terms(x, link_ptr, link_src, u, kinds, params)
        acc = np.zeros(n)
        for j in range(n):
            acc = acc + W[:, j] * x[j]
        h = np.zeros(n)
        src = np.zeros(n)
        for i, row in enumerate(terms):
            hi = 0.0
            si = 0.0
            for g, ud in row:
                hi = hi + g
                si = si + g * ud
            h[i] = hi
            src[i] = si
        alpha = (1.0 - rowsum) - h
        X[k + 1] = (alpha * X[0] + acc) + src
    return X


def simulate_dd(W, x0, T, link_ptr, link_src, u, kinds, params):
    W = np.ascontiguousarray(W, dtype=np.float64)
    n = W.shape[0]
    Xh = np.empty((T + 1, n))
    Xl = np.zeros((T + 1, n))
    Xh[0] = x0
    zero = np.zeros(n)
    rh, rl = zero, zero
    for j in range(n):
        rh, rl = dd.add_d(rh, rl, W[:, j])
    for k in range(T):
        xh, xl = Xh[k], Xl[k]
        terms = _source_terms(xh, link_ptr, link_src, u, kinds, params)
        ah, al = zero, zero
        for j in range(n):
            ah, al = dd.add(ah, al, *dd.mul_d(xh[j], xl[j], W[:, j]))
        hh = np.zeros(n)
        hl = np.zeros(n)
        sh = np.zeros(n)
        sl = np.zeros(n)
        for i, row in enumerate(terms):
            a, b, c, d = 0.0, 0.0, 0.0, 0.0
            for g, ud in row:
                a, b = dd.add_d(a, b, g)
                c, d = dd.add(c, d, *dd.two_prod(g, ud))
            hh[i], hl[i], sh[i], sl[i] = a, b, c, d
        alh, all_ = dd.add_d(-rh, -rl, 1.0)
        alh, all_ = dd.sub(alh, all_, hh, hl)
        th, tl = dd.mul_d(alh, all_, Xh[0])
        th, tl = dd.add(th, tl, ah, al)
        Xh[k + 1], Xl[k + 1] = dd.add(th, tl, sh, sl)
    return Xh, Xl


def _givens(ah, al, bh, bl):
    """Rotation (c, s) zeroing b against a, plus the resulting radius."""
    e = math.frexp(max(abs(ah), abs(bh)))[1]
    sah, sal = math.ldexp(ah, -e), math.ldexp(al, -e)
    sbh, sbl = math.ldexp(bh, -e), math.ldexp(bl, -e)
    qh, ql = dd.add(*dd.mul(sah, sal, sah, sal), *dd.mul(sbh, sbl, sbh, sbl))
    r = dd.sqrt(qh, ql)
    c = dd.div(sah, sal, *r)
    s = dd.div(sbh, sbl, *r)
    return c, s, (math.ldexp(r[0], e), math.ldexp(r[1], e))


def _rotate(xh, xl, yh, yl, c, s):
    """(x, y) <- (c x + s y, c y - s x) on dd vectors."""
    nxh, nxl = dd.add(*dd.mul(xh, xl, *c), *dd.mul(yh, yl, *s))
    nyh, nyl = dd.sub(*dd.mul(yh, yl, *c), *dd.mul(xh, xl, *s))
    return nxh, nxl, nyh, nyl


def window_qr_dd(Dh, Dl, starts, p):
    """Triangular factors of the stacked difference rows for windows [m, p].

    For each start ``m`` returns ``R`` (upper triangular) and ``C`` with
    ``R^T R = P_{m,p}`` and ``R^T C = Q_{m,p}^T``.
    """
    Dh = np.ascontiguousarray(Dh, dtype=np.float64)
    Dl = np.ascontiguousarray(Dl, dtype=np.float64)
    n = Dh.shape[1]
    starts = [int(s) for s in starts]
    nw = len(starts)
    Rh = np.zeros((nw, n, n))
    Rl = np.zeros((nw, n, n))
    Ch = np.zeros((nw, n, n))
    Cl = np.zeros((nw, n, n))
    Mh = np.zeros((n, 2 * n))
    Ml = np.zeros((n, 2 * n))
    w = nw - 1
    for k in range(p, starts[0] - 1, -1):
        vh = np.concatenate([Dh[k], Dh[k + 1]])
        vl = np.concatenate([Dl[k], Dl[k + 1]])
        for j in range(n):
            if vh[j] == 0.0 and vl[j] == 0.0:
                continue
            c, s, r = _givens(float(Mh[j, j]), float(Ml[j, j]), float(vh[j]), float(vl[j]))
            a, b, x, y = _rotate(Mh[j, j + 1 :], Ml[j, j + 1 :], vh[j + 1 :], vl[j + 1 :], c, s)
            Mh[j, j + 1 :], Ml[j, j + 1 :] = a, b
            vh[j + 1 :], vl[j + 1 :] = x, y
            Mh[j, j], Ml[j, j] = r
            vh[j], vl[j] = 0.0, 0.0
        while w >= 0 and starts[w] == k:
            Rh[w], Rl[w] = Mh[:, :n], Ml[:, :n]
            Ch[w], Cl[w] = Mh[:, n:], Ml[:, n:]
            w -= 1
    return Rh, Rl, Ch, Cl


JACOBI_TOL = 1e-31
MAX_SWEEPS = 80


def _dot(xh, xl, yh, yl):
    ph, pl = dd.mul(xh, xl, yh, yl)
    sh, sl = 0.0, 0.0
    for t in range(len(ph)):
        sh, sl = dd.add(sh, sl, float(ph[t]), float(pl[t]))
    return sh, sl


def _jacobi_rotation(a, b, g):
    """Cosine/sine annihilating the off-diagonal ``g`` of [[a, g], [g, b]]."""
    zh, zl = dd.div(*dd.sub(*b, *a), *dd.mul_d(*g, 2.0))
    az = (abs(zh), zl if zh >= 0.0 else -zl)
    if az[0] > 1.0:
        inv = dd.div(1.0, 0.0, *az)
        root = dd.mul(*az, *dd.sqrt(*dd.add_d(*dd.mul(*inv, *inv), 1.0)))
    else:
        root = dd.sqrt(*dd.add_d(*dd.mul(*az, *az), 1.0))
    t = dd.div(1.0, 0.0, *dd.add(*az, *root))
    if zh < 0.0:
        t = (-t[0], -t[1])
    c = dd.div(1.0, 0.0, *dd.sqrt(*dd.add_d(*dd.mul(*t, *t), 1.0)))
    s = dd.mul(*c, *t)
    return c, s


def svd_solve_dd(Rh, Rl, Ch, Cl, rel_cut):
    """Truncated least-squares solve of ``R X = C`` by one-sided Jacobi SVD.

    Returns the solution and the singular values of ``R`` (unsorted).
    Singular values at or below ``rel_cut * max`` are treated as zero.
    """
    Ah = np.array(Rh, dtype=np.float64)
    Al = np.array(Rl, dtype=np.float64)
    n = Ah.shape[1]
    Vh = np.eye(n)
    Vl = np.zeros((n, n))
    for _ in range(MAX_SWEEPS):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                a = _dot(Ah[:, p], Al[:, p], Ah[:, p], Al[:, p])
                b = _dot(Ah[:, q], Al[:, q], Ah[:, q], Al[:, q])
                g = _dot(Ah[:, p], Al[:, p], Ah[:, q], Al[:, q])
                if g[0] == 0.0 or abs(g[0]) <= JACOBI_TOL * math.sqrt(a[0]) * math.sqrt(b[0]):
                    continue
                rotated = True
                c, s = _jacobi_rotation(a, b, g)
                x = _rotate(Ah[:, p], Al[:, p], Ah[:, q], Al[:, q], c, (-s[0], -s[1]))
                Ah[:, p], Al[:, p], Ah[:, q], Al[:, q] = x
                x = _rotate(Vh[:, p], Vl[:, p], Vh[:, q], Vl[:, q], c, (-s[0], -s[1]))
                Vh[:, p], Vl[:, p], Vh[:, q], Vl[:, q] = x
        if not rotated:
            break
    sh = np.zeros(n)
    sl = np.zeros(n)
    for k in range(n):
        sh[k], sl[k] = dd.sqrt(*_dot(Ah[:, k], Al[:, k], Ah[:, k], Al[:, k]))
    cut = rel_cut * float(sh.max()) if n else 0.0
    Xh = np.zeros((n, Ch.shape[1]))
    Xl = np.zeros((n, Ch.shape[1]))
    for k in range(n):
        if not sh[k] > cut:
            continue
        # coef = (u_k^T C) / sigma_k with u_k = A[:, k] / sigma_k
        s2 = dd.mul(sh[k], sl[k], sh[k], sl[k])
        ch, cl = np.zeros(Ch.shape[1]), np.zeros(Ch.shape[1])
        for r in range(n):
            ch, cl = dd.add(ch, cl, *dd.mul(float(Ah[r, k]), float(Al[r, k]), Ch[r], Cl[r]))
        ch, cl = dd.div(ch, cl, *s2)
        for r in range(n):
            Xh[r], Xl[r] = dd.add(Xh[r], Xl[r], *dd.mul(float(Vh[r, k]), float(Vl[r, k]), ch, cl))
    return Xh, Xl, sh, sl
