"""Double-double arithmetic on floats or float64 arrays.

A value is a pair ``(hi, lo)`` with ``|lo| <= ulp(hi)/2``. Every routine uses
plain IEEE operations in a fixed order so that the compiled kernels, which
implement the same sequences in C, agree bit for bit.
"""

import math

SPLITTER = 134217729.0  # 2**27 + 1


def two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def quick_two_sum(a, b):
    s = a + b
    return s, b - (s - a)


def split(a):
    t = SPLITTER * a
    hi = t - (t - a)
    return hi, a - hi


def two_prod(a, b):
    p = a * b
    ah, al = split(a)
    bh, bl = split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def add(ah, al, bh, bl):
    s, e = two_sum(ah, bh)
    t, f = two_sum(al, bl)
    e = e + t
    s, e = quick_two_sum(s, e)
    e = e + f
    return quick_two_sum(s, e)


def add_d(ah, al, b):
    s, e = two_sum(ah, b)
    e = e + al
    return quick_two_sum(s, e)


def sub(ah, al, bh, bl):
    return add(ah, al, -bh, -bl)


def mul(ah, al, bh, bl):
    p, e = two_prod(ah, bh)
    e = e + (ah * bl + al * bh)
    return quick_two_sum(p, e)


def mul_d(ah, al, b):
    p, e = two_prod(ah, b)
    e = e + al * b
    return quick_two_sum(p, e)


def div(ah, al, bh, bl):
    q1 = ah / bh
    rh, rl = sub(ah, al, *mul_d(bh, bl, q1))
    q2 = rh / bh
    rh, rl = sub(rh, rl, *mul_d(bh, bl, q2))
    q3 = rh / bh
    q1, q2 = quick_two_sum(q1, q2)
    return add_d(q1, q2, q3)


def sqrt(ah, al):
    """Scalar square root; ``ah`` must be a Python float."""
    if ah <= 0.0:
        return 0.0, 0.0
    x = 1.0 / math.sqrt(ah)
    ax = ah * x
    sh, sl = two_prod(ax, ax)
    rh, _ = sub(ah, al, sh, sl)
    return two_sum(ax, rh * (x * 0.5))
