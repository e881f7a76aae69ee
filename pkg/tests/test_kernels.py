"""Double-double kernels against mpmath, and the two backends against each other."""

import importlib

import mpmath
import numpy as np
import pytest

from opinet import _ddnp as dd
from opinet import _kernels_py as kpy
from opinet import kernels
from opinet.dynamics import _kernel_args
from opinet.network import NetworkSpec, validate_network
from opinet.synth import random_problem3

mpmath.mp.prec = 240

try:
    kcy = importlib.import_module("opinet._kernels")
except ImportError:  # extension not built
    kcy = None

needs_ext = pytest.mark.skipif(kcy is None, reason="compiled extension not built")


def mp(h, l=0.0):
    return mpmath.mpf(float(h)) + mpmath.mpf(float(l))


def rel(a, b):
    return abs(a - b) / max(abs(b), mpmath.mpf(1e-300))


@pytest.fixture
def pairs(rng):
    hi = rng.standard_normal(200) * 10.0 ** rng.integers(-8, 8, 200)
    lo = hi * rng.uniform(-1, 1, 200) * 2.0**-54
    return hi, lo


def test_two_sum_and_two_prod_are_exact(rng):
    a = rng.standard_normal(500)
    b = rng.standard_normal(500) * 1e-9
    s, e = dd.two_sum(a, b)
    p, q = dd.two_prod(a, b)
    for k in range(500):
        assert mp(s[k]) + mp(e[k]) == mp(a[k]) + mp(b[k])
        assert mp(p[k]) + mp(q[k]) == mp(a[k]) * mp(b[k])


@pytest.mark.parametrize("op,ref", [
    (dd.add, lambda x, y: x + y),
    (dd.sub, lambda x, y: x - y),
    (dd.mul, lambda x, y: x * y),
    (dd.div, lambda x, y: x / y),
])
def test_binary_ops(op, ref, pairs, rng):
    ah, al = pairs
    bh = rng.uniform(0.5, 2.0, 200)
    bl = bh * rng.uniform(-1, 1, 200) * 2.0**-54
    bh, bl = dd.two_sum(bh, bl)
    ah, al = dd.two_sum(ah, al)
    rh, rl = op(ah, al, bh, bl)
    for k in range(200):
        exact = ref(mp(ah[k], al[k]), mp(bh[k], bl[k]))
        if op in (dd.add, dd.sub) and abs(exact) < 1e-20 * abs(mp(ah[k])):
            continue
        assert rel(mp(rh[k], rl[k]), exact) < 1e-30


def test_sqrt(rng):
    for a in rng.uniform(1e-6, 1e6, 200):
        lo = a * 2.0**-60
        rh, rl = dd.sqrt(a, lo)
        assert rel(mp(rh, rl), mpmath.sqrt(mp(a, lo))) < 1e-30


def _mp_simulate(W, x0, T):
    n = len(x0)
    Wm = [[mp(W[i, j]) for j in range(n)] for i in range(n)]
    x0m = [mp(v) for v in x0]
    alpha = [1 - sum(Wm[i]) for i in range(n)]
    x = list(x0m)
    for _ in range(T):
        x = [alpha[i] * x0m[i] + sum(Wm[i][j] * x[j] for j in range(n)) for i in range(n)]
    return x


def test_simulate_dd_against_mpmath(rng):
    from opinet.synth import _weights

    W = _weights(rng, 7, rng.uniform(0.6, 0.9, 7))
    net = validate_network(NetworkSpec(W))
    x0 = rng.random(7)
    Xh, Xl = kernels.simulate_dd(W, x0, 40, *_kernel_args(net))
    ref = _mp_simulate(W, x0, 40)
    for i in range(7):
        assert abs(mp(Xh[40, i], Xl[40, i]) - ref[i]) < 1e-29


def _random_dd_rows(rng, rows, n):
    hi = rng.standard_normal((rows, n))
    lo = hi * rng.uniform(-1, 1, (rows, n)) * 2.0**-54
    return dd.two_sum(hi, lo)


def test_window_qr_reproduces_p_and_q(rng):
    n, rows = 5, 14
    Dh, Dl = _random_dd_rows(rng, rows, n)
    starts = np.array([0, 3])
    p = rows - 2
    Rh, Rl, Ch, Cl = kernels.window_qr_dd(Dh, Dl, starts, p)
    D = [[mp(Dh[k, i], Dl[k, i]) for i in range(n)] for k in range(rows)]
    for w, m in enumerate(starts):
        R = mpmath.matrix([[mp(Rh[w, i, j], Rl[w, i, j]) for j in range(n)] for i in range(n)])
        C = mpmath.matrix([[mp(Ch[w, i, j], Cl[w, i, j]) for j in range(n)] for i in range(n)])
        for i in range(n):
            for j in range(n):
                P = sum(D[k][i] * D[k][j] for k in range(m, p + 1))
                Qt = sum(D[k][i] * D[k + 1][j] for k in range(m, p + 1))
                RtR = sum(R[t, i] * R[t, j] for t in range(n))
                RtC = sum(R[t, i] * C[t, j] for t in range(n))
                assert abs(RtR - P) < 1e-28 * (1 + abs(P))
                assert abs(RtC - Qt) < 1e-28 * (1 + abs(Qt))
        assert all(Rh[w, i, j] == 0.0 for i in range(n) for j in range(i))


def test_svd_solve_against_mpmath(rng):
    n = 6
    R = np.triu(rng.standard_normal((n, n))) + 3 * np.eye(n)
    C = rng.standard_normal((n, 3))
    Xh, Xl, sh, sl = kernels.svd_solve_dd(R, np.zeros((n, n)), C, np.zeros((n, 3)), 1e-22)
    Rm = mpmath.matrix(R.tolist())
    for j in range(3):
        xm = mpmath.lu_solve(Rm, mpmath.matrix(C[:, j].tolist()))
        for i in range(n):
            assert abs(mp(Xh[i, j], Xl[i, j]) - xm[i]) < 1e-28
    sig = sorted(mpmath.svd_r(Rm, compute_uv=False), reverse=True)
    got = sorted((mp(a, b) for a, b in zip(sh, sl)), reverse=True)
    for a, b in zip(got, sig):
        assert rel(a, b) < 1e-28


def test_svd_solve_truncates_null_directions():
    # column 2 duplicates column 0: rank 2, minimum-norm answer
    R = np.array([[1.0, 0.0, 1.0], [0.0, 2.0, 0.0], [0.0, 0.0, 0.0]])
    C = np.array([[2.0], [4.0], [0.0]])
    Xh, _, sh, _ = kernels.svd_solve_dd(R, np.zeros((3, 3)), C, np.zeros((3, 1)), 1e-20)
    np.testing.assert_allclose(Xh[:, 0], [1.0, 2.0, 1.0], atol=1e-28)
    assert sorted(sh)[0] < 1e-30


# --------------------------------------------------------------- backends


def _krack_inputs(krackhardt):
    net = validate_network(krackhardt.spec)
    return net, np.linspace(0.05, 0.95, 21)


def test_backend_is_reported():
    assert kernels.BACKEND in ("cython", "python")


@needs_ext
def test_compiled_backend_selected():
    assert kernels.BACKEND == "cython"


@needs_ext
def test_simulate_backends_bitwise(krackhardt, rng):
    net, x0 = _krack_inputs(krackhardt)
    args = (net.weights, x0, 50, *_kernel_args(net))
    assert kcy.simulate_f64(*args).tobytes() == kpy.simulate_f64(*args).tobytes()
    a, b = kcy.simulate_dd(*args), kpy.simulate_dd(*args)
    assert a[0].tobytes() == b[0].tobytes() and a[1].tobytes() == b[1].tobytes()
    for _ in range(10):
        net = validate_network(random_problem3(rng, 8))
        args = (net.weights, rng.random(8), 30, *_kernel_args(net))
        assert kcy.simulate_dd(*args)[1].tobytes() == kpy.simulate_dd(*args)[1].tobytes()
        assert kcy.simulate_f64(*args).tobytes() == kpy.simulate_f64(*args).tobytes()


@needs_ext
def test_solver_backends_bitwise(krackhardt):
    net, x0 = _krack_inputs(krackhardt)
    Xh, Xl = kpy.simulate_dd(net.weights, x0, 40, *_kernel_args(net))
    Dh, Dl = dd.sub(Xh[1:], Xl[1:], Xh[:-1], Xl[:-1])
    starts = np.array([1, 2], dtype=np.int64)
    a = kcy.window_qr_dd(Dh, Dl, starts, 30)
    b = kpy.window_qr_dd(Dh, Dl, starts, 30)
    for x, y in zip(a, b):
        assert x.tobytes() == y.tobytes()
    for w in range(2):
        s = kcy.svd_solve_dd(a[0][w], a[1][w], a[2][w], a[3][w], 1e-22)
        t = kpy.svd_solve_dd(b[0][w], b[1][w], b[2][w], b[3][w], 1e-22)
        for x, y in zip(s, t):
            assert x.tobytes() == y.tobytes()


def test_pure_python_env_forces_fallback():
    import subprocess
    import sys

    code = "import opinet.kernels as k; print(k.BACKEND)"
    env = {**__import__("os").environ, "OPINET_PURE_PYTHON": "1"}
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.stdout.strip() == "python"
