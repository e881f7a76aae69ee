"""Time the compiled kernels against the numpy fallback on the Krackhardt network.

    python benchmarks/bench_kernels.py [--repeat N] [--steps T]

Both backends are also checked for bit-identical output on every input.
"""

import argparse
import statistics
import timeit

import numpy as np

from opinet import _ddnp as dd
from opinet import _kernels_py, bundled_scenario, validate_network
from opinet.dynamics import _kernel_args
from opinet.metrics import sample_x0

try:
    from opinet import _kernels
except ImportError:  # extension not built
    _kernels = None


def _cases(steps: int):
    sc = bundled_scenario("krackhardt")
    net = validate_network(sc.spec)
    x0 = sample_x0(1, 0, net.n)
    sim_args = (net.weights, x0, steps, *_kernel_args(net))
    Xh, Xl = _kernels_py.simulate_dd(*sim_args)
    Dh, Dl = dd.sub(Xh[1:], Xl[1:], Xh[:-1], Xl[:-1])
    starts = np.array([1, 2], dtype=np.int64)
    p = min(30, steps - 2)
    Rh, Rl, Ch, Cl = _kernels_py.window_qr_dd(Dh, Dl, starts, p)
    return {
        "simulate_f64": sim_args,
        "simulate_dd": sim_args,
        "window_qr_dd": (Dh, Dl, starts, p),
        "svd_solve_dd": (Rh[0], Rl[0], Ch[0], Cl[0], 1e-22),
    }


def _same(a, b) -> bool:
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    return a.tobytes() == b.tobytes()


def _time(fn, args, repeat: int) -> float:
    runs = timeit.repeat(lambda: fn(*args), number=1, repeat=repeat)
    return statistics.median(runs)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--steps", type=int, default=200, help="simulation horizon")
    args = ap.parse_args(argv)

    cases = _cases(args.steps)
    print(f"{'kernel':<14}{'python ms':>12}{'cython ms':>12}{'speedup':>10}  identical")
    for name, fargs in cases.items():
        py = _time(getattr(_kernels_py, name), fargs, args.repeat)
        if _kernels is None:
            print(f"{name:<14}{py * 1e3:>12.2f}{'n/a':>12}{'':>10}  (extension not built)")
            continue
        cy = _time(getattr(_kernels, name), fargs, args.repeat)
        same = _same(getattr(_kernels, name)(*fargs), getattr(_kernels_py, name)(*fargs))
        print(f"{name:<14}{py * 1e3:>12.2f}{cy * 1e3:>12.2f}{py / cy:>9.1f}x  {'yes' if same else 'NO'}")


if __name__ == "__main__":
    main()
