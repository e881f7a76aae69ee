"""Monte-Carlo error estimates over uniformly random innate opinions.

Sample s draws x(0) from a Philox stream keyed by (seed, s), so results do not
depend on how samples are scheduled. Samples run on a thread pool (the
compiled kernels release the GIL) and are reduced in sample order.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dynamics import simulate
from .errors import AllSamplesDegenerate
from .measurement import solve_windows
from .network import validate_network
from .scenario import Scenario


def sample_x0(seed: int, index: int, n: int) -> np.ndarray:
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, index])))
    return rng.random(n)


def thread_count() -> int:
    env = os.environ.get("OPINET_THREADS")
    if env:
        return max(1, int(env))
    return max(1, min(8, os.cpu_count() or 1))


def _map(fn, count: int) -> list:
    threads = min(thread_count(), count)
    if threads <= 1:
        return [fn(s) for s in range(count)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(count)))


@dataclass(frozen=True, eq=False)
class ErrorReport:
    edge_errors: np.ndarray
    half_widths: np.ndarray
    window_error: float
    samples: int
    skipped: int
    seed: int
    window: tuple[int, int]

    def follower_split(self, followers) -> tuple[float, float]:
        """Mean off-diagonal error over non-follower rows and over follower rows."""
        n = self.edge_errors.shape[0]
        off = ~np.eye(n, dtype=bool)
        rows = np.zeros(n, dtype=bool)
        rows[list(followers)] = True
        nf = self.edge_errors[off & ~rows[:, None]]
        f = self.edge_errors[off & rows[:, None]]
        return float(nf.mean()) if nf.size else 0.0, float(f.mean()) if f.size else 0.0


def _edge_errors_one(scenario, net, m, ps, seed, index):
    x0 = sample_x0(seed, index, net.n)
    traj = simulate(net, x0, max(ps) + 2, precision=scenario.simulation.precision)
    out = []
    for p in ps:
        sol = solve_windows(traj, [m], p, scenario.inference.tolerances.rank)[0]
        if not sol.full_rank:
            out.append(None)
            continue
        err = np.abs(sol.S - net.weights)
        np.fill_diagonal(err, 0.0)
        out.append(err)
    return out


def _reduce(errs, n):
    total = np.zeros((n, n))
    sq = np.zeros((n, n))
    used = 0
    for e in errs:
        if e is None:
            continue
        total += e
        sq += e * e
        used += 1
    return total, sq, used


def _report(total, sq, used, requested, seed, window) -> ErrorReport:
    if used == 0:
        raise AllSamplesDegenerate(f"all {requested} samples gave a rank-deficient window {window}")
    mean = total / used
    if used > 1:
        var = np.maximum(sq / used - mean * mean, 0.0) * used / (used - 1)
        half = 1.96 * np.sqrt(var / used)
    else:
        half = np.full_like(mean, np.nan)
    return ErrorReport(mean, half, float(mean.sum()), used, requested - used, seed, window)


def mc_edge_errors(scenario: Scenario, m: int, p: int, samples: int, seed: int) -> ErrorReport:
    """Mean |w_breve - w| per edge from the raw window [m, p] solution."""
    if samples < 1:
        raise ValueError("samples must be at least 1")
    net = validate_network(scenario.spec)
    res = _map(lambda s: _edge_errors_one(scenario, net, m, [p], seed, s)[0], samples)
    return _report(*_reduce(res, net.n), samples, seed, (m, p))


def mc_window_error(scenario: Scenario, m: int, p_list, samples: int, seed: int) -> list[ErrorReport]:
    """One :class:`ErrorReport` per p; ``window_error`` is e(m, p)."""
    if samples < 1:
        raise ValueError("samples must be at least 1")
    net = validate_network(scenario.spec)
    ps = [int(p) for p in p_list]
    bad = [p for p in ps if p < m + net.n]
    if bad:
        raise ValueError(f"p values {bad} are below m + n = {m + net.n}")
    res = _map(lambda s: _edge_errors_one(scenario, net, m, ps, seed, s), samples)
    return [_report(*_reduce([r[k] for r in res], net.n), samples, seed, (m, p)) for k, p in enumerate(ps)]


@dataclass(frozen=True, eq=False)
class MeanTrajectory:
    mean: np.ndarray
    stderr: np.ndarray
    samples: int
    seed: int

    @property
    def max_final_step(self) -> float:
        return float(np.abs(self.mean[-1] - self.mean[-2]).max())


def mean_trajectory(scenario: Scenario, samples: int, seed: int, horizon: int | None = None) -> MeanTrajectory:
    if samples < 1:
        raise ValueError("samples must be at least 1")
    net = validate_network(scenario.spec)
    T = horizon or scenario.simulation.horizon or net.n + 2

    def run(s):
        # the mean path needs no extra precision
        return simulate(net, sample_x0(seed, s, net.n), T).x

    paths = _map(run, samples)
    total = np.zeros_like(paths[0])
    sq = np.zeros_like(paths[0])
    for x in paths:
        total += x
        sq += x * x
    mean = total / samples
    if samples > 1:
        var = np.maximum(sq / samples - mean * mean, 0.0) * samples / (samples - 1)
        se = np.sqrt(var / samples)
    else:
        se = np.full_like(mean, np.nan)
    return MeanTrajectory(mean, se, samples, seed)
