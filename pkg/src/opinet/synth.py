"""Random valid networks for property tests and benchmarks."""

from __future__ import annotations

import numpy as np

from .network import BiasSpec, NetworkSpec, Source


def _weights(rng: np.random.Generator, n: int, totals: np.ndarray, chords: float = 0.5, ring: float = 0.8) -> np.ndarray:
    """Random nonnegative weights, zero diagonal, row i summing to totals[i].

    A directed ring through a random permutation carries ``ring`` of each
    row's weight; about ``chords * n`` random extra edges share the rest. The
    ring spreads the eigenvalues of W around a circle, which keeps P well
    conditioned; denser random graphs cluster them near zero.
    """
    W = np.zeros((n, n))
    perm = rng.permutation(n)
    for a in range(n):
        W[perm[a], perm[a - 1]] = totals[perm[a]] * ring
    m = int(round(chords * n))
    extra = {}
    for i, j in zip(rng.integers(0, n, m), rng.integers(0, n, m)):
        if i != j and W[i, j] == 0.0:
            extra.setdefault(int(i), set()).add(int(j))
    for i in range(n):
        js = sorted(extra.get(i, ()))
        if js:
            w = rng.uniform(0.2, 1.0, len(js))
            W[i, js] += totals[i] * (1.0 - ring) * w / w.sum()
        else:
            W[i, W[i] > 0] = totals[i]
    return W


def random_problem1(rng: np.random.Generator, n: int, followers: int | None = None) -> NetworkSpec:
    """Piecewise-linear bias, one source at opinion 0."""
    k = rng.integers(1, max(2, n // 2) + 1) if followers is None else followers
    fol = tuple(sorted(int(i) for i in rng.choice(n, size=k, replace=False)))
    totals = rng.uniform(0.6, 0.9, n)
    bias = {}
    for i in fol:
        beta = rng.uniform(0.02, 0.98 - totals[i])
        bias[i] = BiasSpec.linear(beta, rng.uniform(0.0, 0.9 * beta))
    return NetworkSpec(_weights(rng, n, totals), (Source(0.0, fol),), bias)


def random_problem2(rng: np.random.Generator, n: int, sources: int = 1) -> NetworkSpec:
    """Fixed source weights (no bias), uncontrolled source opinions in (0, 1)."""
    totals = rng.uniform(0.6, 0.9, n)
    srcs = []
    link_count = np.zeros(n, dtype=int)
    for _ in range(sources):
        k = rng.integers(1, max(2, n // 2) + 1)
        fol = tuple(sorted(int(i) for i in rng.choice(n, size=k, replace=False)))
        link_count[list(fol)] += 1
        srcs.append(Source(float(rng.uniform(0.0, 1.0)), fol))
    bias = {}
    for i in np.nonzero(link_count)[0]:
        # each link gets the same weight; the total stays below the free budget
        bias[int(i)] = BiasSpec.none(rng.uniform(0.05, 0.9 * (1.0 - totals[i])) / link_count[i])
    return NetworkSpec(_weights(rng, n, totals), tuple(srcs), bias)


def random_custom_bias(rng: np.random.Generator, budget: float) -> BiasSpec:
    """A catalog bias whose weight stays in (0, budget) on [0, 1]."""
    kind = rng.integers(3)
    if kind == 0:
        a = rng.uniform(0.3, 0.9) * budget
        return BiasSpec.sin(a, rng.uniform(0.2, 1.0) * a)
    if kind == 1:
        c = rng.uniform(2.05, 3.0)
        return BiasSpec.log(rng.uniform(0.3, 0.9) * budget / np.log(c), c)
    c0 = rng.uniform(0.4, 0.75) * budget
    c1 = rng.uniform(0.1, 0.5) * c0
    c2 = rng.uniform(0.0, 0.3) * c0
    return BiasSpec.poly([c0, -c1, c2])


def random_problem3(rng: np.random.Generator, n: int) -> NetworkSpec:
    """Catalog bias functions, one source at a random opinion."""
    k = rng.integers(1, max(2, n // 3) + 1)
    fol = tuple(sorted(int(i) for i in rng.choice(n, size=k, replace=False)))
    totals = rng.uniform(0.6, 0.9, n)
    bias = {i: random_custom_bias(rng, 0.98 - totals[i]) for i in fol}
    return NetworkSpec(_weights(rng, n, totals), (Source(float(rng.uniform(0.0, 1.0)), fol),), bias)
