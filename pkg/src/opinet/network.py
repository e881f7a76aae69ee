"""Ground-truth network description: weights, information sources, bias models.

Individuals are indexed from 0 in the Python API. Scenario files and CLI
output use 1-based labels (see :mod:`opinet.scenario`).
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import InvalidNetwork, WrongRegime

# Catalog codes shared with the compiled kernels. Order matters.
BIAS_KINDS = ("none", "linear", "sin", "log", "poly")
KIND_CODE = {name: code for code, name in enumerate(BIAS_KINDS)}
N_PARAMS = 8
MAX_POLY_COEFFS = 7

# Custom bias models are validated on this grid.
VALIDATION_GRID = np.linspace(0.0, 1.0, 1001)
# Rows whose weights sum to exactly one (alpha = 0) are accepted; this slack
# absorbs the rounding of weights such as 1/3.
ROW_SUM_SLACK = 1e-12


@dataclass(frozen=True)
class BiasSpec:
    """Weight an individual assigns to each information source it follows.

    ``kind`` is one of ``none`` (fixed weight ``w``), ``linear`` (``beta -
    gamma*|x-u|``), ``sin`` (``a - b*sin(|x-u|)``), ``log`` (``a*log(c - x)``)
    or ``poly`` (``sum_k coeffs[k] * |x-u|**k``).
    """

    kind: str
    params: tuple[float, ...]

    def __post_init__(self):
        if self.kind not in KIND_CODE:
            raise ValueError(f"unknown bias kind {self.kind!r}")
        expected = {"none": 1, "linear": 2, "sin": 2, "log": 2}
        if self.kind == "poly":
            if not 1 <= len(self.params) <= MAX_POLY_COEFFS:
                raise ValueError(f"poly bias takes 1..{MAX_POLY_COEFFS} coefficients")
        elif len(self.params) != expected[self.kind]:
            raise ValueError(f"{self.kind} bias takes {expected[self.kind]} parameters")
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))

    @classmethod
    def none(cls, w: float) -> "BiasSpec":
        return cls("none", (w,))

    @classmethod
    def linear(cls, beta: float, gamma: float) -> "BiasSpec":
        return cls("linear", (beta, gamma))

    @classmethod
    def sin(cls, a: float, b: float) -> "BiasSpec":
        return cls("sin", (a, b))

    @classmethod
    def log(cls, a: float, c: float = 2.0) -> "BiasSpec":
        return cls("log", (a, c))

    @classmethod
    def poly(cls, coeffs: Sequence[float]) -> "BiasSpec":
        return cls("poly", tuple(coeffs))

    @property
    def variant(self) -> str:
        if self.kind == "none":
            return "None"
        if self.kind == "linear":
            return "PiecewiseLinear"
        return "Custom"

    @property
    def beta(self) -> float:
        if self.kind == "linear":
            return self.params[0]
        if self.kind == "none":
            return self.params[0]
        raise WrongRegime(f"{self.kind} bias has no beta parameter")

    @property
    def gamma(self) -> float:
        if self.kind == "linear":
            return self.params[1]
        if self.kind == "none":
            return 0.0
        raise WrongRegime(f"{self.kind} bias has no gamma parameter")

    def __call__(self, x: float, u: float) -> float:
        p = self.params
        z = abs(x - u)
        if self.kind == "none":
            return p[0]
        if self.kind == "linear":
            return p[0] - p[1] * z
        if self.kind == "sin":
            return p[0] - p[1] * math.sin(z)
        if self.kind == "log":
            return p[0] * math.log(p[1] - x)
        v = 0.0
        for c in reversed(p):
            v = v * z + c
        return v

    def kernel_params(self) -> np.ndarray:
        out = np.zeros(N_PARAMS)
        out[: len(self.params)] = self.params
        return out


@dataclass(frozen=True)
class Source:
    u: float
    followers: tuple[int, ...]


@dataclass(frozen=True, eq=False)
class NetworkSpec:
    """Directed weighted social network plus information sources.

    ``weights[i, j]`` is the influence of individual ``j`` on individual ``i``.
    """

    weights: np.ndarray
    sources: tuple[Source, ...] = ()
    bias: Mapping[int, BiasSpec] = field(default_factory=dict)

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError(f"weights must be square, got shape {w.shape}")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(
            self,
            "sources",
            tuple(Source(float(s.u), tuple(int(i) for i in s.followers)) for s in self.sources),
        )
        object.__setattr__(self, "bias", dict(sorted((int(k), v) for k, v in self.bias.items())))

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @property
    def m_sources(self) -> int:
        return len(self.sources)

    @property
    def source_opinions(self) -> np.ndarray:
        return np.array([s.u for s in self.sources])

    @property
    def source_links(self) -> frozenset[tuple[int, int]]:
        return frozenset((i, d) for d, s in enumerate(self.sources) for i in s.followers)

    @property
    def follower_set(self) -> frozenset[int]:
        return frozenset(i for i, _ in self.source_links)

    def links_of(self, i: int) -> list[int]:
        return [d for d, s in enumerate(self.sources) if i in s.followers]

    def __eq__(self, other):
        if not isinstance(other, NetworkSpec):
            return NotImplemented
        return (
            np.array_equal(self.weights, other.weights)
            and self.sources == other.sources
            and self.bias == other.bias
        )

    __hash__ = None


# ---------------------------------------------------------------- validation


@dataclass(frozen=True)
class SelfLoop:
    i: int


@dataclass(frozen=True)
class NegativeWeight:
    i: int
    j: int


@dataclass(frozen=True)
class RowSumExceeded:
    i: int
    x: float
    alpha: float


@dataclass(frozen=True)
class BiasOutOfRange:
    i: int
    reason: str


@dataclass(frozen=True)
class BadSource:
    d: int
    reason: str


@dataclass(frozen=True, eq=False)
class ValidatedNetwork:
    """A :class:`NetworkSpec` that passed :func:`validate_network`.

    Carries the flat arrays the simulation kernels consume.
    """

    spec: NetworkSpec
    link_ptr: np.ndarray
    link_src: np.ndarray
    kinds: np.ndarray
    params: np.ndarray

    @property
    def n(self) -> int:
        return self.spec.n

    @property
    def weights(self) -> np.ndarray:
        return self.spec.weights

    def regime(self) -> str:
        """Dynamics regime implied by the bias models and source opinions."""
        followers = self.spec.follower_set
        kinds = {self.spec.bias[i].kind for i in followers}
        if kinds <= {"none", "linear"} and all(s.u == 0.0 for s in self.spec.sources):
            return "ProblemI"
        if kinds <= {"none"}:
            return "ProblemII"
        return "ProblemIII"


def _bias_grid(bias: BiasSpec, u: float) -> tuple[np.ndarray, np.ndarray]:
    if bias.kind in ("none", "linear"):
        # monotone in |x-u|: extremes of x and the kink at u suffice
        xs = np.unique(np.array([0.0, 1.0, min(max(u, 0.0), 1.0)]))
    else:
        xs = VALIDATION_GRID
    return xs, np.array([bias(x, u) for x in xs])


def validate_network(spec: NetworkSpec) -> ValidatedNetwork:
    """Check every structural and bias invariant; raise :class:`InvalidNetwork`.

    Resistance is required to be nonnegative (not strictly positive) at every
    checked opinion; row-stochastic social rows are allowed.
    """
    issues = []
    n = spec.n
    w = spec.weights
    for i in range(n):
        if w[i, i] != 0.0:
            issues.append(SelfLoop(i))
    for i, j in zip(*np.nonzero(w < 0)):
        issues.append(NegativeWeight(int(i), int(j)))
    for d, s in enumerate(spec.sources):
        if not 0.0 <= s.u <= 1.0:
            issues.append(BadSource(d, f"opinion {s.u} outside [0, 1]"))
        bad = [i for i in s.followers if not 0 <= i < n]
        if bad:
            issues.append(BadSource(d, f"follower indices {bad} out of range"))
        if len(set(s.followers)) != len(s.followers):
            issues.append(BadSource(d, "duplicate followers"))
    if issues:
        raise InvalidNetwork(issues)

    followers = spec.follower_set
    for i, b in spec.bias.items():
        if not 0 <= i < n:
            issues.append(BiasOutOfRange(i, "index out of range"))
        elif i not in followers:
            # an unlinked individual carries no source weight at all
            if any(p != 0.0 for p in b.params):
                issues.append(BiasOutOfRange(i, "bias given for a non-follower"))
    for i in sorted(followers):
        if i not in spec.bias:
            issues.append(BiasOutOfRange(i, "follower without a bias model"))

    row = w.sum(axis=1)
    for i in range(n):
        links = spec.links_of(i)
        if links and i in spec.bias:
            b = spec.bias[i]
            total = None
            xs = None
            bad_range = False
            for d in links:
                xs, g = _bias_grid(b, spec.sources[d].u)
                if not np.all(np.isfinite(g)) or np.any(g < 0.0) or np.any(g >= 1.0):
                    bad_range = True
                    break
            if bad_range:
                issues.append(BiasOutOfRange(i, "source weight leaves [0, 1)"))
                continue
            us = [spec.sources[d].u for d in links]
            xs = np.unique(np.concatenate([_bias_grid(b, u)[0] for u in us]))
            total = np.array([sum(b(x, u) for u in us) for x in xs])
            alpha = 1.0 - row[i] - total
            k = int(np.argmin(alpha))
            if alpha[k] < -ROW_SUM_SLACK:
                issues.append(RowSumExceeded(i, float(xs[k]), float(alpha[k])))
        elif 1.0 - row[i] < -ROW_SUM_SLACK:
            issues.append(RowSumExceeded(i, 0.0, float(1.0 - row[i])))
    if issues:
        raise InvalidNetwork(issues)

    link_ptr = np.zeros(n + 1, dtype=np.int64)
    link_src = []
    for i in range(n):
        ls = spec.links_of(i)
        link_src.extend(ls)
        link_ptr[i + 1] = link_ptr[i] + len(ls)
    kinds = np.full(n, -1, dtype=np.int64)
    params = np.zeros((n, N_PARAMS))
    for i in followers:
        kinds[i] = KIND_CODE[spec.bias[i].kind]
        params[i] = spec.bias[i].kernel_params()
    arrays = [link_ptr, np.array(link_src, dtype=np.int64), kinds, params]
    for a in arrays:
        a.setflags(write=False)
    return ValidatedNetwork(spec, *arrays)


def ensure_validated(net: NetworkSpec | ValidatedNetwork) -> ValidatedNetwork:
    if isinstance(net, ValidatedNetwork):
        return net
    return validate_network(net)


# ------------------------------------------------------------ model algebra


def bias_weight(bias: BiasSpec | None, x: float, u: float) -> float:
    """Source weight for opinion ``x`` against source opinion ``u``; 0 if unlinked."""
    if bias is None:
        return 0.0
    return bias(x, u)


def source_weights(spec: NetworkSpec, i: int, x_i: float) -> float:
    """Sum over linked sources of the bias weight of individual ``i``."""
    b = spec.bias.get(i)
    return sum(bias_weight(b, x_i, spec.sources[d].u) for d in spec.links_of(i))


def resistance(spec: NetworkSpec | ValidatedNetwork, i: int, x_i: float) -> float:
    """Self-weight on the innate opinion that closes the row to one."""
    if isinstance(spec, ValidatedNetwork):
        spec = spec.spec
    return 1.0 - spec.weights[i].sum() - source_weights(spec, i, x_i)


@dataclass(frozen=True, eq=False)
class EncodedMatrices:
    """Affine form ``x(k+1) = A x(0) + W x(k)`` of the piecewise-linear model."""

    A: np.ndarray
    W: np.ndarray

    @property
    def L(self) -> np.ndarray:
        return self.A + self.W - np.eye(self.A.shape[0])


def linear_parameters(spec: NetworkSpec) -> tuple[np.ndarray, np.ndarray]:
    """Per-individual (beta, gamma), summed over linked sources.

    Requires every follower's bias to be ``linear`` or ``none`` and every source
    opinion to be zero.
    """
    n = spec.n
    beta = np.zeros(n)
    gamma = np.zeros(n)
    if any(s.u != 0.0 for s in spec.sources):
        raise WrongRegime("encoded matrices need every source opinion at zero")
    for i in spec.follower_set:
        b = spec.bias[i]
        if b.kind not in ("linear", "none"):
            raise WrongRegime(f"individual {i} has a {b.kind} bias")
        k = len(spec.links_of(i))
        beta[i] = k * b.beta
        gamma[i] = k * b.gamma
    return beta, gamma


def build_encoded(spec: NetworkSpec | ValidatedNetwork, x0) -> EncodedMatrices:
    if isinstance(spec, ValidatedNetwork):
        spec = spec.spec
    x0 = np.asarray(x0, dtype=float)
    beta, gamma = linear_parameters(spec)
    B = spec.weights
    A = np.diag(1.0 - B.sum(axis=1) - beta)
    W = B + np.diag(gamma * x0)
    return EncodedMatrices(A, W)


def spec_digest(spec: NetworkSpec | ValidatedNetwork) -> str:
    """Short content hash identifying a network in trajectory metadata."""
    if isinstance(spec, ValidatedNetwork):
        spec = spec.spec
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(spec.weights).tobytes())
    for s in spec.sources:
        h.update(repr((s.u, s.followers)).encode())
    for i, b in spec.bias.items():
        h.update(repr((i, b.kind, b.params)).encode())
    return h.hexdigest()[:16]
