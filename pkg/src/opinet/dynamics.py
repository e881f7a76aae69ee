"""Forward simulation of the opinion dynamics and steady states."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _ddnp as dd
from . import kernels
from .errors import DimensionMismatch, HorizonZero, SingularSystem, WrongRegime, ZeroInnateOpinion
from .network import NetworkSpec, ValidatedNetwork, ensure_validated, spec_digest

REGIMES = ("ProblemI", "ProblemII", "ProblemIII")
PRECISIONS = ("double", "dd")


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Opinion vectors x(0..T) stacked row-wise.

    ``x_lo`` holds the trailing parts when the run used double-double
    arithmetic; ``x`` alone is then the correctly rounded double value.
    """

    x: np.ndarray
    regime: str
    source_opinions: np.ndarray
    x_lo: np.ndarray | None = None
    spec_hash: str | None = None

    def __post_init__(self):
        x = np.array(self.x, dtype=float)
        if x.ndim != 2:
            raise DimensionMismatch(f"trajectory must be 2-D, got shape {x.shape}")
        if self.regime not in REGIMES:
            raise WrongRegime(f"unknown regime {self.regime!r}")
        x.setflags(write=False)
        object.__setattr__(self, "x", x)
        u = np.array(self.source_opinions, dtype=float).reshape(-1)
        u.setflags(write=False)
        object.__setattr__(self, "source_opinions", u)
        if self.x_lo is not None:
            lo = np.array(self.x_lo, dtype=float)
            if lo.shape != x.shape:
                raise DimensionMismatch("x_lo shape differs from x")
            lo.setflags(write=False)
            object.__setattr__(self, "x_lo", lo)

    @property
    def T(self) -> int:
        return self.x.shape[0] - 1

    @property
    def n(self) -> int:
        return self.x.shape[1]

    @property
    def x0(self) -> np.ndarray:
        return self.x[0]

    @property
    def precision(self) -> str:
        return "double" if self.x_lo is None else "dd"

    def differences(self) -> tuple[np.ndarray, np.ndarray | None]:
        """d(k) = x(k+1) - x(k) for k = 0..T-1, as (hi, lo)."""
        if self.x_lo is None:
            return np.diff(self.x, axis=0), None
        return dd.sub(self.x[1:], self.x_lo[1:], self.x[:-1], self.x_lo[:-1])


def _kernel_args(net: ValidatedNetwork):
    return (net.link_ptr, net.link_src, net.spec.source_opinions, net.kinds, net.params)


def simulate(
    net: NetworkSpec | ValidatedNetwork,
    x0,
    horizon: int | None = None,
    regime: str | None = None,
    precision: str = "double",
) -> Trajectory:
    """Iterate the raw update rule from ``x0`` for ``horizon`` steps.

    The regime tag is detected from the bias models unless ``regime`` is given;
    a Problem III tag may be forced onto any data, the others only onto data
    that actually has that structure.
    """
    net = ensure_validated(net)
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (net.n,):
        raise DimensionMismatch(f"x0 has shape {x0.shape}, expected ({net.n},)")
    if np.any(x0 < 0.0) or np.any(x0 > 1.0):
        raise ValueError("innate opinions must lie in [0, 1]")
    T = net.n + 2 if horizon is None else int(horizon)
    if T < 1:
        raise HorizonZero("horizon must be at least 1")
    detected = net.regime()
    if regime is None:
        regime = detected
    elif regime != detected and regime != "ProblemIII":
        raise WrongRegime(f"network is in regime {detected}, cannot tag as {regime}")
    if precision == "double":
        X = kernels.simulate_f64(net.weights, x0, T, *_kernel_args(net))
        lo = None
    elif precision == "dd":
        X, lo = kernels.simulate_dd(net.weights, x0, T, *_kernel_args(net))
    else:
        raise ValueError(f"precision must be one of {PRECISIONS}")
    # the update is a convex combination; anything outside [0, 1] is roundoff
    out = (X < 0.0) | (X > 1.0)
    if out.any():
        np.clip(X, 0.0, 1.0, out=X)
        if lo is not None:
            lo[out] = 0.0
    return Trajectory(X, regime, net.spec.source_opinions, lo, spec_digest(net))


def step_encoded(A, W, x0, x_k) -> np.ndarray:
    A = np.asarray(A)
    W = np.asarray(W)
    x0 = np.asarray(x0)
    x_k = np.asarray(x_k)
    n = W.shape[0]
    if A.shape != (n, n) or W.shape != (n, n) or x0.shape != (n,) or x_k.shape != (n,):
        raise DimensionMismatch(
            f"A {A.shape}, W {W.shape}, x0 {x0.shape}, x_k {x_k.shape} are inconsistent"
        )
    return A @ x0 + W @ x_k


def build_A_of_k(net: NetworkSpec | ValidatedNetwork, x_k, x0) -> np.ndarray:
    """Diagonal matrix carrying resistance and source pull for the state x(k)."""
    spec = net.spec if isinstance(net, ValidatedNetwork) else net
    x_k = np.asarray(x_k, dtype=float)
    x0 = np.asarray(x0, dtype=float)
    diag = 1.0 - spec.weights.sum(axis=1)
    zero = [i for i in spec.follower_set if x0[i] == 0.0]
    if zero:
        raise ZeroInnateOpinion(zero)
    for i in spec.follower_set:
        b = spec.bias[i]
        for d in spec.links_of(i):
            u = spec.sources[d].u
            g = b(x_k[i], u)
            diag[i] += -g + g * u / x0[i]
    return np.diag(diag)


def source_pull(net: NetworkSpec | ValidatedNetwork, x_k, x0) -> np.ndarray:
    """The product A(k) x(0), formed without dividing by x(0)."""
    spec = net.spec if isinstance(net, ValidatedNetwork) else net
    x_k = np.asarray(x_k, dtype=float)
    x0 = np.asarray(x0, dtype=float)
    out = (1.0 - spec.weights.sum(axis=1)) * x0
    for i in spec.follower_set:
        b = spec.bias[i]
        for d in spec.links_of(i):
            u = spec.sources[d].u
            g = b(x_k[i], u)
            out[i] += g * (u - x0[i])
    return out


@dataclass(frozen=True, eq=False)
class SteadyState:
    x_star: np.ndarray
    residual: float


def steady_state(A, W, x0) -> SteadyState:
    A = np.asarray(A, dtype=float)
    W = np.asarray(W, dtype=float)
    x0 = np.asarray(x0, dtype=float)
    n = W.shape[0]
    M = np.eye(n) - W
    b = A @ x0
    try:
        x = np.linalg.solve(M, b)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(f"I - W is singular: {exc}") from exc
    if not np.all(np.isfinite(x)) or np.linalg.cond(M) > 1e14:
        raise SingularSystem("I - W is numerically singular")
    return SteadyState(x, float(np.abs(b + W @ x - x).max()))
