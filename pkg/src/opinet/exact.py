"""Exact inference of topology and bias parameters (Problems I and II)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dynamics import Trajectory
from .errors import DegenerateSource, NotSolvable, ZeroInnate, ZeroInnateOpinion
from .measurement import build_pq, default_rank_tol, krylov_rank, solve_windows
from .network import NetworkSpec, ValidatedNetwork, build_encoded

ZERO_TOL = 1e-7
BETA_TOL = 1e-6

SOLVABLE = "Solvable"
RANK_DEFICIENT = "RankDeficient"
ZERO_INNATE = "ZeroInnateFollowers"
INCONSISTENT = "InconsistentData"


@dataclass(frozen=True)
class SolvabilityReport:
    rank_P: int
    n: int
    zero_innate: frozenset[int]
    verdict: str
    gap: float = np.inf
    rank_tol: float = 1e-10
    # individuals whose follower status cannot be decided from the data
    undetermined: frozenset[int] = frozenset()

    @property
    def full_rank(self) -> bool:
        return self.rank_P == self.n

    @property
    def solvable(self) -> bool:
        return self.verdict == SOLVABLE

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "rank_P": self.rank_P,
            "n": self.n,
            "full_rank": self.full_rank,
            "rank_tol": self.rank_tol,
            "singular_gap": None if not np.isfinite(self.gap) else self.gap,
            "zero_innate": sorted(i + 1 for i in self.zero_innate),
            "undetermined": sorted(i + 1 for i in self.undetermined),
        }


@dataclass(frozen=True, eq=False)
class InferenceResult:
    W_hat: np.ndarray
    gamma_hat: np.ndarray
    beta_hat: np.ndarray
    solvability: SolvabilityReport
    residual: float
    beta_spread: np.ndarray = field(default_factory=lambda: np.zeros(0))
    zero_tol: float = ZERO_TOL

    @property
    def weights(self) -> np.ndarray:
        """Off-diagonal part of W_hat with sub-threshold entries zeroed."""
        W = self.W_hat.copy()
        np.fill_diagonal(W, 0.0)
        W[np.abs(W) < self.zero_tol] = 0.0
        return W

    @property
    def inferred_edges(self) -> dict[tuple[int, int], float]:
        W = self.weights
        return {(int(i), int(j)): float(W[i, j]) for i, j in zip(*np.nonzero(W))}

    @property
    def inferred_followers(self) -> frozenset[int]:
        g = self.gamma_hat
        return frozenset(int(i) for i in np.nonzero(np.isfinite(g) & (g != 0.0))[0])

    def to_dict(self) -> dict:
        nan_none = lambda v: [None if not np.isfinite(x) else float(x) for x in v]  # noqa: E731
        return {
            "problem": 1,
            "W_hat": self.W_hat.tolist(),
            "gamma": nan_none(self.gamma_hat),
            "beta": nan_none(self.beta_hat),
            "edges": [{"i": i + 1, "j": j + 1, "w": w} for (i, j), w in sorted(self.inferred_edges.items())],
            "followers": sorted(i + 1 for i in self.inferred_followers),
            "solvability": self.solvability.to_dict(),
            "residual_WP_minus_Q": self.residual,
            "beta_spread": nan_none(self.beta_spread),
        }


def _window(traj: Trajectory, m: int, p: int | None) -> tuple[int, int]:
    return m, traj.T - 2 if p is None else p


def _solve(traj, m, p, rank_tol):
    sol = solve_windows(traj, [m], p, rank_tol)[0]
    return sol


def infer_beta(W_hat, x0, x_k, x_k1, indices=None) -> np.ndarray:
    """beta from one observed step; NaN outside ``indices`` (default: all)."""
    W = np.asarray(W_hat, dtype=float)
    x0 = np.asarray(x0, dtype=float)
    n = W.shape[0]
    idx = range(n) if indices is None else indices
    zero = [i for i in idx if x0[i] == 0.0]
    if zero:
        raise ZeroInnateOpinion(zero)
    off = W.sum(axis=1) - np.diag(W)
    pred = W @ np.asarray(x_k, dtype=float)
    beta = np.full(n, np.nan)
    for i in idx:
        beta[i] = 1.0 - off[i] - (x_k1[i] - pred[i]) / x0[i]
    return beta


def infer_problem1(
    traj: Trajectory,
    m: int = 0,
    p: int | None = None,
    rank_tol: float | None = None,
    zero_tol: float = ZERO_TOL,
    beta_tol: float = BETA_TOL,
) -> InferenceResult:
    """Recover W, gamma and beta from a piecewise-linear (zero-source) trajectory.

    Raises :class:`NotSolvable` when P is rank deficient. Individuals with a
    zero innate opinion get NaN for gamma and beta and the verdict lists them.
    """
    m, p = _window(traj, m, p)
    if rank_tol is None:
        rank_tol = default_rank_tol(traj)
    n = traj.n
    x0 = traj.x0
    zero = frozenset(int(i) for i in np.nonzero(x0 == 0.0)[0])
    sol = _solve(traj, m, p, rank_tol)
    if not sol.full_rank:
        report = SolvabilityReport(sol.rank_P, n, zero, RANK_DEFICIENT, sol.gap, rank_tol)
        raise NotSolvable(report)
    W = sol.S
    diag = np.diag(W)
    bad = [i for i in zero if abs(diag[i]) >= zero_tol]
    if bad:
        report = SolvabilityReport(sol.rank_P, n, zero, ZERO_INNATE, sol.gap, rank_tol, frozenset(bad))
        raise ZeroInnate(report, f"nonzero diagonal at zero innate opinion, individuals {[i + 1 for i in bad]}")

    ok = [i for i in range(n) if i not in zero]
    gamma = np.full(n, np.nan)
    for i in ok:
        gamma[i] = diag[i] / x0[i] if abs(diag[i]) >= zero_tol else 0.0
    k2 = traj.T // 2
    beta0 = infer_beta(W, x0, traj.x[0], traj.x[1], ok)
    beta1 = infer_beta(W, x0, traj.x[k2], traj.x[k2 + 1], ok)
    spread = np.abs(beta0 - beta1)
    beta = beta0.copy()
    beta[np.abs(beta) < zero_tol] = 0.0

    pq = build_pq(traj, m, p, rank_tol)
    residual = float(np.abs(W @ pq.P - pq.Q).max())
    if zero:
        verdict = ZERO_INNATE
    elif np.nanmax(spread, initial=0.0) > beta_tol:
        verdict = INCONSISTENT
    else:
        verdict = SOLVABLE
    report = SolvabilityReport(sol.rank_P, n, zero, verdict, sol.gap, rank_tol, zero)
    return InferenceResult(W, gamma, beta, report, residual, spread, zero_tol)


def check_solvability_ground_truth(net: NetworkSpec | ValidatedNetwork, x0, rank_tol: float = 1e-10) -> bool:
    spec = net.spec if isinstance(net, ValidatedNetwork) else net
    x0 = np.asarray(x0, dtype=float)
    if any(x0[i] == 0.0 for i in spec.follower_set):
        return False
    enc = build_encoded(spec, x0)
    return krylov_rank(enc, x0, spec.n, rank_tol) == spec.n


@dataclass(frozen=True, eq=False)
class Problem2Result:
    W_hat: np.ndarray
    diag_residual: float
    solvability: SolvabilityReport
    zero_tol: float = ZERO_TOL

    @property
    def weights(self) -> np.ndarray:
        W = self.W_hat.copy()
        np.fill_diagonal(W, 0.0)
        W[np.abs(W) < self.zero_tol] = 0.0
        return W

    def to_dict(self) -> dict:
        W = self.weights
        return {
            "problem": 2,
            "W_hat": self.W_hat.tolist(),
            "edges": [{"i": int(i) + 1, "j": int(j) + 1, "w": float(W[i, j])} for i, j in zip(*np.nonzero(W))],
            "diag_residual": self.diag_residual,
            "solvability": self.solvability.to_dict(),
        }


def infer_problem2(
    traj: Trajectory,
    m: int = 0,
    p: int | None = None,
    rank_tol: float | None = None,
    zero_tol: float = ZERO_TOL,
) -> Problem2Result:
    """Recover the topology when sources pull with fixed, unbiased weights."""
    m, p = _window(traj, m, p)
    if rank_tol is None:
        rank_tol = default_rank_tol(traj)
    sol = _solve(traj, m, p, rank_tol)
    zero = frozenset(int(i) for i in np.nonzero(traj.x0 == 0.0)[0])
    if not sol.full_rank:
        raise NotSolvable(SolvabilityReport(sol.rank_P, traj.n, zero, RANK_DEFICIENT, sol.gap, rank_tol))
    report = SolvabilityReport(sol.rank_P, traj.n, zero, SOLVABLE, sol.gap, rank_tol)
    return Problem2Result(sol.S, float(np.abs(np.diag(sol.S)).max()), report, zero_tol)


@dataclass(frozen=True)
class SourceResidual:
    residual: float
    spread: float
    w_hat: float | None
    non_unique: bool

    def to_dict(self) -> dict:
        return {"residual": self.residual, "spread": self.spread, "w_hat": self.w_hat, "non_unique": self.non_unique}


def source_residual(traj: Trajectory, W_hat, i: int) -> SourceResidual:
    """Aggregate source pull on individual ``i``: sum_d w_id (u_d - x_i(0)).

    With a single source the weight itself is returned as well.
    """
    W = np.array(W_hat, dtype=float)
    np.fill_diagonal(W, 0.0)
    x = traj.x
    x0i = x[0, i]
    row = W[i]
    vals = x[1:, i] - x[:-1] @ row - (1.0 - row.sum()) * x0i
    res = float(vals[0])
    spread = float(vals.max() - vals.min())
    u = traj.source_opinions
    if len(u) == 1:
        if u[0] == x0i:
            raise DegenerateSource(f"source opinion equals the innate opinion of individual {i + 1}")
        return SourceResidual(res, spread, res / (u[0] - x0i), False)
    return SourceResidual(res, spread, None, len(u) > 1)
