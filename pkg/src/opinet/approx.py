"""Approximate inference under unknown confirmation bias.

Windowed solutions S_k = Q_{k,p} P_{k,p}^{-1} for several start indices k
agree on the rows of individuals that follow no information source, and
those rows are exact. Rows that disagree across windows belong to followers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import Trajectory
from .errors import EmptyWindowSet, InsufficientData
from .measurement import WindowSolution, default_rank_tol, solve_windows
from .network import NetworkSpec, ValidatedNetwork

AGREE_TOL = 1e-7
STEADY_STEP = 1e-6

NON_FOLLOWER = "NonFollower"
FOLLOWER = "Follower"
UNKNOWN = "Unknown"


@dataclass(frozen=True, eq=False)
class WindowSet:
    p: int
    candidates: tuple[int, ...]
    solutions: dict[int, WindowSolution]
    rank_tol: float

    def S(self, k: int) -> np.ndarray:
        return self.solutions[k].S


def default_p(traj: Trajectory, m_max: int) -> int:
    """First index where the largest opinion step drops below 1e-6.

    Clamped to [m_max + n, m_max + 3n] and to the available data: windows far
    into the steady state add little information and hurt conditioning.
    """
    n = traj.n
    step = np.abs(np.diff(traj.x, axis=0)).max(axis=1)
    small = np.nonzero(step < STEADY_STEP)[0]
    p = int(small[0]) if small.size else traj.T - 2
    return max(m_max + n, min(p, m_max + 3 * n, traj.T - 2))


def build_window_set(traj: Trajectory, m_max: int, p: int, rank_tol: float | None = None) -> WindowSet:
    n = traj.n
    if m_max < 1:
        raise ValueError("m_max must be at least 1")
    if p < m_max + n:
        raise ValueError(f"p = {p} is below m_max + n = {m_max + n}; no window can reach rank n")
    if traj.T < p + 2:
        raise InsufficientData(p + 3, traj.T + 1)
    if rank_tol is None:
        rank_tol = default_rank_tol(traj)
    sols = solve_windows(traj, range(1, m_max + 1), p, rank_tol)
    members = {s.window[0]: s for s in sols if s.full_rank}
    if not members:
        best = max(s.rank_P for s in sols)
        raise EmptyWindowSet(f"no window [k, {p}] with 1 <= k <= {m_max} reaches rank {n} (best {best})")
    return WindowSet(p, tuple(sorted(members)), members, rank_tol)


@dataclass(frozen=True, eq=False)
class ApproxResult:
    W_breve: np.ndarray
    follower_flags: tuple[str, ...]
    agreement_scores: np.ndarray
    windows_used: tuple[tuple[int, int], ...]
    clamped: np.ndarray
    diag_residual: np.ndarray

    @property
    def followers(self) -> frozenset[int]:
        return frozenset(i for i, f in enumerate(self.follower_flags) if f == FOLLOWER)

    def to_dict(self) -> dict:
        return {
            "problem": 3,
            "W_breve": self.W_breve.tolist(),
            "follower_flags": {str(i + 1): f for i, f in enumerate(self.follower_flags)},
            "followers": sorted(i + 1 for i in self.followers),
            "agreement_scores": self.agreement_scores.tolist(),
            "windows_used": [list(w) for w in self.windows_used],
            "clamped_entries": [[int(i) + 1, int(j) + 1] for i, j in zip(*np.nonzero(self.clamped))],
            "diag_residual": self.diag_residual.tolist(),
        }


def infer_problem3(
    traj: Trajectory,
    m_max: int = 2,
    p: int | None = None,
    agree_tol: float = AGREE_TOL,
    rank_tol: float | None = None,
) -> ApproxResult:
    """Window-agreement inference with per-row follower classification.

    Rows whose windowed solutions agree within ``agree_tol`` and carry no
    self-weight are exact non-follower rows. Other rows are flagged Follower
    and take the solution of the earliest window. Negative weights are clamped to zero and the
    diagonal is dropped (no self-loops); its magnitude is kept as a diagnostic.
    """
    if p is None:
        p = default_p(traj, m_max)
    ws = build_window_set(traj, m_max, p, rank_tol)
    n = traj.n
    first = ws.S(ws.candidates[0])
    scores = np.zeros(n)
    for a, r in enumerate(ws.candidates):
        for q in ws.candidates[a + 1 :]:
            scores = np.maximum(scores, np.abs(ws.S(r) - ws.S(q)).max(axis=1))
    diag = np.abs(np.diag(first)).copy()
    # an exact row has no self-weight; a state-dependent pull that happens to
    # be linear in x(k) (piecewise-linear bias) shows up only on the diagonal
    scores = np.maximum(scores, diag)
    if len(ws.candidates) < 2:
        flags = tuple(FOLLOWER if d > agree_tol else UNKNOWN for d in diag)
    else:
        flags = tuple(NON_FOLLOWER if s <= agree_tol else FOLLOWER for s in scores)
    W = first.copy()
    np.fill_diagonal(W, 0.0)
    clamped = W < 0.0
    W[clamped] = 0.0
    used = tuple((k, p) for k in ws.candidates)
    return ApproxResult(W, flags, scores, used, clamped, diag)


@dataclass(frozen=True)
class RowErrorReport:
    row_errors: np.ndarray
    non_followers: frozenset[int]
    tol: float

    @property
    def max_non_follower_error(self) -> float:
        idx = sorted(self.non_followers)
        return float(self.row_errors[idx].max()) if idx else 0.0

    @property
    def passed(self) -> bool:
        return self.max_non_follower_error < self.tol


def partial_exactness_check(result: ApproxResult, net: NetworkSpec | ValidatedNetwork, tol: float = 1e-6) -> RowErrorReport:
    """Per-row max |w_breve - w| over all off-diagonal entries."""
    spec = net.spec if isinstance(net, ValidatedNetwork) else net
    err = np.abs(result.W_breve - spec.weights)
    np.fill_diagonal(err, 0.0)
    non = frozenset(range(spec.n)) - spec.follower_set
    return RowErrorReport(err.max(axis=1), non, tol)
