"""Measurement matrices built from opinion differences, ranks and window solves.

With d(k) = x(k+1) - x(k) stacked as the rows of D, the window [m, p] gives
P = D[m:p+1]^T D[m:p+1] and Q = D[m+1:p+2]^T D[m:p+1]. Solving W P = Q is the
normal-equation form of the least-squares problem D[m:p+1] W^T = D[m+1:p+2],
which is what the solvers below work on; it keeps the conditioning of D
instead of its square. Singular values of P are the squares of those of D.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .dynamics import Trajectory, source_pull
from .errors import InsufficientData
from .network import EncodedMatrices

# Relative thresholds on the singular values of P.
RANK_TOL = {"double": 1e-10, "dd": 1e-44}


def default_rank_tol(traj: Trajectory) -> float:
    return RANK_TOL[traj.precision]


@dataclass(frozen=True, eq=False)
class MeasurementPair:
    P: np.ndarray
    Q: np.ndarray
    window: tuple[int, int]
    rank_P: int
    rank_tol: float
    singular_values: np.ndarray
    # sigma_rank / sigma_{rank+1} of P; inf when there is no trailing value
    gap: float

    @property
    def full_rank(self) -> bool:
        return self.rank_P == self.P.shape[0]


def _check_window(traj: Trajectory, m: int, p: int):
    if m < 0 or p < m:
        raise ValueError(f"invalid window [{m}, {p}]")
    if traj.T + 1 < p + 3:
        raise InsufficientData(p + 3, traj.T + 1)


def _rank_from_sigma(sig_p: np.ndarray, rel_tol: float) -> tuple[int, float]:
    sig_p = np.sort(sig_p)[::-1]
    if sig_p.size == 0 or sig_p[0] == 0.0:
        return 0, np.inf
    r = int(np.count_nonzero(sig_p > rel_tol * sig_p[0]))
    if r == sig_p.size:
        return r, np.inf
    below = sig_p[r]
    return r, float(sig_p[r - 1] / below) if below > 0 else np.inf


def window_sigma(traj: Trajectory, m: int, p: int) -> np.ndarray:
    """Singular values of P_{m,p}, descending."""
    Dh, Dl = traj.differences()
    if Dl is None:
        s = np.linalg.svd(Dh[m : p + 1], compute_uv=False)
    else:
        R = kernels.window_qr_dd(Dh, Dl, np.array([m]), p)
        s = kernels.svd_solve_dd(R[0][0], R[1][0], R[2][0], R[3][0], 0.0)[2]
    s = np.sort(s)[::-1]
    out = np.zeros(traj.n)
    out[: s.size] = s**2
    return out


def build_pq(traj: Trajectory, m: int = 0, p: int | None = None, rank_tol: float | None = None) -> MeasurementPair:
    """P and Q over the inclusive window [m, p]; default p uses all data."""
    if p is None:
        p = traj.T - 2
    _check_window(traj, m, p)
    if rank_tol is None:
        rank_tol = default_rank_tol(traj)
    Dh, _ = traj.differences()
    D = Dh[m : p + 1]
    Dn = Dh[m + 1 : p + 2]
    P = D.T @ D
    P = 0.5 * (P + P.T)
    Q = Dn.T @ D
    sig = window_sigma(traj, m, p)
    r, gap = _rank_from_sigma(sig, rank_tol)
    return MeasurementPair(P, Q, (m, p), r, rank_tol, sig, gap)


def numerical_rank(M, rel_tol: float = 1e-10) -> int:
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > rel_tol * s[0]))


def krylov(enc: EncodedMatrices, x0, depth: int) -> np.ndarray:
    """Columns W^k L x(0) for k = 0..depth-1."""
    W = enc.W
    v = enc.L @ np.asarray(x0, dtype=float)
    K = np.empty((W.shape[0], depth))
    for k in range(depth):
        K[:, k] = v
        v = W @ v
    return K


def krylov_rank(enc: EncodedMatrices, x0, depth: int, rank_tol: float = 1e-10) -> int:
    """Rank of the Krylov matrix under the same policy as rank(P).

    P accumulates the outer products of the Krylov columns, so its singular
    values are squares; the threshold is taken as sqrt(rank_tol).
    """
    return numerical_rank(krylov(enc, x0, depth), np.sqrt(rank_tol))


def residual_R(traj: Trajectory, net, m: int, p: int) -> np.ndarray:
    """Sum over k in [m, p] of (A(k) - A(k+1)) x(0) d(k)^T.

    With this sign the windowed identity reads W P = Q + R.
    """
    _check_window(traj, m, p)
    x = traj.x
    x0 = x[0]
    Dh, _ = traj.differences()
    R = np.zeros((traj.n, traj.n))
    pull = source_pull(net, x[m], x0)
    for k in range(m, p + 1):
        nxt = source_pull(net, x[k + 1], x0)
        R += np.outer(pull - nxt, Dh[k])
        pull = nxt
    return R


@dataclass(frozen=True, eq=False)
class WindowSolution:
    """Least-squares solution S = Q P^+ of one window, with rank diagnostics."""

    window: tuple[int, int]
    S: np.ndarray
    rank_P: int
    singular_values: np.ndarray
    gap: float

    @property
    def full_rank(self) -> bool:
        return self.rank_P == self.S.shape[0]


def solve_windows(traj: Trajectory, starts, p: int, rank_tol: float | None = None) -> list[WindowSolution]:
    """Solve W P_{m,p} = Q_{m,p} for every start m in ``starts``.

    Directions of P below the rank threshold are dropped (minimum-norm
    solution); callers check ``full_rank`` before trusting S.
    """
    starts = sorted(int(m) for m in starts)
    if not starts:
        return []
    for m in starts:
        _check_window(traj, m, p)
    if rank_tol is None:
        rank_tol = default_rank_tol(traj)
    cut = float(np.sqrt(rank_tol))
    n = traj.n
    Dh, Dl = traj.differences()
    out = []
    if Dl is None:
        for m in starts:
            D = Dh[m : p + 1]
            X, _, _, s = np.linalg.lstsq(D, Dh[m + 1 : p + 2], rcond=cut)
            sig = np.zeros(n)
            sig[: s.size] = s**2
            r, gap = _rank_from_sigma(sig, rank_tol)
            out.append(WindowSolution((m, p), X.T, r, np.sort(sig)[::-1], gap))
        return out
    Rh, Rl, Ch, Cl = kernels.window_qr_dd(Dh, Dl, np.array(starts, dtype=np.int64), p)
    for w, m in enumerate(starts):
        Xh, _, sh, _ = kernels.svd_solve_dd(Rh[w], Rl[w], Ch[w], Cl[w], cut)
        sig = np.sort(sh)[::-1] ** 2
        r, gap = _rank_from_sigma(sig, rank_tol)
        out.append(WindowSolution((m, p), Xh.T.copy(), r, sig, gap))
    return out
