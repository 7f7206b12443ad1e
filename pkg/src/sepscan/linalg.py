"""Dense symmetric linear algebra used by the testers.

Everything here works on plain ``numpy`` arrays in double precision.
Index sets are sequences of distinct non-negative integers.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np
from scipy import linalg as sla

RANK_RTOL = 1e-8
ZERO_RTOL = 1e-9


class NotPositiveDefiniteError(np.linalg.LinAlgError):
    """Raised when a matrix that must be SPD fails its Cholesky factorization."""


def as_index(idx: Sequence[int], n: int) -> np.ndarray:
    """Validate an index set against dimension ``n`` and return it as an int array."""
    arr = np.asarray(idx, dtype=np.intp).reshape(-1)
    if arr.size and (arr.min() < 0 or arr.max() >= n):
        raise IndexError(f"index out of range for dimension {n}: {list(arr)}")
    return arr


def submatrix(M: np.ndarray, rows: Sequence[int], cols: Sequence[int]) -> np.ndarray:
    """Return ``M[rows][:, cols]`` with bounds checking (no negative wraparound)."""
    M = np.asarray(M)
    r = as_index(rows, M.shape[0])
    c = as_index(cols, M.shape[1])
    return M[np.ix_(r, c)]


def complement(n: int, S: Sequence[int]) -> np.ndarray:
    mask = np.ones(n, dtype=bool)
    mask[as_index(S, n)] = False
    return np.flatnonzero(mask)


def cholesky(M: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor; raises NotPositiveDefiniteError on failure."""
    M = np.asarray(M, dtype=float)
    if M.shape[0] == 0:
        return np.zeros((0, 0))
    try:
        return np.linalg.cholesky(M)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(str(exc)) from exc


def spd_solve(L: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Solve ``(L L^T) X = B`` given the lower Cholesky factor ``L``."""
    if L.shape[0] == 0:
        return np.zeros((0,) + np.shape(B)[1:])
    y = sla.solve_triangular(L, B, lower=True, check_finite=False)
    return sla.solve_triangular(L.T, y, lower=False, check_finite=False)


def schur_complement(M: np.ndarray, S: Sequence[int]) -> np.ndarray:
    """Conditional covariance of the remaining coordinates given those in ``S``.

    Returns ``M[R,R] - M[R,S] M[S,S]^{-1} M[S,R]`` where ``R`` is the sorted
    complement of ``S``. Raises NotPositiveDefiniteError if ``M[S,S]`` is not
    numerically positive definite.
    """
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    S = as_index(S, n)
    R = complement(n, S)
    if S.size == 0:
        return M[np.ix_(R, R)].copy()
    L = cholesky(M[np.ix_(S, S)])
    X = sla.solve_triangular(L, M[np.ix_(S, R)], lower=True, check_finite=False)
    out = M[np.ix_(R, R)] - X.T @ X
    return (out + out.T) / 2


def numerical_rank(M: np.ndarray, rel_tol: float = RANK_RTOL) -> int:
    """Number of singular values above ``rel_tol`` times the largest one."""
    if rel_tol <= 0:
        raise ValueError("rel_tol must be positive")
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.count_nonzero(s > rel_tol * s[0]))


def batched_rank(stack: np.ndarray, rel_tol: float = RANK_RTOL) -> np.ndarray:
    """Numerical rank of every matrix in a ``(B, p, q)`` stack."""
    stack = np.asarray(stack, dtype=float)
    if stack.shape[0] == 0:
        return np.zeros(0, dtype=int)
    if stack.shape[1] == 0 or stack.shape[2] == 0:
        return np.zeros(stack.shape[0], dtype=int)
    s = np.linalg.svd(stack, compute_uv=False)
    top = s[:, :1]
    return np.count_nonzero((s > rel_tol * top) & (top > 0), axis=1)


def spd_inverse(M: np.ndarray) -> np.ndarray:
    """Inverse of an SPD matrix via Cholesky; raises on non-SPD input."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("expected a square matrix")
    if not np.allclose(M, M.T, rtol=1e-10, atol=1e-12 * max(1.0, np.abs(M).max(initial=0))):
        raise NotPositiveDefiniteError("matrix is not symmetric")
    L = cholesky(M)
    inv = spd_solve(L, np.eye(M.shape[0]))
    return (inv + inv.T) / 2


def is_zero(value, scale, rel_tol: float = ZERO_RTOL):
    """Relative zero test ``|value| <= rel_tol * scale`` (vectorized)."""
    return np.abs(value) <= rel_tol * np.abs(scale)
