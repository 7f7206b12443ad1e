"""Rank-based balanced separators."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..linalg import RANK_RTOL, batched_rank, numerical_rank
from .outcome import SeparatorConfig


class DegenerateSampleError(ValueError):
    """The separator sample collapsed to fewer than two distinct vertices."""


def ab_separator(view, A: Sequence[int], A_prime: Sequence[int], V: Sequence[int],
                 rank_tol: float = RANK_RTOL) -> tuple[list[int], int, bool]:
    """Grow a separator of ``A`` and ``A'`` inside ``V`` from rank tests.

    ``U`` collects every ``v`` with ``rank(Σ_{A+v, A'+v}) = r`` where
    ``r = rank(Σ_{A,A'})``. Starting from one member of ``U``, members are
    added while the rank stays ``r``. Candidates outside ``A ∪ A'`` are tried
    first, then by index. Returns ``(S, r, good)`` with ``good`` meaning
    ``|S| == r``; ``|S| <= r`` always holds.
    """
    A = [int(a) for a in A]
    Ap = [int(a) for a in A_prime]
    V = [int(v) for v in V]
    if set(A) & set(Ap):
        raise ValueError("A and A' must be disjoint")
    base = view.block(A, Ap)
    r = numerical_rank(base, rank_tol)
    if r == 0:
        return [], 0, True
    setA, setAp = set(A), set(Ap)
    Vx = np.array(V, dtype=np.intp)
    rowsA = view.block(A, Vx)       # Σ_{A, v}
    colsAp = view.block(Vx, Ap)     # Σ_{v, A'}
    diag = view.diagonal(Vx)
    pos = {v: t for t, v in enumerate(V)}
    outside = [t for t, v in enumerate(V) if v not in setA and v not in setAp]

    U: list[int] = []
    if outside:
        o = np.array(outside)
        p, q = len(A), len(Ap)
        stack = np.empty((o.size, p + 1, q + 1))
        stack[:, :p, :q] = base
        stack[:, :p, q] = rowsA[:, o].T
        stack[:, p, :q] = colsAp[o]
        stack[:, p, q] = diag[o]
        ok = batched_rank(stack, rank_tol) == r
        U.extend(V[t] for t in o[ok])
    for v in sorted(setA | setAp):
        if v not in pos:
            continue
        t = pos[v]
        if v in setA:
            M = np.hstack([base, rowsA[:, [t]]])
        else:
            M = np.vstack([base, colsAp[[t]]])
        if numerical_rank(M, rank_tol) == r:
            U.append(v)
    if not U:
        return [], r, False

    S = [U[0]]
    for u in U[1:]:
        if len(S) == r:
            break
        rows = A + [x for x in S + [u] if x not in setA]
        cols = Ap + [x for x in S + [u] if x not in setAp]
        if numerical_rank(view.block(rows, cols), rank_tol) == r:
            S.append(u)
    return sorted(S), r, len(S) == r


@dataclass
class SeparatorResult:
    broke: bool
    S: list[int]
    A: list[int]
    A_prime: list[int]
    rank: int
    good: bool
    sample: list[int]


def balanced_masks(w: int) -> np.ndarray:
    """Bitmasks of ``A`` for unordered balanced splits of ``w`` items, in increasing order.

    ``A`` always holds item 0, both sides are non-empty and ``3 max(|A|,|A'|) <= 2w``.
    """
    if w < 2:
        return np.zeros(0, dtype=np.int64)
    masks = np.arange(1, 1 << w, 2, dtype=np.int64)   # item 0 in A
    sizes = np.zeros(masks.shape, dtype=np.int64)
    for b in range(w):
        sizes += (masks >> b) & 1
    ok = (sizes < w) & (3 * np.maximum(sizes, w - sizes) <= 2 * w)
    return masks[ok]


def min_rank_split(M: np.ndarray, rank_tol: float = RANK_RTOL) -> tuple[int, int]:
    """First (in mask order) balanced split of the rows/cols of ``M`` minimising ``rank(M[A, A'])``."""
    w = M.shape[0]
    masks = balanced_masks(w)
    bits = ((masks[:, None] >> np.arange(w)[None, :]) & 1).astype(bool)
    sizes = bits.sum(1)
    ranks = np.empty(masks.size, dtype=int)
    for a in np.unique(sizes):
        sel = np.flatnonzero(sizes == a)
        rows = np.nonzero(bits[sel])[1].reshape(-1, a)
        cols = np.nonzero(~bits[sel])[1].reshape(-1, w - a)
        for lo in range(0, sel.size, 65536):
            part = slice(lo, lo + 65536)
            ranks[sel[part]] = batched_rank(M[rows[part, :, None], cols[part, None, :]], rank_tol)
    best = int(np.argmin(ranks))
    return int(masks[best]), int(ranks[best])


def separator(view, V: Sequence[int], cfg: SeparatorConfig, rng: np.random.Generator,
              m: int | None = None) -> SeparatorResult:
    """Find a small balanced separator of a random sample of ``V``, or report a break.

    ``m`` vertices are drawn from ``V`` with replacement and deduplicated; all
    balanced splits of the sample are searched for the least rank of
    ``Σ_{A,A'}``. A least rank above ``k`` is a break; otherwise the split is
    handed to :func:`ab_separator`.
    """
    V = sorted(int(v) for v in V)
    if m is None:
        m, _ = cfg.resolve_m(len(V))
    arr = np.array(V)
    for _ in range(2):
        Wd = np.unique(rng.choice(arr, size=m, replace=True))
        if Wd.size >= 2:
            break
    else:
        raise DegenerateSampleError("separator sample has fewer than two distinct vertices")
    M = view.block(Wd, Wd)
    mask, r = min_rank_split(M, cfg.rank_tol)
    inA = np.array([(mask >> b) & 1 for b in range(Wd.size)], dtype=bool)
    A, Ap = Wd[inA].tolist(), Wd[~inA].tolist()
    if r > cfg.k:
        return SeparatorResult(True, [], A, Ap, r, True, Wd.tolist())
    S, r2, good = ab_separator(view, A, Ap, V, cfg.rank_tol)
    return SeparatorResult(False, S, A, Ap, r2, good, Wd.tolist())
