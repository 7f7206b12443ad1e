"""Connected components of the residual graph from the support of pivot rows."""

from __future__ import annotations

from typing import Sequence

import numpy as np


class QueryBoundError(RuntimeError):
    """A Components call read more entries than its guaranteed budget."""


class BoundStats:
    """Running record of every Components call's reads against its budget."""

    def __init__(self):
        self.calls = 0
        self.worst_ratio = 0.0

    def note(self, reads: int, bound: int):
        self.calls += 1
        if bound:
            self.worst_ratio = max(self.worst_ratio, reads / bound)


STATS = BoundStats()


def components(view, W: Sequence[int], rng: np.random.Generator | None = None) -> list[list[int]]:
    """Partition ``W`` into the blocks ``C ∩ W`` of the residual graph's components.

    ``view`` answers ``dependent(pivot, candidates)``. Each round reads one
    pivot row restricted to the unassigned vertices (pivot included), so the
    number of reads is ``sum_t |A_t| <= |W| * min(ell, |W|)``; this bound is
    enforced on every call, together with the ledger growth when the view is
    an unconditioned oracle view. Pivots are random if ``rng`` is given, else
    the lowest remaining index.
    """
    remaining = np.array(sorted({int(w) for w in W}), dtype=np.intp)
    w = remaining.size
    q0 = getattr(view, "queries", None)
    blocks: list[list[int]] = []
    reads = 0
    while remaining.size:
        p = remaining[rng.integers(remaining.size)] if rng is not None else remaining[0]
        dep = np.asarray(view.dependent(int(p), remaining), dtype=bool)
        reads += remaining.size
        blocks.append(remaining[dep].tolist())
        remaining = remaining[~dep]
    bound = w * min(len(blocks), w)
    STATS.note(reads, bound)
    if reads > bound:
        raise QueryBoundError(f"Components read {reads} entries, budget {bound}")
    if q0 is not None and not getattr(view, "conditioning", ()) and hasattr(view, "base"):
        grown = view.queries - q0
        if grown > bound:
            raise QueryBoundError(f"Components added {grown} ledger entries, budget {bound}")
    blocks.sort(key=lambda b: b[0])
    return blocks
