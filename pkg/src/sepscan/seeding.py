"""Splittable seeding.

A run seed is expanded with :class:`numpy.random.SeedSequence` into named,
independent streams, so the graph, the matrix, the tester and any sampled
data can each be reproduced on their own.
"""

from __future__ import annotations

import numpy as np

STREAMS = {"graph": 0, "precision": 1, "tester": 2, "samples": 3}


def stream(seed: int, name: str, *extra: int) -> np.random.Generator:
    """Generator for the named stream of ``seed``; ``extra`` further splits it (e.g. trial index)."""
    if name not in STREAMS:
        raise KeyError(f"unknown stream {name!r}")
    ss = np.random.SeedSequence(int(seed), spawn_key=(STREAMS[name], *map(int, extra)))
    return np.random.default_rng(ss)


def child_seed(seed: int, *path: int) -> int:
    """Derive a plain integer seed (for recording in outputs) from ``seed`` and a path."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(map(int, path)))
    return int(ss.generate_state(1, dtype=np.uint32)[0])
