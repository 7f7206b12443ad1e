"""Sample-size formulas (natural logarithms throughout)."""

from __future__ import annotations

import math

DELTA = 7 / 30


def sample_size_tree(n: int, eps: float) -> int:
    """``ceil(18 ln(5 n^2 / eps * ln n))`` vertices per balanced-partition step."""
    if n < 2:
        raise ValueError("n must be at least 2")
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    return math.ceil(18 * math.log(5 * n * n / eps * math.log(n)))


def default_delta_prime(n: int, eps: float) -> float:
    """Per-call failure probability ``eps / (10 n ln n)``."""
    if n < 2:
        raise ValueError("n must be at least 2")
    return eps / (10 * n * math.log(n))


def sample_size_separator(k: int, delta: float = DELTA, delta_prime: float = 0.01) -> int:
    """``ceil(max(110k/δ² ln(88k/δ²), 2/δ² ln(2/δ')))`` sampled vertices for the separator search."""
    if k < 1:
        raise ValueError("k must be at least 1")
    if not (0 < delta < 1 / 3 and 0 < delta_prime < 1 / 3):
        raise ValueError("delta and delta_prime must lie in (0, 1/3)")
    d2 = delta * delta
    return math.ceil(max(110 * k / d2 * math.log(88 * k / d2), 2 / d2 * math.log(2 / delta_prime)))
