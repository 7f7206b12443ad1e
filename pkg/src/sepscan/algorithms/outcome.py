"""Configuration and result types shared by the testers."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from enum import Enum

from ..linalg import RANK_RTOL, ZERO_RTOL
from .sizes import DELTA, default_delta_prime, sample_size_separator, sample_size_tree


class Verdict(str, Enum):
    IS_TREE = "IsTree"
    NOT_TREE = "NotTree"
    TERMINATED = "Terminated"
    BROKE = "Broke"
    INCONCLUSIVE = "Inconclusive"

    def __str__(self) -> str:
        return self.value


@dataclass
class TraceEntry:
    """One recursion step: the vertex set handled, the separator found and the child components."""

    vertices: tuple[int, ...]
    separator: tuple[int, ...]
    children: list[tuple[int, ...]]
    level: int
    event: str = "split"
    conditioning: tuple[int, ...] = ()


@dataclass
class TestOutcome:
    __test__ = False  # not a pytest class

    verdict: Verdict
    good_run: bool
    queries: int
    trace: list[TraceEntry] = field(default_factory=list)
    depth: int = 0
    info: dict = field(default_factory=dict)

    def to_dict(self, with_trace: bool = False) -> dict:
        out = {"verdict": str(self.verdict), "good_run": self.good_run,
               "queries": self.queries, "depth": self.depth, "info": dict(self.info)}
        if with_trace:
            out["trace"] = [asdict(t) for t in self.trace]
        return out


@dataclass
class TreeTestConfig:
    m: int | None = None
    eps: float = 0.1
    seed: int = 0
    zero_tol: float = ZERO_RTOL
    direct_tol: float = 1e-7

    def __post_init__(self):
        if self.m is not None and self.m < 1:
            raise ValueError("m must be at least 1")
        if not 0 < self.eps < 1:
            raise ValueError("eps must lie in (0, 1)")

    def resolve_m(self, n: int) -> int:
        return self.m if self.m is not None else sample_size_tree(max(n, 2), self.eps)


@dataclass
class SeparatorConfig:
    k: int
    m: int | None = None
    eps: float = 0.1
    delta: float = DELTA
    delta_prime: float | None = None
    seed: int = 0
    max_m: int = 24
    direct_max: int = 12
    max_resample: int = 3
    rank_tol: float = RANK_RTOL
    zero_tol: float = ZERO_RTOL
    direct_tol: float = 1e-7

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.m is not None and self.m < 2:
            raise ValueError("m must be at least 2")
        if not 0 < self.eps < 1:
            raise ValueError("eps must lie in (0, 1)")

    def theory_m(self, n: int) -> int:
        dp = self.delta_prime if self.delta_prime is not None else default_delta_prime(max(n, 2), self.eps)
        return sample_size_separator(self.k, self.delta, dp)

    def resolve_m(self, n: int) -> tuple[int, bool]:
        """Sample size to use and whether it meets the theoretical requirement."""
        theory = self.theory_m(n)
        if self.m is None:
            if theory > self.max_m:
                raise ValueError(
                    f"theoretical sample size {theory} exceeds the exhaustive-search cap {self.max_m}; "
                    "pass an explicit m")
            return theory, True
        if self.m > self.max_m:
            raise ValueError(f"m={self.m} exceeds the exhaustive-search cap {self.max_m}; raise max_m to allow it")
        return self.m, self.m >= theory
