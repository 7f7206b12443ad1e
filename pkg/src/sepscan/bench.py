"""Scaling experiments: one isolated tester run per (size, trial)."""

from __future__ import annotations

import csv
import io
import math
import os
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

from .algorithms import SeparatorConfig, TreeTestConfig, ci_test_tree, test_conditional, test_marginal, test_tree
from .graphs import Graph, graph_from_spec
from .oracle import CovarianceOracle, ci_from_covariance
from .seeding import child_seed, stream
from .synth import synthesize

CSV_FIELDS = ["n", "delta", "verdict", "good_run", "queries", "depth", "wall_ms", "seed"]
BENCH_FAMILIES = ("tree", "bdtree", "tree_plus_edges", "k_tree", "ktree", "grid", "clique_planted")
MODES = ("tree", "marginal", "conditional", "ci")


@dataclass
class ExperimentSpec:
    family: str
    sizes: list[int]
    trials: int = 1
    seed: int = 0
    mode: str = "tree"
    k: int | None = None
    e: int = 1
    c: int = 5
    d: int = 3
    eps: float = 0.1
    m_override: int | None = None

    def __post_init__(self):
        if self.family not in BENCH_FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not self.sizes or any(n < 2 for n in self.sizes):
            raise ValueError("sizes must be integers >= 2")
        if sorted(self.sizes) != list(self.sizes):
            raise ValueError("sizes must be sorted ascending")
        if self.mode in ("marginal", "conditional") and self.k is None:
            raise ValueError(f"mode {self.mode} needs k")
        if self.mode in ("tree", "ci") and self.k is not None:
            raise ValueError(f"mode {self.mode} takes no k")

    def graph_spec(self, n: int) -> str:
        f = self.family
        if f == "grid":
            side = max(1, round(math.sqrt(n)))
            return f"grid:r={side},c={side}"
        if f in ("k_tree", "ktree"):
            return f"ktree:n={n},k={self.k or 2}"
        if f == "tree_plus_edges":
            return f"tree_plus_edges:n={n},e={self.e}"
        if f == "clique_planted":
            return f"clique_planted:n={n},c={self.c}"
        if f == "bdtree":
            return f"bdtree:n={n},d={self.d}"
        return f"tree:n={n}"


@dataclass
class RunRecord:
    n: int
    delta: int
    verdict: str
    good_run: bool
    queries: int
    depth: int
    wall_ms: float | None
    seed: int
    extra: dict = field(default_factory=dict)

    def row(self) -> dict:
        d = asdict(self)
        d.pop("extra")
        return d


def run_once(G: Graph, oracle: CovarianceOracle, mode: str, k: int | None, m: int | None,
             eps: float, seed: int):
    """Run one tester; returns the outcome."""
    if mode == "tree":
        return test_tree(oracle, TreeTestConfig(m=m, eps=eps, seed=seed))
    if mode == "ci":
        return ci_test_tree(ci_from_covariance(oracle), m=m, seed=seed, eps=eps)
    cfg = SeparatorConfig(k=k, m=m, eps=eps, seed=seed)
    return (test_marginal if mode == "marginal" else test_conditional)(oracle, cfg)


def run_trial(spec: ExperimentSpec, n: int, trial: int) -> RunRecord:
    seed = child_seed(spec.seed, n, trial)
    G = graph_from_spec(spec.graph_spec(n), stream(seed, "graph"))
    Sigma = synthesize(G, stream(seed, "precision"))
    oracle = CovarianceOracle.from_array(Sigma)
    t0 = time.perf_counter()
    out = run_once(G, oracle, spec.mode, spec.k, spec.m_override, spec.eps, child_seed(seed, 2))
    wall = (time.perf_counter() - t0) * 1000
    if spec.mode != "ci" and out.queries > G.n * (G.n + 1) // 2:
        raise AssertionError("query count exceeds the number of distinct entries")
    return RunRecord(G.n, G.max_degree, str(out.verdict), out.good_run, out.queries, out.depth,
                     round(wall, 3), seed, {"m": out.info.get("m")})


def _run_trial_args(args):
    return run_trial(*args)


def thread_cap() -> int:
    try:
        return max(1, int(os.environ.get("SEPSCAN_THREADS", "1")))
    except ValueError:
        return 1


def run_bench(spec: ExperimentSpec, workers: int | None = None) -> list[RunRecord]:
    """All trials, ordered by ``(n, trial)`` whatever the completion order."""
    jobs = [(spec, n, t) for n in spec.sizes for t in range(spec.trials)]
    workers = min(workers or thread_cap(), len(jobs))
    if workers <= 1:
        return [run_trial(*j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_trial_args, jobs))


def records_to_csv(records: list[RunRecord]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for r in records:
        w.writerow(r.row())
    return buf.getvalue()


def median_queries(records: list[RunRecord]) -> dict[int, float]:
    by_n: dict[int, list[int]] = {}
    for r in records:
        by_n.setdefault(r.n, []).append(r.queries)
    return {n: float(statistics.median(q)) for n, q in sorted(by_n.items())}
