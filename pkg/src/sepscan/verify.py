"""Brute-force verification of tester guarantees on small instances."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .algorithms import (SeparatorConfig, TreeTestConfig, Verdict, test_conditional, test_marginal,
                         test_tree)
from .exact import exact_separation_number, is_chordal, is_tree, separates
from .graphs import Graph, graph_from_spec, path_graph
from .oracle import CovarianceOracle
from .seeding import stream
from .synth import STRONG_MAX_N, synthesize, verify_strong_faithfulness, verify_tau_faithfulness

VERIFY_FAMILIES = {
    "tree": lambda n, rng: graph_from_spec(f"tree:n={n}", rng),
    "tree_plus_edges": lambda n, rng: graph_from_spec(f"tree_plus_edges:n={n},e={1 + int(rng.integers(3))}", rng),
    "ktree": lambda n, rng: graph_from_spec(f"ktree:n={n},k={2 + int(rng.integers(2))}", rng),
    "clique_planted": lambda n, rng: graph_from_spec(f"clique_planted:n={n},c={3 + int(rng.integers(3))}", rng),
    "cycle": lambda n, rng: graph_from_spec(f"cycle:n={n}", rng),
}


@dataclass
class Violation:
    family: str
    seed: int
    check: str
    detail: str


@dataclass
class VerifyReport:
    instances: int = 0
    runs: int = 0
    precondition_failures: list = field(default_factory=list)
    violations: list[Violation] = field(default_factory=list)
    checks: dict = field(default_factory=dict)

    def tick(self, name: str):
        self.checks[name] = self.checks.get(name, 0) + 1

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {"instances": self.instances, "runs": self.runs, "ok": self.ok,
                "checks": dict(sorted(self.checks.items())),
                "precondition_failures": self.precondition_failures,
                "violations": [v.__dict__ for v in self.violations]}


def _faithful(Sigma: np.ndarray, G: Graph, tau: int):
    if G.n <= STRONG_MAX_N:
        return verify_strong_faithfulness(Sigma, G, tau)
    return verify_tau_faithfulness(Sigma, G, tau)


def _pairwise_separated(G: Graph, S, children) -> bool:
    return all(separates(G, S, a, b) for a, b in itertools.combinations(children, 2))


def check_instance(G: Graph, Sigma: np.ndarray, sn: int, ks, m: int, seed: int, family: str,
                   report: VerifyReport):
    """Run every tester on one instance and record guarantee violations."""
    def fail(check, detail):
        report.violations.append(Violation(family, seed, check, detail))

    if G.n >= 2:
        out = test_tree(CovarianceOracle.from_array(Sigma), TreeTestConfig(seed=seed))
        report.tick("tree-both-directions")
        if (out.verdict is Verdict.IS_TREE) != is_tree(G):
            fail("tree-both-directions", f"verdict {out.verdict}, is_tree {is_tree(G)}")
    chordal = is_chordal(G)
    for k in ks:
        if k >= G.n:
            continue
        cfg = SeparatorConfig(k=k, m=m, seed=seed)
        md = test_marginal(CovarianceOracle.from_array(Sigma), cfg)
        cd = test_conditional(CovarianceOracle.from_array(Sigma), cfg)
        report.runs += 2
        tag = f"k={k} sn={sn}"
        if md.good_run:
            report.tick("marginal-good-run")
            if md.verdict is Verdict.TERMINATED and not sn <= 2 * k:
                fail("marginal-terminated", tag)
            if md.verdict is Verdict.BROKE and not sn > 2 * k / 3:
                fail("marginal-broke", tag)
        report.tick("conditional")
        if sn <= k and cd.verdict is Verdict.BROKE:
            fail("conditional-never-breaks", tag)
        if cd.verdict is Verdict.TERMINATED and not sn <= 10 * k * math.log(G.n / k):
            fail("conditional-terminated", tag)
        if chordal:
            report.tick("decomposable-iff")
            if (md.verdict is Verdict.TERMINATED) != (sn <= k):
                fail("decomposable-iff", f"{tag} verdict {md.verdict}")
        for t in md.trace:
            if t.event == "split":
                report.tick("marginal-separates")
                if not _pairwise_separated(G, t.separator, t.children):
                    fail("marginal-separates", f"{tag} S={t.separator}")
        for t in cd.trace:
            if t.event == "split":
                report.tick("conditional-separates")
                if not _pairwise_separated(G, t.conditioning + t.separator, t.children):
                    fail("conditional-separates", f"{tag} S={t.conditioning + t.separator}")


def run_verify(n_max: int = 12, trials: int = 50, seed: int = 0, ks=(1, 2, 3), m: int = 24,
               families=None, inject_unfaithful: bool = False, n_min: int = 6) -> VerifyReport:
    """Guarantee suite over random graphs with ``n_min <= n <= n_max``.

    Instances whose Σ fails the faithfulness check (at order ``max(ks)``) are
    listed as precondition failures and excluded from the guarantee checks.
    """
    if n_max > 12:
        raise ValueError("exact separation numbers are limited to n <= 12")
    families = families or list(VERIFY_FAMILIES)
    report = VerifyReport()
    tau = max(ks)
    for f_idx, fam in enumerate(families):
        for t in range(trials):
            rng = stream(seed, "graph", f_idx, t)
            n = int(rng.integers(max(n_min, 3), n_max + 1))
            G = VERIFY_FAMILIES[fam](n, rng)
            Sigma = synthesize(G, stream(seed, "precision", f_idx, t))
            report.instances += 1
            faith = _faithful(Sigma, G, tau)
            if not faith.passed:
                report.precondition_failures.append({"family": fam, "trial": t, "n": G.n,
                                                     "witnesses": faith.violations[:3]})
                continue
            sn = exact_separation_number(G)
            check_instance(G, Sigma, sn, ks, m, seed * 1000 + t, fam, report)
    if inject_unfaithful:
        G = path_graph(3)
        report.instances += 1
        faith = _faithful(np.eye(3), G, tau)
        if not faith.passed:
            report.precondition_failures.append({"family": "injected", "trial": 0, "n": 3,
                                                 "witnesses": faith.violations[:3]})
        else:
            check_instance(G, np.eye(3), exact_separation_number(G), ks, m, 0, "injected", report)
    return report
