"""Synthesis of covariance matrices in M(G), faithfulness checks and sample generators."""

from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import stats

from .exact import components_without
from .graphs import Graph, _rng
from .linalg import RANK_RTOL, batched_rank, spd_inverse

SIGMA_BIN = "sigma.bin"
SIGMA_META = "sigma.json"
GRAPH_FILE = "graph.json"


def default_jitter(n: int) -> float:
    """Width of the random diagonal surplus; shrinks with n so correlations stay long-ranged."""
    return min(1.0, 10.0 / max(n, 1))


def precision_from_graph(G: Graph, seed=None, edge_range=(0.2, 1.0),
                         diag_boost: float = 1.0, jitter: float | None = None) -> np.ndarray:
    """Random precision matrix supported on the edges of ``G``.

    Off-diagonal entries on edges are uniform in ``±[lo, hi]``. The diagonal is
    ``diag_boost`` times the absolute row sum plus ``uniform(0, jitter)``, which
    makes ``K`` strictly diagonally dominant and hence SPD. ``jitter`` defaults
    to :func:`default_jitter`, i.e. 1 for graphs with at most 10 vertices.
    """
    lo, hi = edge_range
    if not 0 <= lo <= hi:
        raise ValueError("edge_range must satisfy 0 <= lo <= hi")
    if diag_boost < 1:
        raise ValueError("diag_boost must be >= 1")
    rng = _rng(seed)
    jitter = default_jitter(G.n) if jitter is None else float(jitter)
    if jitter <= 0:
        raise ValueError("jitter must be positive")
    K = np.zeros((G.n, G.n))
    edges = G.sorted_edges()
    if edges:
        u, v = np.array(edges).T
        mag = rng.uniform(lo, hi, size=len(edges))
        sign = rng.choice([-1.0, 1.0], size=len(edges))
        K[u, v] = K[v, u] = mag * sign
    K[np.diag_indices(G.n)] = diag_boost * np.abs(K).sum(axis=1) + rng.uniform(0, jitter, size=G.n)
    return K


def covariance_from_precision(K: np.ndarray) -> np.ndarray:
    return spd_inverse(K)


def synthesize(G: Graph, seed=None, **kwargs) -> np.ndarray:
    """Covariance ``Σ = K^{-1}`` for a fresh :func:`precision_from_graph` draw."""
    return covariance_from_precision(precision_from_graph(G, seed, **kwargs))


# faithfulness ---------------------------------------------------------------

@dataclass
class FaithfulnessReport:
    tau: int
    kind: str
    checked: int = 0
    violations: list = field(default_factory=list)
    num_violations: int = 0

    @property
    def passed(self) -> bool:
        return self.num_violations == 0

    def to_dict(self) -> dict:
        return {"kind": self.kind, "tau": self.tau, "checked": self.checked,
                "passed": self.passed, "num_violations": self.num_violations,
                "violations": self.violations}


MAX_WITNESSES = 20


def _labels_without(G: Graph, S) -> np.ndarray:
    lab = np.full(G.n, -1)
    for c, block in enumerate(components_without(G, S)):
        lab[block] = c
    return lab


def verify_tau_faithfulness(Sigma: np.ndarray, G: Graph, tau: int,
                            rank_tol: float = RANK_RTOL, budget: int = 2_000_000) -> FaithfulnessReport:
    """Check ``rank(Σ_{iS, jS}) == |S|`` iff ``S`` separates ``i, j``, for all ``|S| <= tau``."""
    Sigma = np.asarray(Sigma, dtype=float)
    n = G.n
    if Sigma.shape != (n, n):
        raise ValueError("Sigma and G disagree on n")
    n_sets = sum(len(list(itertools.combinations(range(n), s))) for s in range(min(tau, n) + 1))
    if n_sets * n * n // 2 > budget:
        raise ValueError("faithfulness check exceeds its enumeration budget")
    report = FaithfulnessReport(tau, "tau")
    for s in range(min(tau, n - 2) + 1):
        for S in itertools.combinations(range(n), s):
            lab = _labels_without(G, S)
            rest = np.flatnonzero(lab >= 0)
            if rest.size < 2:
                continue
            I, J = np.triu_indices(rest.size, 1)
            I, J = rest[I], rest[J]
            Sarr = np.array(S, dtype=int)
            rows = np.column_stack([I, np.broadcast_to(Sarr, (I.size, s))])
            cols = np.column_stack([J, np.broadcast_to(Sarr, (J.size, s))])
            ranks = batched_rank(Sigma[rows[:, :, None], cols[:, None, :]], rank_tol)
            separated = lab[I] != lab[J]
            bad = np.flatnonzero((ranks == s) != separated)
            report.checked += I.size
            report.num_violations += bad.size
            for b in bad[: MAX_WITNESSES - len(report.violations)]:
                report.violations.append({"i": int(I[b]), "j": int(J[b]), "S": list(S),
                                          "rank": int(ranks[b]), "separated": bool(separated[b])})
    return report


STRONG_MAX_N = 10


def _disjoint_pairs(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """All unordered pairs of disjoint non-empty subsets, as a digit table (0 none, 1 A, 2 A')."""
    codes = np.arange(3 ** n)
    digits = (codes[:, None] // 3 ** np.arange(n)[None, :]) % 3
    in_a, in_b = digits == 1, digits == 2
    ok = in_a.any(1) & in_b.any(1)
    # canonical orientation: the lowest used vertex belongs to A
    used = digits > 0
    first = np.argmax(used, axis=1)
    ok &= digits[np.arange(len(codes)), first] == 1
    digits = digits[ok]
    w = 1 << np.arange(n, dtype=np.int64)
    return digits, (digits == 1) @ w, (digits == 2) @ w


def separator_sizes(G: Graph, amask: np.ndarray, bmask: np.ndarray, cap: int) -> np.ndarray:
    """Minimum separator size of each (A, A') pair given as bitmasks; values above ``cap`` read ``cap + 1``.

    Enumerates candidate separators directly, independently of the max-flow oracle.
    """
    sep = np.full(amask.shape, cap + 1)
    for s in range(cap + 1):
        todo = sep > s
        if not todo.any():
            break
        a, b = amask[todo], bmask[todo]
        hit = np.zeros(a.shape, dtype=bool)
        for S in itertools.combinations(range(G.n), s):
            comps = components_without(G, S)
            cm = np.array([sum(1 << v for v in c) for c in comps], dtype=np.int64)
            cross = ((a[:, None] & cm[None, :]) != 0) & ((b[:, None] & cm[None, :]) != 0)
            hit |= ~cross.any(axis=1)
        idx = np.flatnonzero(todo)[hit]
        sep[idx] = s
    return sep


def verify_strong_faithfulness(Sigma: np.ndarray, G: Graph, tau: int,
                               rank_tol: float = RANK_RTOL) -> FaithfulnessReport:
    """Check ``rank(Σ_{A,A'})`` equals the minimum ``A``-``A'`` separator size whenever either is ``<= tau``.

    Since the rank never exceeds the separator size, this is the condition
    triggered by ``rank <= tau``. All disjoint non-empty ``A, A'`` are enumerated,
    so ``n`` is limited to 10.
    """
    Sigma = np.asarray(Sigma, dtype=float)
    n = G.n
    if n > STRONG_MAX_N:
        raise ValueError(f"strong faithfulness enumeration is limited to n <= {STRONG_MAX_N}")
    if Sigma.shape != (n, n):
        raise ValueError("Sigma and G disagree on n")
    report = FaithfulnessReport(tau, "strong")
    if n < 2:
        return report
    digits, amask, bmask = _disjoint_pairs(n)
    sep = separator_sizes(G, amask, bmask, tau)
    ranks = np.empty(len(digits), dtype=int)
    na, nb = (digits == 1).sum(1), (digits == 2).sum(1)
    for p, q in {(int(x), int(y)) for x, y in zip(na, nb)}:
        sel = np.flatnonzero((na == p) & (nb == q))
        rows = np.nonzero(digits[sel] == 1)[1].reshape(-1, p)
        cols = np.nonzero(digits[sel] == 2)[1].reshape(-1, q)
        ranks[sel] = batched_rank(Sigma[rows[:, :, None], cols[:, None, :]], rank_tol)
    relevant = (ranks <= tau) | (sep <= tau)
    bad = np.flatnonzero(relevant & (ranks != sep))
    report.checked = int(relevant.sum())
    report.num_violations = int(bad.size)
    for b in bad[:MAX_WITNESSES]:
        report.violations.append({
            "A": np.flatnonzero(digits[b] == 1).tolist(), "A_prime": np.flatnonzero(digits[b] == 2).tolist(),
            "rank": int(ranks[b]), "separator": int(sep[b]) if sep[b] <= tau else f">{tau}"})
    return report


def synthesize_faithful(G: Graph, seed: int, tau: int, retries: int = 3, strong: bool = True, **kwargs):
    """Draw Σ for ``G``, re-drawing with derived seeds until the faithfulness check passes.

    Returns ``(Sigma, report, attempts)``; the last report is returned even if
    every attempt failed, so callers can log rather than silently accept.
    """
    check = verify_strong_faithfulness if strong else verify_tau_faithfulness
    ss = np.random.SeedSequence(int(seed))
    for attempt in range(1, retries + 1):
        rng = np.random.default_rng(ss.spawn(1)[0]) if attempt > 1 else np.random.default_rng(ss)
        Sigma = synthesize(G, rng, **kwargs)
        report = check(Sigma, G, tau)
        if report.passed:
            break
    return Sigma, report, attempt


# non-Gaussian data ----------------------------------------------------------

def kendall_sigma(data: np.ndarray, i: int, j: int) -> float:
    """Sine-transformed Kendall tau, ``sin(pi/2 * tau)``, between columns ``i`` and ``j``."""
    data = np.asarray(data)
    if data.shape[0] < 2:
        raise ValueError("need at least two samples")
    if i == j:
        if np.ptp(data[:, i]) == 0:
            raise ValueError(f"column {i} is constant; Kendall tau is undefined")
        return 1.0
    x, y = data[:, i], data[:, j]
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        raise ValueError("constant column; Kendall tau is undefined")
    tau = stats.kendalltau(x, y).statistic
    return float(np.clip(np.sin(np.pi / 2 * tau), -1.0, 1.0))


TRANSFORMS = {
    "identity": lambda z: z,
    "exp": np.exp,
    "cube": lambda z: z ** 3,
    "logistic": lambda z: 1.0 / (1.0 + np.exp(-z)),
}


def gaussian_samples(Sigma: np.ndarray, size: int, seed=None) -> np.ndarray:
    rng = _rng(seed)
    return rng.multivariate_normal(np.zeros(len(Sigma)), Sigma, size=size, method="cholesky")


def nonparanormal_samples(Sigma: np.ndarray, size: int, seed=None):
    """Gaussian samples pushed through a random monotone map per coordinate.

    Returns ``(X, names)`` where ``names[i]`` is the transform applied to column ``i``.
    """
    rng = _rng(seed)
    Z = gaussian_samples(Sigma, size, rng)
    names = [str(x) for x in rng.choice(sorted(TRANSFORMS), size=Z.shape[1])]
    X = np.column_stack([TRANSFORMS[f](Z[:, c]) for c, f in enumerate(names)])
    return X, names


def ising_tree_samples(G: Graph, size: int, seed=None, rho_range=(0.8, 0.95)) -> np.ndarray:
    """±1 samples of a zero-field Ising model on a forest.

    Each root is a fair coin; each child copies its parent with probability
    ``(1 + rho_e) / 2`` for an edge correlation ``rho_e`` drawn from ``rho_range``.
    """
    if G.num_edges != G.n - len(components_without(G, [])):
        raise ValueError("Ising sampler needs a forest")
    rng = _rng(seed)
    X = np.zeros((size, G.n), dtype=np.int8)
    seen = [False] * G.n
    for root in range(G.n):
        if seen[root]:
            continue
        seen[root] = True
        X[:, root] = rng.choice(np.array([-1, 1], dtype=np.int8), size=size)
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v in sorted(G.adj[u]):
                if seen[v]:
                    continue
                seen[v] = True
                rho = rng.uniform(*rho_range)
                flip = rng.random(size) < (1 - rho) / 2
                X[:, v] = np.where(flip, -X[:, u], X[:, u])
                queue.append(v)
    return X


# persistence ----------------------------------------------------------------

def save_instance(out_dir, G: Graph, Sigma: np.ndarray, seed: int) -> Path:
    """Write ``graph.json``, ``sigma.bin`` (row-major little-endian float64) and ``sigma.json``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    G.save(out / GRAPH_FILE)
    np.ascontiguousarray(Sigma, dtype="<f8").tofile(out / SIGMA_BIN)
    meta = {"n": int(G.n), "graph_file": GRAPH_FILE, "seed": int(seed)}
    (out / SIGMA_META).write_text(json.dumps(meta))
    return out


def read_sidecar(in_dir) -> dict:
    meta = json.loads((Path(in_dir) / SIGMA_META).read_text())
    if "n" not in meta:
        raise ValueError("sidecar lacks 'n'")
    return meta


def load_graph(in_dir) -> Graph:
    meta = read_sidecar(in_dir)
    return Graph.load(Path(in_dir) / meta.get("graph_file", GRAPH_FILE))


def load_sigma(in_dir) -> np.ndarray:
    """Read the whole matrix (for verification; testers use the file-backed oracle)."""
    n = read_sidecar(in_dir)["n"]
    data = np.fromfile(Path(in_dir) / SIGMA_BIN, dtype="<f8")
    if data.size != n * n:
        raise ValueError(f"{SIGMA_BIN} holds {data.size} values, expected {n * n}")
    return data.reshape(n, n)
