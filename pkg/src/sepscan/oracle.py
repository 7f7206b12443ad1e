"""Entry-level access to Σ with distinct-entry accounting.

Every tester reads covariance entries only through a :class:`CovarianceOracle`;
its :class:`QueryLedger` is the single source of truth for query counts.
"""

from __future__ import annotations

import os
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import linalg as sla

from .linalg import ZERO_RTOL, NotPositiveDefiniteError, as_index, cholesky
from .synth import SIGMA_BIN, kendall_sigma, read_sidecar


class QueryLedger:
    """Set of queried unordered pairs ``{i, j}`` (diagonal included)."""

    def __init__(self, n: int):
        self.n = n
        self._seen = np.zeros((n, n), dtype=bool)
        self.count = 0

    def record(self, I, J) -> int:
        """Record pairs ``(I[t], J[t])``; returns how many were new."""
        I = np.asarray(I, dtype=np.intp).ravel()
        J = np.asarray(J, dtype=np.intp).ravel()
        lo, hi = np.minimum(I, J), np.maximum(I, J)
        flat = np.unique(lo * self.n + hi)
        new = flat[~self._seen.flat[flat]]
        self._seen.flat[new] = True
        self.count += int(new.size)
        return int(new.size)

    def __contains__(self, pair) -> bool:
        i, j = pair
        return bool(self._seen[min(i, j), max(i, j)])

    def pairs(self) -> set[tuple[int, int]]:
        return {(int(i), int(j)) for i, j in zip(*np.nonzero(self._seen))}


# backends -------------------------------------------------------------------

class ArrayBackend:
    def __init__(self, Sigma: np.ndarray):
        self.Sigma = np.asarray(Sigma, dtype=float)
        if self.Sigma.ndim != 2 or self.Sigma.shape[0] != self.Sigma.shape[1]:
            raise ValueError("Sigma must be square")
        self.n = self.Sigma.shape[0]

    def entries(self, I: np.ndarray, J: np.ndarray) -> np.ndarray:
        return self.Sigma[I, J]


class FileBackend:
    """Reads single entries from the row-major float64 file with positioned reads."""

    def __init__(self, in_dir):
        self.path = Path(in_dir) / SIGMA_BIN
        self.n = int(read_sidecar(in_dir)["n"])
        size = self.path.stat().st_size
        if size != 8 * self.n * self.n:
            raise ValueError(f"{self.path} has {size} bytes, expected {8 * self.n * self.n}")
        self._fd = os.open(self.path, os.O_RDONLY)

    def entries(self, I: np.ndarray, J: np.ndarray) -> np.ndarray:
        out = np.empty(len(I))
        for t, (i, j) in enumerate(zip(I.tolist(), J.tolist())):
            raw = os.pread(self._fd, 8, 8 * (i * self.n + j))
            if len(raw) != 8:
                raise OSError(f"short read at entry ({i}, {j})")
            out[t] = np.frombuffer(raw, dtype="<f8")[0]
        return out

    def close(self):
        if self._fd is not None:
            os.close(self._fd)
            self._fd = None

    def __del__(self):
        try:
            self.close()
        except Exception:
            pass


class KendallBackend:
    """Σ estimated entrywise from samples by the sine-transformed Kendall tau."""

    def __init__(self, data: np.ndarray):
        self.data = np.asarray(data, dtype=float)
        if self.data.ndim != 2 or self.data.shape[0] < 2:
            raise ValueError("data must be a (samples, variables) matrix with >= 2 rows")
        self.n = self.data.shape[1]
        self._cache: dict[tuple[int, int], float] = {}

    def entries(self, I: np.ndarray, J: np.ndarray) -> np.ndarray:
        out = np.empty(len(I))
        for t, (i, j) in enumerate(zip(I.tolist(), J.tolist())):
            key = (min(i, j), max(i, j))
            if key not in self._cache:
                self._cache[key] = kendall_sigma(self.data, *key)
            out[t] = self._cache[key]
        return out


class CovarianceOracle:
    """Query access to Σ. ``queries`` is the number of distinct entries read so far."""

    def __init__(self, backend, ledger: QueryLedger | None = None):
        self.backend = backend
        self.n = backend.n
        self.ledger = ledger if ledger is not None else QueryLedger(self.n)

    @classmethod
    def from_array(cls, Sigma: np.ndarray) -> "CovarianceOracle":
        return cls(ArrayBackend(Sigma))

    @classmethod
    def from_dir(cls, in_dir) -> "CovarianceOracle":
        return cls(FileBackend(in_dir))

    @property
    def queries(self) -> int:
        return self.ledger.count

    def query(self, i: int, j: int) -> float:
        return float(self.block([i], [j])[0, 0])

    def block(self, rows: Sequence[int], cols: Sequence[int]) -> np.ndarray:
        r = as_index(rows, self.n)
        c = as_index(cols, self.n)
        if r.size == 0 or c.size == 0:
            return np.zeros((r.size, c.size))
        I, J = np.meshgrid(r, c, indexing="ij")
        lo, hi = np.minimum(I, J).ravel(), np.maximum(I, J).ravel()
        self.ledger.record(lo, hi)
        # fetch each distinct pair once, always as (lo, hi) so values are symmetric
        keys, inverse = np.unique(lo * self.n + hi, return_inverse=True)
        vals = self.backend.entries(keys // self.n, keys % self.n)
        return vals[inverse].reshape(I.shape)

    def diagonal(self, idx: Sequence[int]) -> np.ndarray:
        d = as_index(idx, self.n)
        self.ledger.record(d, d)
        return self.backend.entries(d, d)

    def view(self, conditioning: Sequence[int] = (), zero_tol: float = ZERO_RTOL) -> "CondCovView":
        return CondCovView(self, conditioning, zero_tol)


class CondCovView:
    """Lazy entries of ``Σ^(S̄)`` computed from queries of the underlying oracle.

    ``base`` may itself be a view, in which case this view conditions further.
    Entries are addressed by global vertex ids. A fresh entry ``(i, j)`` costs
    the base entries ``Σ_ij``, ``Σ_{i,S̄}`` and ``Σ_{j,S̄}``, i.e. at most
    ``1 + 2|S̄|`` ledger entries once ``Σ_{S̄,S̄}`` is known.
    """

    def __init__(self, base, conditioning: Sequence[int] = (), zero_tol: float = ZERO_RTOL,
                 _factor: np.ndarray | None = None):
        self.base = base
        self.n = base.n
        self.zero_tol = zero_tol
        S = [int(s) for s in conditioning]
        if len(set(S)) != len(S):
            raise ValueError("conditioning set has duplicates")
        self.S = tuple(S)
        self._S_arr = as_index(S, self.n)
        if _factor is None:
            _factor = cholesky(base.block(S, S)) if S else np.zeros((0, 0))
        self._L = _factor
        self.reads = 0

    @property
    def oracle(self) -> CovarianceOracle:
        b = self.base
        while isinstance(b, CondCovView):
            b = b.base
        return b

    @property
    def conditioning(self) -> tuple[int, ...]:
        """Cumulative conditioning set, including that of nested bases."""
        outer = self.base.conditioning if isinstance(self.base, CondCovView) else ()
        return outer + self.S

    @property
    def queries(self) -> int:
        return self.oracle.queries

    def _solve(self, cols: np.ndarray) -> np.ndarray:
        return sla.solve_triangular(self._L, self.base.block(self.S, cols), lower=True, check_finite=False)

    def block(self, rows: Sequence[int], cols: Sequence[int]) -> np.ndarray:
        r = as_index(rows, self.n)
        c = as_index(cols, self.n)
        self.reads += r.size * c.size
        if self.S and (np.isin(r, self._S_arr).any() or np.isin(c, self._S_arr).any()):
            raise IndexError("entries of a conditioned variable are not defined in the view")
        out = self.base.block(r, c)
        if not self.S or out.size == 0:
            return out
        if r.size == c.size and np.array_equal(r, c):
            X = self._solve(r)
            return out - X.T @ X
        return out - self._solve(r).T @ self._solve(c)

    def entry(self, i: int, j: int) -> float:
        return float(self.block([i], [j])[0, 0])

    def diagonal(self, idx: Sequence[int]) -> np.ndarray:
        d = as_index(idx, self.n)
        self.reads += d.size
        if self.S and np.isin(d, self._S_arr).any():
            raise IndexError("entries of a conditioned variable are not defined in the view")
        out = self.base.diagonal(d)
        if self.S and d.size:
            out = out - (self._solve(d) ** 2).sum(axis=0)
        return out

    def dependent(self, pivot: int, candidates: Sequence[int]) -> np.ndarray:
        """Support test of the pivot's row, relative to the pivot's own variance.

        ``candidates`` should contain ``pivot`` itself, which supplies the scale.
        """
        cand = as_index(candidates, self.n)
        row = self.block([pivot], cand)[0]
        where = np.flatnonzero(cand == pivot)
        scale = row[where[0]] if where.size else self.entry(pivot, pivot)
        if scale <= 0:
            raise NotPositiveDefiniteError(f"non-positive conditional variance at {pivot}")
        dep = np.abs(row) > self.zero_tol * scale
        dep[where] = True
        return dep

    def condition_on(self, extra: Sequence[int]) -> "CondCovView":
        """View with the conditioning set enlarged by ``extra``; reuses the current factor."""
        E = [int(e) for e in extra if int(e) not in self.S]
        if not E:
            return CondCovView(self.base, self.S, self.zero_tol, self._L)
        S = list(self.S)
        if not S:
            return CondCovView(self.base, E, self.zero_tol)
        X = self._solve(as_index(E, self.n))
        C = self.base.block(E, E) - X.T @ X
        L22 = cholesky((C + C.T) / 2)
        k, e = len(S), len(E)
        L = np.zeros((k + e, k + e))
        L[:k, :k] = self._L
        L[k:, :k] = X.T
        L[k:, k:] = L22
        return CondCovView(self.base, S + E, self.zero_tol, L)


# conditional-independence queries --------------------------------------------

class CIOracle:
    """Answers ``ci(i, j, k)``: is ``X_i`` independent of ``X_j`` given ``X_k`` (marginally if ``k`` is None)?

    ``queries`` counts distinct CI statements asked.
    """

    n: int

    def __init__(self, n: int):
        self.n = n
        self._asked: set[tuple[int, int, int]] = set()

    @property
    def queries(self) -> int:
        return len(self._asked)

    def ci(self, i: int, j: int, k: int | None = None) -> bool:
        if i == j:
            raise ValueError("ci needs two distinct variables")
        if k is not None and k in (i, j):
            raise ValueError("conditioning variable must differ from i and j")
        i, j = min(i, j), max(i, j)
        self._asked.add((i, j, -1 if k is None else k))
        return self._ci(i, j, k)

    def _ci(self, i: int, j: int, k: int | None) -> bool:
        raise NotImplementedError

    def view(self, k: int | None = None) -> "CIView":
        return CIView(self, k)


class CovarianceCI(CIOracle):
    """CI statements read off covariance entries (Gaussian case).

    ``X_i ⫫ X_j | X_k`` iff ``Σ_ij Σ_kk − Σ_ik Σ_kj`` vanishes, tested relative
    to the size of the two products; four covariance queries per statement.
    """

    def __init__(self, oracle: CovarianceOracle, rtol: float = 1e-9, atol: float = 0.0):
        super().__init__(oracle.n)
        self.oracle = oracle
        self.rtol = rtol
        self.atol = atol

    def _ci(self, i, j, k):
        q = self.oracle.query
        if k is None:
            sij = q(i, j)
            return abs(sij) <= self.rtol * np.sqrt(q(i, i) * q(j, j)) + self.atol
        a, b = q(i, j) * q(k, k), q(i, k) * q(k, j)
        return abs(a - b) <= self.rtol * max(abs(a), abs(b)) + self.atol


def ci_from_covariance(source, rtol: float = 1e-9, atol: float = 0.0) -> CovarianceCI:
    """CI oracle over a covariance oracle (or a raw matrix, wrapped in a fresh oracle)."""
    if not isinstance(source, CovarianceOracle):
        source = CovarianceOracle.from_array(source)
    return CovarianceCI(source, rtol, atol)


class EmpiricalCI(CIOracle):
    """CI tests on discrete samples: stratify on ``X_k`` and threshold each stratum's correlation.

    A statement is declared independent when every stratum has
    ``|corr| <= z / sqrt(stratum size)``.
    """

    def __init__(self, data: np.ndarray, z: float = 5.0, min_stratum: int = 30):
        data = np.asarray(data)
        if data.ndim != 2:
            raise ValueError("data must be (samples, variables)")
        super().__init__(data.shape[1])
        self.data = data.astype(float)
        self.z = z
        self.min_stratum = min_stratum

    def _indep(self, x: np.ndarray, y: np.ndarray) -> bool:
        if len(x) < self.min_stratum or np.ptp(x) == 0 or np.ptp(y) == 0:
            return True
        r = np.corrcoef(x, y)[0, 1]
        return abs(r) <= self.z / np.sqrt(len(x))

    def _ci(self, i, j, k):
        x, y = self.data[:, i], self.data[:, j]
        if k is None:
            return self._indep(x, y)
        zk = self.data[:, k]
        return all(self._indep(x[zk == v], y[zk == v]) for v in np.unique(zk))


class CIView:
    """Dependence view for Components: ``j`` depends on ``pivot`` iff not ``ci(pivot, j | k)``."""

    def __init__(self, ci: CIOracle, k: int | None = None):
        self.ci_oracle = ci
        self.k = k
        self.n = ci.n
        self.reads = 0

    @property
    def queries(self) -> int:
        return self.ci_oracle.queries

    def dependent(self, pivot: int, candidates: Sequence[int]) -> np.ndarray:
        cand = [int(c) for c in candidates]
        self.reads += len(cand)
        return np.array([c == pivot or not self.ci_oracle.ci(pivot, c, self.k) for c in cand], dtype=bool)
