import numpy as np
import pytest

from sepscan.graphs import Graph
from sepscan.oracle import CovarianceOracle
from sepscan.synth import synthesize

_CRITERIA: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def record_criterion():
    """Record an acceptance criterion's outcome; printed as one line per criterion at the end."""
    def record(number: int, passed: bool, detail: str):
        _CRITERIA[number] = (bool(passed), detail)
        print(f"criterion {number}: {'PASS' if passed else 'FAIL'} {detail}")
    return record


def pytest_collection_modifyitems(items):
    # acceptance last, and its Components-bound check after everything else
    def key(item):
        if item.module.__name__ != "test_acceptance":
            return 0
        return 2 if "criterion_3" in item.name else 1
    items.sort(key=key)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        passed, detail = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")


def random_spd(rng: np.random.Generator, n: int) -> np.ndarray:
    A = rng.standard_normal((n, n))
    return A @ A.T + n * np.eye(n)


def oracle_for(G: Graph, seed: int = 0) -> tuple[np.ndarray, CovarianceOracle]:
    Sigma = synthesize(G, seed)
    return Sigma, CovarianceOracle.from_array(Sigma)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
