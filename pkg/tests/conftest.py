from __future__ import annotations

import numpy as np
import pytest

from cclt import ScoreMatrix

# One line per acceptance criterion, echoed after the run (see the
# pytest_terminal_summary hook below).
acceptance_lines: list[str] = []


def pytest_terminal_summary(terminalreporter):
    failed = [
        rep.nodeid.split("::")[-1]
        for rep in terminalreporter.stats.get("failed", [])
        if "test_acceptance" in rep.nodeid
    ]
    if not acceptance_lines and not failed:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for line in acceptance_lines:
        terminalreporter.write_line(line)
    for name in failed:
        terminalreporter.write_line(f"ACCEPTANCE {name}: FAIL (see failure detail above)")


def rand_matrix(rng: np.random.Generator, n: int, scale: float = 1.0) -> ScoreMatrix:
    return ScoreMatrix(scale * rng.standard_normal((n, n)))


def rand_complex_entries(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.uniform(-1.0, 1.0, (n, n)) + 1j * rng.uniform(-1.0, 1.0, (n, n))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260808)


@pytest.fixture
def two_by_two() -> ScoreMatrix:
    return ScoreMatrix([[1.0, -1.0], [-1.0, 1.0]])
