import functools

import numpy as np
import pytest

from planarcc.census import CensusOptions, run_census

_ACCEPTANCE: list[str] = []


@functools.lru_cache(maxsize=None)
def cached_census(masses: tuple, seed: int = 0, workers: int = 1):
    return run_census(list(masses), CensusOptions(seed=seed, workers=workers))


def random_masses(n: int, count: int, seed: int) -> list[tuple]:
    rng = np.random.default_rng([seed, n])
    return [tuple(float(v) for v in rng.uniform(0.1, 1.0, n)) for _ in range(count)]


@pytest.fixture
def acceptance_line():
    def record(text: str) -> None:
        _ACCEPTANCE.append(text)
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
