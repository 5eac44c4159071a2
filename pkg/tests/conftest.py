import sys
from functools import lru_cache
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

from adaptive_ocdma.allocation import build_codebooks  # noqa: E402
from adaptive_ocdma.design import SearchBounds, rate_optimize_brute, rate_optimize_heuristic  # noqa: E402

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

DEFAULT_BOUNDS = SearchBounds(4000, 100, 5)


# brute-force designs take a few seconds each; share them across test modules
@lru_cache(maxsize=None)
def brute(N, pe_th, M=1):
    return rate_optimize_brute(N, M, pe_th, DEFAULT_BOUNDS)


@lru_cache(maxsize=None)
def heuristic(N, pe_th, M=1):
    return rate_optimize_heuristic(N, M, pe_th)


@lru_cache(maxsize=None)
def table(mode, pe_th, N=60, M=1):
    return build_codebooks(mode, N, M, pe_th)


@pytest.fixture(scope="session")
def designs():
    return brute, heuristic


@pytest.fixture(scope="session")
def tables():
    return table


# one line per acceptance criterion, echoed after the run
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
