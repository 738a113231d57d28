from functools import lru_cache

import pytest

from ainfty.corpus import CORPUS, corpus_dga
from ainfty.hodge import build_hodge


@lru_cache(maxsize=None)
def cached_dga(name):
    return corpus_dga(name)


@lru_cache(maxsize=None)
def cached_hodge(name):
    return build_hodge(cached_dga(name))


@pytest.fixture
def heisenberg():
    return cached_dga("heisenberg")


@pytest.fixture
def heisenberg_hodge():
    return cached_hodge("heisenberg")


@pytest.fixture
def interval():
    return cached_dga("interval")


@pytest.fixture
def interval_hodge():
    return cached_hodge("interval")


@pytest.fixture(params=list(CORPUS))
def corpus_name(request):
    return request.param


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
