from __future__ import annotations

from pathlib import Path

import pytest

from classcomments.features import Featurizer, load_pattern_library
from classcomments.learners import Algorithm, train_multilabel
from classcomments.synthetic import generate_synthetic
from classcomments.taxonomy import load_taxonomy

TESTS_DIR = Path(__file__).parent
FIXTURES = TESTS_DIR / "fixtures"
DATA = TESTS_DIR / "data"


@pytest.fixture(scope="session")
def taxonomy():
    return load_taxonomy()


@pytest.fixture(scope="session")
def library():
    return load_pattern_library()


@pytest.fixture(scope="session")
def synthetic_corpus(taxonomy):
    """The benchmark corpus: 200 comments per category, 10% noise, seed 7."""
    return generate_synthetic(200, 0.1, 7, taxonomy)


@pytest.fixture(scope="session")
def small_corpus(taxonomy):
    return generate_synthetic(20, 0.1, 3, taxonomy)


@pytest.fixture(scope="session")
def forest_model(synthetic_corpus, taxonomy, library):
    """Default forest trained on the benchmark corpus with seed 42."""
    return train_multilabel(synthetic_corpus, taxonomy, Algorithm.FOREST, 42, Featurizer(library))


ACCEPTANCE = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[ACCEPTANCE] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE, {})
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(lines):
        terminalreporter.write_line(lines[number])
