import pytest

from rcprefactor import fixtures


@pytest.fixture
def bsc():
    return fixtures.bsc(0.11, rate=0.3)


@pytest.fixture
def bec():
    return fixtures.bec(0.5, rate=0.15)


@pytest.fixture
def mism():
    return fixtures.mismatched_2x3(rate=0.1)


@pytest.fixture
def noiseless():
    return fixtures.noiseless_binary(rate=0.3)


def all_fixtures():
    return {
        "bsc": fixtures.bsc(0.11, rate=0.3),
        "bec": fixtures.bec(0.5, rate=0.15),
        "mismatched": fixtures.mismatched_2x3(rate=0.1),
    }
