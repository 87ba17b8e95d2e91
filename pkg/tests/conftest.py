from pathlib import Path

import pytest

from set2seu import parse_bench

DATA = Path(__file__).parent / "data"


def load(name: str, exclude=()):
    return parse_bench((DATA / name).read_text(), exclude=exclude)


@pytest.fixture
def cone_chain():
    return load("cone_chain.bench")


@pytest.fixture
def fanout_demo():
    return load("fanout_demo.bench")


@pytest.fixture
def divergent():
    return load("divergent.bench")


@pytest.fixture
def divergent3():
    return load("divergent3.bench")


@pytest.fixture
def reconv():
    return load("reconv.bench")


@pytest.fixture
def wire():
    return load("wire.bench")


@pytest.fixture
def b01ish():
    return load("b01ish.bench")
