import functools
import pathlib

import pytest

from polartree.grammar import load_grammar, load_lexicon

ROOT = pathlib.Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"


@functools.lru_cache(maxsize=None)
def fixture_pair(name: str):
    grammar = load_grammar(FIXTURES / name / "grammar.json")
    lexicon = load_lexicon(FIXTURES / name / "lexicon.json", grammar.signature)
    return grammar, lexicon


@pytest.fixture
def clitic():
    return fixture_pair("clitic")


@pytest.fixture
def contraction():
    return fixture_pair("contraction")


@pytest.fixture
def negation():
    return fixture_pair("negation")


@pytest.fixture
def island():
    return fixture_pair("island")


@pytest.fixture
def freeorder():
    return fixture_pair("freeorder")


@pytest.fixture
def cliticpair():
    return fixture_pair("cliticpair")


@pytest.fixture
def noncontig():
    return fixture_pair("noncontig")
