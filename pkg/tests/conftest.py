import pytest

from compoeval.bridge import MockDictionary
from compoeval.lexicon import load_lexicon, parse_lexicon
from compoeval.suites import SuiteBuilder
from compoeval.templates import TemplateSet, parse_template_line
from compoeval.treegen import SemiNaturalGenerator


@pytest.fixture(scope="session")
def lexicon():
    return load_lexicon()


@pytest.fixture(scope="session")
def templates(lexicon):
    return TemplateSet(lexicon)


@pytest.fixture(scope="session")
def semi(lexicon):
    return SemiNaturalGenerator(lexicon)


@pytest.fixture(scope="session")
def builder(templates, semi):
    return SuiteBuilder(templates, semi_natural=semi)


@pytest.fixture(scope="session")
def mock_dict():
    return MockDictionary()


TINY_LEXICON_LINES = [
    "poet\tN\tpeople\tsingular",
    "poets\tN\tpeople\tplural",
    "child\tN\tpeople\tsingular",
    "children\tN\tpeople\tplural",
    "criticises\tV\ttransitive\tsingular",
    "criticise\tV\ttransitive\tplural",
    "king\tN\telite\tsingular",
    "kings\tN\telite\tplural",
    "queen\tN\telite\tsingular",
    "queens\tN\telite\tplural",
]


@pytest.fixture()
def tiny_templates():
    """Template 1 over a 2-noun/1-verb/2-elite lexicon: 8 bindings."""
    lex = parse_lexicon(TINY_LEXICON_LINES)
    t1 = parse_template_line("1\tThe [N:people]@subj [V:transitive] the [N:elite:sg]@obj .")
    return TemplateSet(lex, {1: t1})
