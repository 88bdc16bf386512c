import pytest

from compoeval.errors import (
    IncompleteParadigmError,
    UnknownLexicalClassError,
    ValidationError,
)
from compoeval.lexicon import (
    Lexicon,
    LexiconEntry,
    inflect_third_singular,
    load_lexicon,
    parse_lexicon,
)


def test_lookup_elite_singular_contains_cited_nouns(lexicon):
    surfaces = lexicon.lookup("N", "elite", "singular")
    for noun in ("king", "queen", "mayor", "leader"):
        assert noun in surfaces


def test_lookup_is_lexicographically_ordered(lexicon):
    surfaces = lexicon.lookup("N", "people", "plural")
    assert surfaces == sorted(surfaces)


def test_lookup_transitive_plural_contains_understand(lexicon):
    assert "understand" in lexicon.lookup("V", "transitive", "plural")


def test_lookup_unknown_class_errors_with_query():
    empty = Lexicon([])
    with pytest.raises(UnknownLexicalClassError) as exc:
        empty.lookup("N", "people", "plural")
    assert "people" in str(exc.value)
    assert "plural" in str(exc.value)


def test_agree_examples(lexicon):
    assert lexicon.agree("singular", "criticise") == "criticises"
    assert lexicon.agree("plural", "criticise") == "criticise"
    assert lexicon.agree("singular", "see") == "sees"


def test_agree_missing_paradigm(lexicon):
    with pytest.raises(IncompleteParadigmError):
        lexicon.agree("singular", "flurble")


def test_inflection_rule_and_exceptions():
    assert inflect_third_singular("cry") == "cries"
    assert inflect_third_singular("watch") == "watches"
    assert inflect_third_singular("pass") == "passes"
    assert inflect_third_singular("go") == "goes"
    assert inflect_third_singular("see") == "sees"
    assert inflect_third_singular("play") == "plays"  # vowel + y
    assert inflect_third_singular("have") == "has"


def test_two_loads_are_identical():
    a = load_lexicon()
    b = load_lexicon()
    assert a.entries == b.entries
    assert a.lookup("N", "elite", "singular") == b.lookup("N", "elite", "singular")


def test_duplicate_surface_in_class_rejected():
    with pytest.raises(ValidationError):
        Lexicon(
            [
                LexiconEntry("king", "N", "elite", "singular"),
                LexiconEntry("king", "N", "elite", "singular"),
            ]
        )


def test_quantity_nouns_are_singular_only():
    with pytest.raises(ValidationError):
        parse_lexicon(["groups\tN\tquantity\tplural"])


def test_noun_paradigm_completeness_enforced():
    with pytest.raises(ValidationError):
        parse_lexicon(["poet\tN\tpeople\tsingular"])  # no plural counterpart


def test_verb_paradigm_completeness_enforced():
    with pytest.raises(IncompleteParadigmError):
        parse_lexicon(["criticise\tV\ttransitive\tplural"])


def test_bad_column_count_reports_line():
    with pytest.raises(ValidationError) as exc:
        parse_lexicon(["king\tN\telite"])
    assert "line 1" in str(exc.value)


def test_number_of(lexicon):
    assert lexicon.number_of("N", "people", "poet") == "singular"
    assert lexicon.number_of("N", "people", "poets") == "plural"
    with pytest.raises(UnknownLexicalClassError):
        lexicon.number_of("N", "people", "king")
