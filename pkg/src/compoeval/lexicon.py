"""POS-, subcategory- and number-tagged English vocabulary.

The lexicon backs the synthetic sentence templates: nouns carry a
subcategory (people, elite, vehicle, quantity) and a number, verbs exist
as singular/plural inflection pairs, and closed-class words (adverbs,
prepositions, pronouns) are number-invariant.  The store is read-only
after loading, so concurrent readers need no locking.
"""

from __future__ import annotations

import importlib.resources
from dataclasses import dataclass
from pathlib import Path

from .errors import IncompleteParadigmError, UnknownLexicalClassError, ValidationError

POS_TAGS = ("N", "V", "Adv", "P", "Pro")
NUMBERS = ("singular", "plural", "invariant")

SINGULAR = "singular"
PLURAL = "plural"
INVARIANT = "invariant"

# 3rd-person singular present inflection: exceptions first, then the rule.
_INFLECT_EXCEPTIONS = {"have": "has", "be": "is"}
_SIBILANT_ENDINGS = ("s", "x", "z", "ch", "sh", "o")
_VOWELS = "aeiou"


def inflect_third_singular(lemma: str) -> str:
    """3rd-person singular present form of an English verb lemma."""
    if lemma in _INFLECT_EXCEPTIONS:
        return _INFLECT_EXCEPTIONS[lemma]
    if lemma.endswith("y") and len(lemma) > 1 and lemma[-2] not in _VOWELS:
        return lemma[:-1] + "ies"
    if lemma.endswith(_SIBILANT_ENDINGS):
        return lemma + "es"
    return lemma + "s"


@dataclass(frozen=True)
class LexiconEntry:
    surface: str
    pos: str
    subcategory: str
    number: str


class Lexicon:
    """Immutable vocabulary indexed by (pos, subcategory, number)."""

    def __init__(self, entries: list[LexiconEntry]):
        self.entries = tuple(entries)
        self._by_class: dict[tuple[str, str, str], list[str]] = {}
        self._surfaces: dict[tuple[str, str], set[str]] = {}
        for e in entries:
            key = (e.pos, e.subcategory, e.number)
            bucket = self._by_class.setdefault(key, [])
            if e.surface in bucket:
                raise ValidationError(
                    f"duplicate surface {e.surface!r} for class {key}"
                )
            bucket.append(e.surface)
            self._surfaces.setdefault((e.pos, e.number), set()).add(e.surface)
        for bucket in self._by_class.values():
            bucket.sort()
        self._validate()

    def _validate(self):
        # Noun classes used with a free number need both inflections;
        # quantity nouns are singular-only by design (template 5).
        for subcat in ("people", "elite", "vehicle"):
            n_sg = len(self._by_class.get(("N", subcat, SINGULAR), []))
            n_pl = len(self._by_class.get(("N", subcat, PLURAL), []))
            if n_sg != n_pl:
                raise ValidationError(
                    f"noun class {subcat!r} has {n_sg} singular but "
                    f"{n_pl} plural surfaces; paradigms must be complete"
                )
        if self._by_class.get(("N", "quantity", PLURAL)):
            raise ValidationError("quantity nouns must be singular only")
        # Every plural verb (the lemma) must have its inflected singular.
        for (pos, subcat, number), surfaces in list(self._by_class.items()):
            if pos != "V" or number != PLURAL:
                continue
            singulars = set(self._by_class.get(("V", subcat, SINGULAR), []))
            for lemma in surfaces:
                if inflect_third_singular(lemma) not in singulars:
                    raise IncompleteParadigmError(
                        f"incomplete paradigm: verb {lemma!r} ({subcat}) "
                        f"has no singular form in the lexicon"
                    )

    def lookup(self, pos: str, subcategory: str, number: str) -> list[str]:
        """All surfaces of a lexical class, in lexicographic order."""
        key = (pos, subcategory, number)
        if key not in self._by_class:
            raise UnknownLexicalClassError(
                f"unknown lexical class: pos={pos!r} subcategory={subcategory!r} "
                f"number={number!r}"
            )
        return list(self._by_class[key])

    def has_class(self, pos: str, subcategory: str, number: str) -> bool:
        return (pos, subcategory, number) in self._by_class

    def agree(self, subject_number: str, verb_lemma: str) -> str:
        """Verb surface agreeing with a subject number.

        The lemma is the plural form (regular English present tense); the
        singular is derived by rule and checked against the store.
        """
        if subject_number == PLURAL:
            surface = verb_lemma
        elif subject_number == SINGULAR:
            surface = inflect_third_singular(verb_lemma)
        else:
            raise ValidationError(f"not a subject number: {subject_number!r}")
        if surface not in self._surfaces.get(("V", subject_number), set()):
            raise IncompleteParadigmError(
                f"incomplete paradigm: no {subject_number} form of "
                f"{verb_lemma!r} in the lexicon"
            )
        return surface

    def number_of(self, pos: str, subcategory: str, surface: str) -> str:
        """Number of a surface within a class (for re-checking agreement)."""
        for number in NUMBERS:
            if surface in self._by_class.get((pos, subcategory, number), []):
                return number
        raise UnknownLexicalClassError(
            f"surface {surface!r} not found under pos={pos!r} "
            f"subcategory={subcategory!r}"
        )


def parse_lexicon(lines) -> Lexicon:
    entries = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].rstrip("\n").strip()
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) != 4:
            raise ValidationError(
                f"lexicon line {lineno}: expected 4 tab-separated columns, "
                f"got {len(parts)}"
            )
        surface, pos, subcat, number = (p.strip() for p in parts)
        if pos not in POS_TAGS:
            raise ValidationError(f"lexicon line {lineno}: unknown POS {pos!r}")
        if number not in NUMBERS:
            raise ValidationError(f"lexicon line {lineno}: unknown number {number!r}")
        entries.append(LexiconEntry(surface, pos, subcat, number))
    return Lexicon(entries)


def load_lexicon(path: str | Path | None = None) -> Lexicon:
    """Load a lexicon file, or the shipped default when no path is given."""
    if path is None:
        ref = importlib.resources.files("compoeval.data") / "lexicon.tsv"
        return parse_lexicon(ref.read_text(encoding="utf-8").splitlines())
    return parse_lexicon(Path(path).read_text(encoding="utf-8").splitlines())
