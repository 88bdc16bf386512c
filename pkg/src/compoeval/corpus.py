"""Sentence-aligned parallel corpus: exact-match search, unigram
frequencies, literal-translation rates and length/frequency-matched
sampling for natural test data.

Tokenization separates . , ? ! " ' as standalone tokens and splits on
whitespace; frequencies are computed over lowercased source tokens,
exact-match search is case-preserving.  The index is built once by a
single writer; afterwards everything is read-only.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass
from itertools import zip_longest
from pathlib import Path

from .errors import ValidationError
from .textutil import seeded_sample, tokenize

# Idiom admission thresholds: frequent enough to be acquirable, and
# dominantly non-literal in the references.  A literal rate of exactly
# 0.2 (e.g. 1 in 5) still passes.
MIN_IDIOM_OCCURRENCES = 200
MAX_LITERAL_RATE = 0.2

# Function words excluded from frequency profiles.
_STOPWORDS = frozenset(
    """a an the of to in on at for with by from and or that this these those
    is are was were be been has have had do does did will would can could
    it its he she they we you i his her their our your as not no""".split()
)

DEFAULT_LENGTH_TOL = 3
DEFAULT_FREQ_TOL = 0.5


@dataclass(frozen=True)
class FrequencyProfile:
    """Length and mean log-frequency of a sentence's content tokens."""

    length: int
    mean_log_freq: float


class ParallelCorpus:
    def __init__(self, records: list[tuple[str, str]]):
        self.records = records
        self._src_tokens = [tokenize(src) for src, _ in records]
        self._tgt_tokens = [tokenize(tgt) for _, tgt in records]
        self.frequencies: Counter = Counter()
        self._index: dict[str, list[int]] = {}
        for rid, tokens in enumerate(self._src_tokens):
            for tok in set(tokens):
                self._index.setdefault(tok, []).append(rid)
            self.frequencies.update(t.lower() for t in tokens)

    def __len__(self):
        return len(self.records)

    def source_tokens(self, rid: int) -> list[str]:
        return list(self._src_tokens[rid])

    def find_exact(self, phrase) -> list[int]:
        """Record ids whose source contains the phrase contiguously."""
        tokens = tokenize(phrase) if isinstance(phrase, str) else list(phrase)
        if not tokens:
            raise ValidationError("phrase must be nonempty")
        candidates = None
        for tok in set(tokens):
            postings = self._index.get(tok)
            if postings is None:
                return []
            ids = set(postings)
            candidates = ids if candidates is None else candidates & ids
        hits = []
        for rid in sorted(candidates):
            if _contains(self._src_tokens[rid], tokens):
                hits.append(rid)
        return hits

    def log_frequency(self, token: str) -> float:
        """Natural-log frequency with add-one smoothing."""
        return math.log(self.frequencies[token.lower()] + 1)

    def profile(self, sentence) -> FrequencyProfile:
        tokens = tokenize(sentence) if isinstance(sentence, str) else list(sentence)
        if not tokens:
            raise ValidationError("cannot profile an empty sentence")
        content = [
            t for t in tokens if t.isalpha() and t.lower() not in _STOPWORDS
        ]
        basis = content or tokens
        mean = sum(self.log_frequency(t) for t in basis) / len(basis)
        return FrequencyProfile(length=len(tokens), mean_log_freq=mean)

    def literal_rate(self, record_ids, keywords) -> float:
        """Fraction of the targets containing any of the keyword tokens."""
        ids = list(record_ids)
        if not ids:
            raise ValidationError("no occurrences: empty record id list")
        keyset = {k.lower() for k in keywords}
        hits = 0
        for rid in ids:
            if rid < 0 or rid >= len(self.records):
                raise ValidationError(f"record id {rid} out of range")
            if keyset & {t.lower() for t in self._tgt_tokens[rid]}:
                hits += 1
        return hits / len(ids)

    def admits_idiom(self, phrase, literal_keywords) -> tuple[bool, int, float]:
        """Apply the idiom filter: enough exact matches, mostly non-literal.

        Returns (admitted, occurrence count, literal rate).
        """
        ids = self.find_exact(phrase)
        if not ids:
            return False, 0, 0.0
        rate = self.literal_rate(ids, literal_keywords)
        admitted = len(ids) >= MIN_IDIOM_OCCURRENCES and rate <= MAX_LITERAL_RATE
        return admitted, len(ids), rate

    def matched_ids(
        self,
        profile: FrequencyProfile,
        length_tol: int = DEFAULT_LENGTH_TOL,
        freq_tol: float = DEFAULT_FREQ_TOL,
    ) -> list[int]:
        """All record ids qualifying for the profile (the sampler's support)."""
        out = []
        for rid, tokens in enumerate(self._src_tokens):
            if abs(len(tokens) - profile.length) > length_tol:
                continue
            p = self.profile(tokens)
            if abs(p.mean_log_freq - profile.mean_log_freq) <= freq_tol:
                out.append(rid)
        return out

    def sample_matched(
        self,
        profile: FrequencyProfile,
        n: int,
        seed: int,
        length_tol: int = DEFAULT_LENGTH_TOL,
        freq_tol: float = DEFAULT_FREQ_TOL,
    ) -> list[str]:
        """n source sentences with similar length and word frequency."""
        qualifiers = self.matched_ids(profile, length_tol, freq_tol)
        if len(qualifiers) < n:
            raise ValidationError(
                f"only {len(qualifiers)} sentences match the profile, need {n}"
            )
        rng = random.Random(seed)
        return [
            self.records[qualifiers[i]][0]
            for i in seeded_sample(rng, len(qualifiers), n)
        ]

    def top_tokens(self, k: int) -> list[str]:
        """Most frequent alphabetic non-stopword source tokens."""
        ranked = sorted(
            (
                (tok, c)
                for tok, c in self.frequencies.items()
                if tok.isalpha() and tok not in _STOPWORDS
            ),
            key=lambda kv: (-kv[1], kv[0]),
        )
        return [tok for tok, _ in ranked[:k]]


def _contains(haystack: list[str], needle: list[str]) -> bool:
    n = len(needle)
    for i in range(len(haystack) - n + 1):
        if haystack[i : i + n] == needle:
            return True
    return False


def ingest(source_path, target_path) -> ParallelCorpus:
    """Stream two aligned files into a corpus; line counts must agree."""
    records = []
    n_src = n_tgt = 0
    with open(source_path, encoding="utf-8") as fsrc, open(
        target_path, encoding="utf-8"
    ) as ftgt:
        for src, tgt in zip_longest(fsrc, ftgt):
            if src is not None:
                n_src += 1
            if tgt is not None:
                n_tgt += 1
            if src is None or tgt is None:
                continue
            records.append((src.rstrip("\n"), tgt.rstrip("\n")))
    if n_src != n_tgt:
        raise ValidationError(
            f"line-count mismatch: {source_path} has {n_src} lines, "
            f"{target_path} has {n_tgt}"
        )
    return ParallelCorpus(records)


def ingest_pairs(pairs) -> ParallelCorpus:
    """Build a corpus from in-memory (source, target) pairs."""
    return ParallelCorpus([(s, t) for s, t in pairs])


def load_toy_corpus() -> ParallelCorpus:
    """The small English-Dutch corpus shipped for demos and tests."""
    import importlib.resources

    data = importlib.resources.files("compoeval.data")
    src = (data / "toy_corpus.en").read_text(encoding="utf-8").splitlines()
    tgt = (data / "toy_corpus.nl").read_text(encoding="utf-8").splitlines()
    if len(src) != len(tgt):
        raise ValidationError("shipped toy corpus is misaligned")
    return ParallelCorpus(list(zip(src, tgt)))
