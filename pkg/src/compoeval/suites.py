"""Builders for the three test suites: systematicity (noun/verb-phrase
perturbations and conjunction recombinations), substitutivity (synonym
swaps) and overgeneralisation (idioms in supportive and unsupportive
contexts).

All builders are pure given (configuration, seed): per-item randomness
is derived from one master generator, so suites regenerate identically.
Sample subsets are fresh seeded draws from the binding spaces rather
than subsets of a fixed pool.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path

import importlib.resources

from .corpus import ParallelCorpus
from .errors import ValidationError
from .lexicon import SINGULAR
from .templates import BoundSentence, TemplateSet, conjoin
from .treegen import SemiNaturalGenerator

SYNTHETIC = "synthetic"
SEMI_NATURAL = "semi-natural"
NATURAL = "natural"
RANDOM_CONTEXT = "random-context"

COND_NP = "NP"
COND_VP = "VP"
COND_S1PRIME = "S1'"
COND_S3 = "S3"
COND_SYNONYM = "synonym"
COND_IDIOM_CONTEXT = "idiom-context"
COND_IDIOM_RANDOM = "idiom-random"

# Classes whose referents are human; relative clauses attach behind them.
_HUMAN_SUBCATS = ("people", "elite")

_RANDOM_WORD_POOL = 5000
_RANDOM_WORDS_EACH = 10


@dataclass(frozen=True)
class TestPair:
    pair_id: str
    base_source: str
    variant_source: str
    condition: str
    data_type: str
    template_id: int | None = None
    unit: str | None = None
    # Character spans of the second conjunct in base and variant.
    conjunct2_span: tuple | None = None

    def __post_init__(self):
        if self.base_source == self.variant_source:
            raise ValidationError("test pair must differ between base and variant")


@dataclass(frozen=True)
class OvergenSource:
    source_id: str
    source: str
    condition: str
    data_type: str
    unit: str
    template_id: int | None = None


@dataclass(frozen=True)
class SynonymPair:
    british: str
    american: str
    dutch_translations: tuple
    clause: str
    corpus_freqs: tuple

    @property
    def unit(self) -> str:
        return f"{self.british}/{self.american}"


@dataclass(frozen=True)
class IdiomSpec:
    idiom: str
    keywords: frozenset
    literal_dutch: frozenset
    paraphrase_markers: frozenset
    clause: str
    corpus_freq: int

    def __post_init__(self):
        if not self.keywords:
            raise ValidationError(f"idiom {self.idiom!r} needs at least one keyword")
        # sentence-initial capitalisation inside the clause is fine
        if self.idiom.lower() not in self.clause.lower():
            raise ValidationError(
                f"clause for {self.idiom!r} must contain the idiom verbatim"
            )


def _read_data_table(name: str, path):
    if path is not None:
        text = Path(path).read_text(encoding="utf-8")
    else:
        text = (importlib.resources.files("compoeval.data") / name).read_text(
            encoding="utf-8"
        )
    for raw in text.splitlines():
        if raw.strip() and not raw.lstrip().startswith("#"):
            yield raw.rstrip("\n").split("\t")


def load_synonyms(path=None) -> list[SynonymPair]:
    pairs = []
    for cols in _read_data_table("synonyms.tsv", path):
        if len(cols) != 6:
            raise ValidationError(f"synonym row needs 6 columns: {cols!r}")
        british, bf, american, af, dutch, clause = cols
        pairs.append(
            SynonymPair(
                british=british,
                american=american,
                dutch_translations=tuple(
                    tuple(alt.split()) for alt in dutch.split(",") if alt
                ),
                clause=clause,
                corpus_freqs=(int(bf), int(af)),
            )
        )
    return pairs


def load_idioms(path=None) -> list[IdiomSpec]:
    idioms = []
    for cols in _read_data_table("idioms.tsv", path):
        if len(cols) != 6:
            raise ValidationError(f"idiom row needs 6 columns: {cols!r}")
        idiom, keywords, literal, markers, clause, freq = cols
        idioms.append(
            IdiomSpec(
                idiom=idiom,
                keywords=frozenset(k for k in keywords.split(",") if k),
                literal_dutch=frozenset(k for k in literal.split(",") if k),
                paraphrase_markers=frozenset(k for k in markers.split(",") if k),
                clause=clause,
                corpus_freq=int(freq),
            )
        )
    return idioms


def _swap_term(text: str, old: str, new: str) -> str | None:
    """Replace the first occurrence of a term's token sequence; None when
    absent.  Case of the leading matched token is preserved."""
    tokens = text.split()
    old_tokens = old.split()
    new_tokens = new.split()
    lowered = [t.lower() for t in tokens]
    n = len(old_tokens)
    for i in range(len(tokens) - n + 1):
        if lowered[i : i + n] == old_tokens:
            replacement = list(new_tokens)
            if tokens[i][:1].isupper():
                replacement[0] = replacement[0][0].upper() + replacement[0][1:]
            return " ".join(tokens[:i] + replacement + tokens[i + n :])
    return None


class SuiteBuilder:
    def __init__(
        self,
        templates: TemplateSet,
        semi_natural: SemiNaturalGenerator | None = None,
        corpus: ParallelCorpus | None = None,
    ):
        self.templates = templates
        self.semi_natural = semi_natural
        self.corpus = corpus

    # -- shared helpers ----------------------------------------------------

    def _require_semi_natural(self) -> SemiNaturalGenerator:
        if self.semi_natural is None:
            raise ValidationError("semi-natural generator not configured")
        return self.semi_natural

    def _require_corpus(self) -> ParallelCorpus:
        if self.corpus is None:
            raise ValidationError("natural data requested but no corpus loaded")
        return self.corpus

    def _template_ids(self):
        return sorted(self.templates.templates)

    def _clause_site(self, tid: int):
        """Insertion point for a relative clause in a synthetic template.

        The clause's verb is inflected for a singular head, so it must
        attach behind a singular human noun: the (fixed-singular) elite
        object when the template has one, otherwise the subject with its
        number pinned to singular.
        """
        compiled = self.templates._compiled(tid)
        elite = [
            ordinal
            for ordinal, spec in enumerate(compiled.specs)
            if spec.pos == "N" and spec.subcategory == "elite" and spec.number == SINGULAR
        ]
        if elite:
            return elite[-1], None
        subj = [
            ordinal for ordinal, spec in enumerate(compiled.specs) if spec.role == "subj"
        ]
        if not subj:
            raise ValidationError(
                f"template {tid} has no singular human noun to attach a clause to"
            )
        return subj[0], {"subj": SINGULAR}

    def _insert_after_token(self, text: str, index: int, inserted: str) -> str:
        tokens = text.split()
        return " ".join(tokens[: index + 1] + inserted.split() + tokens[index + 1 :])

    def _synthetic_with_clause(self, tid, count, seed, clause_text):
        site, overrides = self._clause_site(tid)
        positions = self.templates.slot_token_positions(tid)
        bases = self.templates.instantiate(tid, count, seed, overrides)
        return [
            self._insert_after_token(s.text, positions[site], clause_text)
            for s in bases
        ]

    def _semi_natural_with_clause(self, tid, count, seed, clause_text):
        semi = self._require_semi_natural()
        bases = semi.instantiate(tid, count, seed, number=SINGULAR)
        return [
            self._insert_after_token(s.text, semi.noun_token_index(s), clause_text)
            for s in bases
        ]

    # -- systematicity -----------------------------------------------------

    def build_npvp_suite(
        self, data_type: str, condition: str, per_template: int, seed: int
    ) -> list[TestPair]:
        """Paired sentences differing in exactly one noun."""
        if condition not in (COND_NP, COND_VP):
            raise ValidationError(f"not an NP/VP condition: {condition!r}")
        if condition == COND_VP and data_type != SYNTHETIC:
            raise ValidationError(
                f"unsupported condition for data type: {condition} applies to "
                f"synthetic data only, got {data_type!r}"
            )
        if data_type not in (SYNTHETIC, SEMI_NATURAL):
            raise ValidationError(
                f"unsupported condition for data type: {condition} applies to "
                f"generated data, got {data_type!r}"
            )
        rng = random.Random(seed)
        pairs = []
        for tid in self._template_ids():
            gen_seed = rng.getrandbits(32)
            if data_type == SYNTHETIC:
                bases = self.templates.instantiate(tid, per_template, gen_seed)
            else:
                bases = self._require_semi_natural().instantiate(
                    tid, per_template, gen_seed
                )
            for i, base in enumerate(bases):
                p_seed = rng.getrandbits(32)
                if data_type == SYNTHETIC:
                    variant = (
                        self.templates.perturb_np(base, p_seed)
                        if condition == COND_NP
                        else self.templates.perturb_vp(base, p_seed)
                    )
                else:
                    variant = self._require_semi_natural().perturb_person(base, p_seed)
                pairs.append(
                    TestPair(
                        pair_id=f"npvp-{condition}-{data_type}-t{tid}-{i:05d}",
                        base_source=base.text,
                        variant_source=variant.text,
                        condition=condition,
                        data_type=data_type,
                        template_id=tid,
                    )
                )
        return pairs

    def _second_conjunct(self, data_type, exclude_tid, rng):
        if data_type == SYNTHETIC:
            choices = [t for t in self._template_ids() if t != exclude_tid]
            tid2 = choices[rng.randrange(len(choices))]
            return self.templates.instantiate(tid2, 1, rng.getrandbits(32))[0]
        if data_type == SEMI_NATURAL:
            semi = self._require_semi_natural()
            ids = sorted(semi.fillers)
            tid2 = ids[rng.randrange(len(ids))]
            return semi.instantiate(tid2, 1, rng.getrandbits(32))[0]
        raise ValidationError(f"no generator for data type {data_type!r}")

    def _natural_profile(self, tid: int, seed: int):
        """Length/frequency profile of the semi-natural inputs for a template."""
        corpus = self._require_corpus()
        semi = self._require_semi_natural()
        probes = semi.instantiate(tid, min(25, semi.binding_space(tid)), seed)
        profiles = [corpus.profile(p.text) for p in probes]
        length = round(sum(p.length for p in profiles) / len(profiles))
        freq = sum(p.mean_log_freq for p in profiles) / len(profiles)
        from .corpus import FrequencyProfile

        return FrequencyProfile(length=length, mean_log_freq=freq)

    def build_conj_suite(
        self,
        second_conjunct_type: str,
        condition: str,
        per_template: int,
        seed: int,
        length_tol: int | None = None,
        freq_tol: float | None = None,
    ) -> list[TestPair]:
        """Conjoined pairs sharing their second conjunct byte-identically."""
        if condition not in (COND_S1PRIME, COND_S3):
            raise ValidationError(f"not a conjunction condition: {condition!r}")
        if second_conjunct_type not in (SYNTHETIC, SEMI_NATURAL, NATURAL):
            raise ValidationError(
                f"unsupported second-conjunct type {second_conjunct_type!r}"
            )
        rng = random.Random(seed)
        pairs = []
        for tid in self._template_ids():
            firsts = self.templates.instantiate(tid, per_template, rng.getrandbits(32))
            seconds: list[str] = []
            if second_conjunct_type == NATURAL:
                corpus = self._require_corpus()
                profile = self._natural_profile(tid, rng.getrandbits(32))
                kwargs = {}
                if length_tol is not None:
                    kwargs["length_tol"] = length_tol
                if freq_tol is not None:
                    kwargs["freq_tol"] = freq_tol
                seconds = corpus.sample_matched(
                    profile, per_template, rng.getrandbits(32), **kwargs
                )
            for i, s1 in enumerate(firsts):
                if second_conjunct_type == NATURAL:
                    s2_text = seconds[i]
                else:
                    s2_text = self._second_conjunct(
                        second_conjunct_type, tid, rng
                    ).text
                if condition == COND_S1PRIME:
                    other = self.templates.perturb_vp(s1, rng.getrandbits(32))
                else:
                    choices = [t for t in self._template_ids() if t != tid]
                    t3 = choices[rng.randrange(len(choices))]
                    other = self.templates.instantiate(t3, 1, rng.getrandbits(32))[0]
                base = conjoin(s1, s2_text)
                variant = conjoin(other, s2_text)
                pairs.append(
                    TestPair(
                        pair_id=(
                            f"conj-{condition}-{second_conjunct_type}-t{tid}-{i:05d}"
                        ),
                        base_source=base.text,
                        variant_source=variant.text,
                        condition=condition,
                        data_type=second_conjunct_type,
                        template_id=tid,
                        conjunct2_span=(
                            (base.second_start, len(base.text)),
                            (variant.second_start, len(variant.text)),
                        ),
                    )
                )
        return pairs

    # -- substitutivity ----------------------------------------------------

    def build_substitutivity_suite(
        self, pair: SynonymPair, data_type: str, per_unit: int, seed: int
    ) -> list[TestPair]:
        """Pairs whose contexts are byte-identical around the two synonyms."""
        rng = random.Random(seed)
        out = []
        if data_type in (SYNTHETIC, SEMI_NATURAL):
            base_clause = f"{pair.clause} {pair.british}"
            variant_clause = f"{pair.clause} {pair.american}"
            for tid in self._template_ids():
                gen_seed = rng.getrandbits(32)
                if data_type == SYNTHETIC:
                    bases = self._synthetic_with_clause(
                        tid, per_unit, gen_seed, base_clause
                    )
                    variants = self._synthetic_with_clause(
                        tid, per_unit, gen_seed, variant_clause
                    )
                else:
                    bases = self._semi_natural_with_clause(
                        tid, per_unit, gen_seed, base_clause
                    )
                    variants = self._semi_natural_with_clause(
                        tid, per_unit, gen_seed, variant_clause
                    )
                for i, (b, v) in enumerate(zip(bases, variants)):
                    out.append(
                        TestPair(
                            pair_id=(
                                f"subst-{pair.british.replace(' ', '_')}-"
                                f"{data_type}-t{tid}-{i:05d}"
                            ),
                            base_source=b,
                            variant_source=v,
                            condition=COND_SYNONYM,
                            data_type=data_type,
                            template_id=tid,
                            unit=pair.unit,
                        )
                    )
            return out
        if data_type != NATURAL:
            raise ValidationError(f"unknown data type {data_type!r}")
        corpus = self._require_corpus()
        sources = []
        for rid in corpus.find_exact(pair.british):
            sources.append((corpus.records[rid][0], True))
        for rid in corpus.find_exact(pair.american):
            sources.append((corpus.records[rid][0], False))
        if not sources:
            raise ValidationError(
                f"no natural occurrences of {pair.british!r} or {pair.american!r}"
            )
        if len(sources) > per_unit:
            from .textutil import seeded_sample

            keep = seeded_sample(rng, len(sources), per_unit)
            sources = [sources[i] for i in sorted(keep)]
        for i, (text, is_british) in enumerate(sources):
            if is_british:
                base = text
                variant = _swap_term(text, pair.british, pair.american)
            else:
                base = _swap_term(text, pair.american, pair.british)
                variant = text
            if base is None or variant is None or base == variant:
                continue
            out.append(
                TestPair(
                    pair_id=f"subst-{pair.british.replace(' ', '_')}-natural-{i:05d}",
                    base_source=base,
                    variant_source=variant,
                    condition=COND_SYNONYM,
                    data_type=NATURAL,
                    unit=pair.unit,
                )
            )
        return out

    # -- overgeneralisation --------------------------------------------------

    def _random_words(self, rng) -> list[str]:
        if self.corpus is not None:
            pool = self.corpus.top_tokens(_RANDOM_WORD_POOL)
        else:
            pool = []
            lex = self.templates.lexicon
            for subcat in _HUMAN_SUBCATS + ("vehicle", "quantity"):
                for number in ("singular", "plural"):
                    if lex.has_class("N", subcat, number):
                        pool.extend(lex.lookup("N", subcat, number))
        if len(pool) < _RANDOM_WORDS_EACH:
            raise ValidationError("random-word pool too small")
        from .textutil import seeded_sample

        return [pool[i] for i in seeded_sample(rng, len(pool), _RANDOM_WORDS_EACH)]

    def build_overgen_suite(
        self, idiom: IdiomSpec, data_type: str, per_unit: int, seed: int
    ) -> list[OvergenSource]:
        """Unpaired sources containing the idiom verbatim."""
        rng = random.Random(seed)
        slug = idiom.idiom.replace(" ", "_")
        out = []
        if data_type in (SYNTHETIC, SEMI_NATURAL):
            for tid in self._template_ids():
                gen_seed = rng.getrandbits(32)
                if data_type == SYNTHETIC:
                    sources = self._synthetic_with_clause(
                        tid, per_unit, gen_seed, idiom.clause
                    )
                else:
                    sources = self._semi_natural_with_clause(
                        tid, per_unit, gen_seed, idiom.clause
                    )
                for i, text in enumerate(sources):
                    out.append(
                        OvergenSource(
                            source_id=f"idiom-{slug}-{data_type}-t{tid}-{i:05d}",
                            source=text,
                            condition=COND_IDIOM_CONTEXT,
                            data_type=data_type,
                            template_id=tid,
                            unit=idiom.idiom,
                        )
                    )
            return out
        if data_type == NATURAL:
            corpus = self._require_corpus()
            ids = corpus.find_exact(idiom.idiom)
            if not ids:
                raise ValidationError(
                    f"no natural occurrences of idiom {idiom.idiom!r}"
                )
            if len(ids) > per_unit:
                from .textutil import seeded_sample

                keep = seeded_sample(rng, len(ids), per_unit)
                ids = [ids[i] for i in sorted(keep)]
            return [
                OvergenSource(
                    source_id=f"idiom-{slug}-natural-{i:05d}",
                    source=corpus.records[rid][0],
                    condition=COND_IDIOM_CONTEXT,
                    data_type=NATURAL,
                    unit=idiom.idiom,
                )
                for i, rid in enumerate(ids)
            ]
        if data_type == RANDOM_CONTEXT:
            for i in range(per_unit):
                words = self._random_words(rng)
                text = " ".join(words[:5] + idiom.idiom.split() + words[5:]) + " ."
                out.append(
                    OvergenSource(
                        source_id=f"idiom-{slug}-random-{i:05d}",
                        source=text,
                        condition=COND_IDIOM_RANDOM,
                        data_type=RANDOM_CONTEXT,
                        unit=idiom.idiom,
                    )
                )
            return out
        raise ValidationError(f"unknown data type {data_type!r}")
