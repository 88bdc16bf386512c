"""Consistency and overgeneralisation metrics.

Consistency compares two translations after accounting for anticipated
changes: Dutch determiner alternation (de/het) is normalized away, the
one-word rule tolerates a single changed token, and the conjunction
metrics compare only the second conjunct, located via the Dutch
conjunction "en".  Overgeneralisation flags translations that copy an
idiom's keywords or contain their literal Dutch reflexes.

All functions are pure; suite evaluation parallelises trivially.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .errors import (
    ConjunctionNotFoundError,
    DegenerateInputError,
    ValidationError,
)
from .suites import (
    COND_NP,
    COND_S1PRIME,
    COND_S3,
    COND_SYNONYM,
    COND_VP,
    IdiomSpec,
    OvergenSource,
    SynonymPair,
    TestPair,
)
from .textutil import tokenize

# The shared stand-in both Dutch determiners map to.
DETERMINER_PLACEHOLDER = "de"
_DETERMINERS = ("de", "het")
_CONJUNCTION = "en"

METRIC_CONSISTENCY = "consistency"
METRIC_SYNONYM = "synonym_consistency"
METRIC_OVERGEN = "overgeneralisation"


def _as_tokens(value) -> list[str]:
    if isinstance(value, str):
        return tokenize(value)
    return list(value)


def normalize(tokens) -> list[str]:
    """Lowercase the sentence-initial token and merge de/het."""
    out = _as_tokens(tokens)
    if out:
        out[0] = out[0].lower()
    return [
        DETERMINER_PLACEHOLDER if t.lower() in _DETERMINERS else t for t in out
    ]


class DiffRegion(NamedTuple):
    """A maximal run of non-matching tokens (half-open spans)."""

    a_start: int
    a_end: int
    b_start: int
    b_end: int


def _lcs_lengths(a, b):
    n, m = len(a), len(b)
    table = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        row = table[i]
        nxt = table[i + 1]
        for j in range(m - 1, -1, -1):
            if a[i] == b[j]:
                row[j] = nxt[j + 1] + 1
            else:
                bj = row[j + 1]
                aj = nxt[j]
                row[j] = aj if aj >= bj else bj
    return table

def token_diff(a, b) -> list[DiffRegion]:
    """Minimal LCS edit script as maximal change regions."""
    a = _as_tokens(a)
    b = _as_tokens(b)
    table = _lcs_lengths(a, b)
    regions = []
    i = j = 0
    ra = rb = 0  # start of the open region
    open_region = False

    def close(end_a, end_b):
        nonlocal open_region
        if open_region:
            regions.append(DiffRegion(ra, end_a, rb, end_b))
            open_region = False

    while i < len(a) and j < len(b):
        if a[i] == b[j]:
            close(i, j)
            i += 1
            j += 1
        else:
            if not open_region:
                ra, rb = i, j
                open_region = True
            if table[i + 1][j] >= table[i][j + 1]:
                i += 1
            else:
                j += 1
    if i < len(a) or j < len(b):
        if not open_region:
            ra, rb = i, j
            open_region = True
        i, j = len(a), len(b)
    close(i, j)
    return regions


def consistency_one_word(t1, t2) -> bool:
    """Equal after normalization up to one changed word.

    One edit region with at most one token on each side qualifies, so a
    single-token insertion or deletion also counts.
    """
    regions = token_diff(normalize(t1), normalize(t2))
    if not regions:
        return True
    if len(regions) > 1:
        return False
    r = regions[0]
    return (r.a_end - r.a_start) <= 1 and (r.b_end - r.b_start) <= 1


def split_conjuncts(tokens, src_ratio: float | None = None):
    """Split a translation at the Dutch conjunction.

    With several "en" tokens the split whose first-part length ratio is
    closest to the source's ratio wins (ties go to the earliest).  Raises
    ConjunctionNotFoundError when no conjunction is present.
    """
    toks = _as_tokens(tokens)
    candidates = [i for i, t in enumerate(toks) if t.lower() == _CONJUNCTION]
    if not candidates:
        raise ConjunctionNotFoundError("conjunction not found: no 'en' in target")
    if src_ratio is None:
        src_ratio = 0.5
    total = len(toks) - 1
    if total <= 0:
        index = candidates[0]
    else:
        index = min(candidates, key=lambda i: (abs(i / total - src_ratio), i))
    return toks[:index], toks[index + 1 :]


def consistency_conj(t_base, t_variant, base_ratio=None, variant_ratio=None) -> bool:
    """Identical normalized second conjuncts; False when a split fails."""
    try:
        _, second_base = split_conjuncts(t_base, base_ratio)
        _, second_variant = split_conjuncts(t_variant, variant_ratio)
    except ConjunctionNotFoundError:
        return False
    return normalize(second_base) == normalize(second_variant)


def consistency_full(t1, t2) -> bool:
    return normalize(t1) == normalize(t2)


def _delete_first(tokens: list[str], sequences) -> list[str]:
    """Remove the earliest occurrence of any sequence (longest on ties)."""
    lowered = [t.lower() for t in tokens]
    best = None
    for seq in sequences:
        target = [w.lower() for w in seq]
        n = len(target)
        if n == 0:
            continue
        for i in range(len(tokens) - n + 1):
            if lowered[i : i + n] == target:
                if best is None or i < best[0] or (i == best[0] and n > best[1]):
                    best = (i, n)
                break
    if best is None:
        return list(tokens)
    i, n = best
    return tokens[:i] + tokens[i + n :]


def synonym_consistency(t1, t2, dutch_translations) -> bool:
    """Consistency of everything but the synonym's own translation.

    The first occurrence of any known translation is excised from each
    target (nothing is removed when the synonym was omitted, which the
    metric deliberately tolerates); the remainders must then normalize
    equal.
    """
    a = _delete_first(_as_tokens(t1), dutch_translations)
    b = _delete_first(_as_tokens(t2), dutch_translations)
    return normalize(a) == normalize(b)


def detect_overgeneralisation(target, idiom: IdiomSpec) -> bool:
    """Keywords copied to the output, or their literal Dutch reflexes."""
    present = {t.lower() for t in _as_tokens(target)}
    markers = {k.lower() for k in idiom.keywords}
    markers |= {k.lower() for k in idiom.literal_dutch}
    return bool(present & markers)


@dataclass(frozen=True)
class OvergenCurve:
    idiom: str
    checkpoints: tuple
    rates: tuple

    def __post_init__(self):
        if len(self.checkpoints) != len(self.rates):
            raise ValidationError("curve needs one rate per checkpoint")
        if len(set(self.checkpoints)) != len(self.checkpoints):
            raise ValidationError("checkpoint labels must be unique")
        if any(not (0.0 <= r <= 1.0) for r in self.rates):
            raise ValidationError("rates must lie in [0, 1]")


def phase_analysis(curve: OvergenCurve) -> dict:
    """Peak rate, converged rate, and how much of the peak recedes."""
    if len(curve.rates) < 2:
        raise ValidationError("phase analysis needs at least 2 checkpoints")
    peak = max(curve.rates)
    convergence = curve.rates[-1]
    return {"peak": peak, "convergence": convergence, "delta": peak - convergence}


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    """Sample Pearson correlation."""
    if len(x) != len(y):
        raise ValidationError("pearson needs vectors of equal length")
    n = len(x)
    if n < 2:
        raise ValidationError("pearson needs at least 2 points")
    mean_x = math.fsum(x) / n
    mean_y = math.fsum(y) / n
    sxy = math.fsum((xi - mean_x) * (yi - mean_y) for xi, yi in zip(x, y))
    sxx = math.fsum((xi - mean_x) ** 2 for xi in x)
    syy = math.fsum((yi - mean_y) ** 2 for yi in y)
    if sxx == 0.0 or syy == 0.0:
        raise DegenerateInputError("degenerate input: zero variance")
    return sxy / math.sqrt(sxx * syy)


# --- suite evaluation -----------------------------------------------------


@dataclass(frozen=True)
class EvalResult:
    pair_id: str
    verdict: bool
    metric: str
    condition: str
    data_type: str
    training_size: str
    checkpoint: str
    template_id: int | None = None
    unit: str | None = None
    flag: str | None = None


def _source_ratio(source_text: str, second_start: int) -> float:
    first = tokenize(source_text[: max(second_start - len(" and "), 0)])
    second = tokenize(source_text[second_start:])
    total = len(first) + len(second)
    return len(first) / total if total else 0.5


class TranslationLookup:
    """source text -> target text for one (backend, checkpoint) run."""

    def __init__(self, records):
        self.mapping: dict[str, str] = {}
        labels = set()
        for rec in records:
            self.mapping[rec.source] = rec.target
            labels.add((rec.backend, rec.checkpoint))
        if len(labels) > 1:
            raise ValidationError(
                f"records span several backend/checkpoint runs: {sorted(labels)}"
            )
        self.backend, self.checkpoint = (labels.pop() if labels else ("backend", "final"))

    def __getitem__(self, source: str) -> str:
        if source not in self.mapping:
            raise ValidationError(f"no translation found for source: {source!r}")
        return self.mapping[source]


def evaluate_pairs(
    pairs: list[TestPair],
    lookup: TranslationLookup,
    synonyms: dict[str, SynonymPair] | None = None,
    training_size: str | None = None,
) -> list[EvalResult]:
    """Score every test pair against one translation run."""
    size = training_size or lookup.backend
    results = []
    for pair in pairs:
        t_base = lookup[pair.base_source]
        t_variant = lookup[pair.variant_source]
        common = dict(
            condition=pair.condition,
            data_type=pair.data_type,
            training_size=size,
            checkpoint=lookup.checkpoint,
            template_id=pair.template_id,
            unit=pair.unit,
        )
        if pair.condition in (COND_NP, COND_VP):
            verdict = consistency_one_word(t_base, t_variant)
            results.append(
                EvalResult(pair.pair_id, verdict, METRIC_CONSISTENCY, **common)
            )
        elif pair.condition in (COND_S1PRIME, COND_S3):
            flag = None
            if pair.conjunct2_span is None:
                base_ratio = variant_ratio = None
            else:
                (b_start, _), (v_start, _) = pair.conjunct2_span
                base_ratio = _source_ratio(pair.base_source, b_start)
                variant_ratio = _source_ratio(pair.variant_source, v_start)
            try:
                _, second_base = split_conjuncts(t_base, base_ratio)
                _, second_variant = split_conjuncts(t_variant, variant_ratio)
                verdict = normalize(second_base) == normalize(second_variant)
            except ConjunctionNotFoundError:
                verdict = False
                flag = "conjunction not found"
            results.append(
                EvalResult(
                    pair.pair_id, verdict, METRIC_CONSISTENCY, flag=flag, **common
                )
            )
        elif pair.condition == COND_SYNONYM:
            results.append(
                EvalResult(
                    pair.pair_id,
                    consistency_full(t_base, t_variant),
                    METRIC_CONSISTENCY,
                    **common,
                )
            )
            if synonyms is None or pair.unit not in synonyms:
                raise ValidationError(
                    f"no synonym metadata for unit {pair.unit!r}"
                )
            translations = synonyms[pair.unit].dutch_translations
            results.append(
                EvalResult(
                    pair.pair_id,
                    synonym_consistency(t_base, t_variant, translations),
                    METRIC_SYNONYM,
                    **common,
                )
            )
        else:
            raise ValidationError(f"cannot evaluate condition {pair.condition!r}")
    return results


def evaluate_overgen(
    sources: list[OvergenSource],
    lookup: TranslationLookup,
    idioms: dict[str, IdiomSpec],
    training_size: str | None = None,
) -> list[EvalResult]:
    size = training_size or lookup.backend
    results = []
    for src in sources:
        if src.unit not in idioms:
            raise ValidationError(f"no idiom metadata for unit {src.unit!r}")
        verdict = detect_overgeneralisation(lookup[src.source], idioms[src.unit])
        results.append(
            EvalResult(
                src.source_id,
                verdict,
                METRIC_OVERGEN,
                condition=src.condition,
                data_type=src.data_type,
                training_size=size,
                checkpoint=lookup.checkpoint,
                template_id=src.template_id,
                unit=src.unit,
            )
        )
    return results


def overgen_curve(
    idiom: str, results: list[EvalResult], checkpoint_order: Sequence[str]
) -> OvergenCurve:
    """Per-checkpoint overgeneralisation rates for one idiom."""
    rates = []
    for label in checkpoint_order:
        bucket = [
            r
            for r in results
            if r.unit == idiom and r.checkpoint == label and r.metric == METRIC_OVERGEN
        ]
        if not bucket:
            raise ValidationError(
                f"no results for idiom {idiom!r} at checkpoint {label!r}"
            )
        rates.append(sum(r.verdict for r in bucket) / len(bucket))
    return OvergenCurve(idiom, tuple(checkpoint_order), tuple(rates))
