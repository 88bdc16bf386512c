import math
import random

import numpy as np
import pytest

from compoeval.bridge import MockDictionary, MockVolatile
from compoeval.errors import (
    ConjunctionNotFoundError,
    DegenerateInputError,
    ValidationError,
)
from compoeval.metrics import (
    EvalResult,
    OvergenCurve,
    TranslationLookup,
    consistency_conj,
    consistency_full,
    consistency_one_word,
    detect_overgeneralisation,
    evaluate_overgen,
    evaluate_pairs,
    normalize,
    overgen_curve,
    pearson,
    phase_analysis,
    split_conjuncts,
    synonym_consistency,
    token_diff,
)
from compoeval.suites import IdiomSpec, load_idioms, load_synonyms
from compoeval.templates import conjoin

from .oracles import lcs_length

WORDS = ["de", "het", "koning", "kind", "slaapt", "ziet", "huilt", "en", "x", "y"]


def random_tokens(rng, max_len=12):
    return [rng.choice(WORDS) for _ in range(rng.randint(0, max_len))]


# --- normalize -------------------------------------------------------------------


def test_normalize_merges_determiners():
    assert normalize(["de", "koning"]) == normalize(["het", "koning"])
    assert normalize([]) == []
    assert normalize(["De", "koning"]) == ["de", "koning"]
    assert normalize("Het kind") == ["de", "kind"]


def test_normalize_lowercases_initial_token_only():
    assert normalize(["Koning", "Willem"]) == ["koning", "Willem"]


# --- token_diff ------------------------------------------------------------------


def test_token_diff_identical():
    assert token_diff(["a", "b"], ["a", "b"]) == []


def test_token_diff_single_substitution():
    regions = token_diff("de dichter ziet de koning", "de dichter ziet de koningin")
    assert len(regions) == 1
    r = regions[0]
    assert (r.a_end - r.a_start, r.b_end - r.b_start) == (1, 1)


def test_token_diff_insertion_and_deletion():
    (r,) = token_diff(["a", "b", "c"], ["a", "c"])
    assert (r.a_end - r.a_start, r.b_end - r.b_start) == (1, 0)
    (r,) = token_diff(["a", "c"], ["a", "b", "c"])
    assert (r.a_end - r.a_start, r.b_end - r.b_start) == (0, 1)


def test_token_diff_matches_lcs_oracle_on_random_pairs():
    rng = random.Random(4242)
    for _ in range(800):
        a = random_tokens(rng)
        b = random_tokens(rng)
        regions = token_diff(a, b)
        deleted = sum(r.a_end - r.a_start for r in regions)
        inserted = sum(r.b_end - r.b_start for r in regions)
        lcs = lcs_length(a, b)
        assert deleted == len(a) - lcs
        assert inserted == len(b) - lcs
        # removing the regions leaves the (equal) common subsequence
        keep_a = [t for i, t in enumerate(a) if not any(r.a_start <= i < r.a_end for r in regions)]
        keep_b = [t for i, t in enumerate(b) if not any(r.b_start <= i < r.b_end for r in regions)]
        assert keep_a == keep_b


def test_token_diff_regions_are_separated_by_matches():
    regions = token_diff(["a", "x", "b", "y", "c"], ["a", "q", "b", "r", "c"])
    assert len(regions) == 2


# --- one-word consistency -----------------------------------------------------------


def test_one_word_examples():
    assert consistency_one_word(
        "de dichter ziet de koning", "de dichter ziet de koningin"
    )
    assert consistency_one_word(
        "de dichter ziet de koning", "het dichter ziet het meisje"
    )
    assert not consistency_one_word("de a ziet de b", "de b ziet de a")


def test_one_word_accepts_identity_and_single_indel():
    assert consistency_one_word("de koning slaapt", "de koning slaapt")
    assert consistency_one_word("de koning slaapt", "de oude koning slaapt")
    assert not consistency_one_word("de koning slaapt", "de hele oude koning slaapt")


def test_consistency_symmetry():
    rng = random.Random(7)
    for _ in range(200):
        a, b = random_tokens(rng), random_tokens(rng)
        assert consistency_one_word(a, b) == consistency_one_word(b, a)
        assert consistency_full(a, b) == consistency_full(b, a)


# --- conjunct splitting ---------------------------------------------------------------


def test_split_single_conjunction():
    first, second = split_conjuncts("de dichter slaapt en het kind huilt")
    assert first == ["de", "dichter", "slaapt"]
    assert second == ["het", "kind", "huilt"]


def test_split_no_conjunction():
    with pytest.raises(ConjunctionNotFoundError):
        split_conjuncts("de dichter slaapt")


def test_split_multiple_conjunctions_uses_ratio():
    # candidates at indices 2 and 5 of 8 tokens (total = 7 positions)
    tokens = "a b en c d en f g".split()
    first, second = split_conjuncts(tokens, src_ratio=2 / 7)
    assert first == ["a", "b"]
    first, second = split_conjuncts(tokens, src_ratio=5 / 7)
    assert first == ["a", "b", "en", "c", "d"]
    # default ratio 0.5 picks the closer middle split; tie -> earliest
    tokens = "a en b en c".split()
    first, _ = split_conjuncts(tokens)
    assert first == ["a"]


def test_split_recovers_mock_dictionary_boundary(mock_dict):
    s1 = "the poet criticises the king ."
    s2 = "the child sleeps ."
    joined = conjoin(s1, s2)
    target = mock_dict.translate(joined.text)
    ratio = len(s1.split()[:-1]) / (len(s1.split()[:-1]) + len(s2.split()))
    first, second = split_conjuncts(target, ratio)
    assert " ".join(first) == mock_dict.translate(s1)[:-2]
    assert " ".join(second) == mock_dict.translate(s2)


def test_split_multi_en_against_hand_selected(mock_dict):
    # first conjunct itself contains "and" (template 4 pattern)
    s1 = "the poet and the child understand the mayor ."
    s2 = "the farmer sleeps ."
    joined = conjoin(s1, s2)
    target = mock_dict.translate(joined.text)
    assert target.split().count("en") == 2
    core1 = s1.split()[:-1]
    ratio = len(core1) / (len(core1) + len(s2.split()))
    first, second = split_conjuncts(target, ratio)
    assert " ".join(second) == mock_dict.translate(s2)


def test_consistency_conj():
    assert consistency_conj(
        "de dichter slaapt en het kind huilt",
        "de boer lacht en het kind huilt",
    )
    assert not consistency_conj(
        "de dichter slaapt en het kind huilt",
        "de boer lacht en het kind lacht",
    )
    assert not consistency_conj("geen voegwoord hier", "ook hier niet")


# --- full + synonym consistency ----------------------------------------------------------


def test_consistency_full():
    assert consistency_full("de koning slaapt", "de koning slaapt")
    assert consistency_full("de koning slaapt", "het koning slaapt")
    assert not consistency_full("de koning slaapt", "de koningin slaapt")
    rng = random.Random(3)
    for _ in range(50):
        t = random_tokens(rng)
        assert consistency_full(t, t)


def test_synonym_consistency_examples():
    translations = (("donut",), ("oliebol",))
    assert synonym_consistency(
        "hij eet de donut .", "hij eet de donut .", translations
    )
    assert synonym_consistency(
        "hij eet de donut .", "hij eet de oliebol .", translations
    )
    # omission of the synonym still counts when the context agrees
    assert synonym_consistency("hij eet de donut .", "hij eet de .", translations)
    assert not synonym_consistency(
        "hij eet de donut .", "zij eet de donut .", translations
    )


def test_synonym_consistency_multiword_sequence():
    translations = (("winkel", "wagen"), ("winkelwagen",))
    assert synonym_consistency(
        "hij duwt de winkel wagen .", "hij duwt de winkelwagen .", translations
    )


# --- overgeneralisation ----------------------------------------------------------------


def heart_idiom():
    return next(i for i in load_idioms() if i.idiom == "by heart")


def test_detect_overgeneralisation_examples():
    idiom = heart_idiom()
    assert detect_overgeneralisation("hij kende de formule door hart", idiom)
    assert not detect_overgeneralisation("hij kende de formule uit het hoofd", idiom)
    assert not detect_overgeneralisation("", idiom)
    # copied English keyword counts too
    assert detect_overgeneralisation("hij kende het by heart", idiom)


def test_detect_overgeneralisation_monotone_in_keywords():
    idiom = heart_idiom()
    extended = IdiomSpec(
        idiom=idiom.idiom,
        keywords=idiom.keywords | {"formule"},
        literal_dutch=idiom.literal_dutch,
        paraphrase_markers=idiom.paraphrase_markers,
        clause=idiom.clause,
        corpus_freq=idiom.corpus_freq,
    )
    targets = [
        "hij kende de formule uit het hoofd",
        "hij kende het gedicht door hart",
        "niets hiervan",
    ]
    for t in targets:
        if detect_overgeneralisation(t, idiom):
            assert detect_overgeneralisation(t, extended)


def test_hand_labelled_fixture_perfect_precision_recall():
    from .fixture_overgen import FIXTURE

    idioms = {i.idiom: i for i in load_idioms()}
    assert len(FIXTURE) == 40
    for idiom_name, target, expected in FIXTURE:
        got = detect_overgeneralisation(target, idioms[idiom_name])
        assert got == expected, (idiom_name, target)


# --- curves, phases, correlation -------------------------------------------------------


def test_phase_analysis_example():
    curve = OvergenCurve("x", ("c1", "c2", "c3", "c4"), (0.0, 0.4, 1.0, 0.3))
    out = phase_analysis(curve)
    assert out == {"peak": 1.0, "convergence": 0.3, "delta": 0.7}


def test_phase_analysis_monotone_curve_has_zero_delta():
    curve = OvergenCurve("x", ("c1", "c2", "c3"), (0.1, 0.5, 0.9))
    assert phase_analysis(curve)["delta"] == 0.0


def test_phase_analysis_needs_two_checkpoints():
    with pytest.raises(ValidationError):
        phase_analysis(OvergenCurve("x", ("c1",), (0.5,)))


def test_curve_validation():
    with pytest.raises(ValidationError):
        OvergenCurve("x", ("c1", "c1"), (0.1, 0.2))
    with pytest.raises(ValidationError):
        OvergenCurve("x", ("c1", "c2"), (0.1, 1.2))
    with pytest.raises(ValidationError):
        OvergenCurve("x", ("c1", "c2"), (0.1,))


def test_pearson_exact_cases():
    x = [1.0, 2.0, 3.0]
    assert pearson(x, [2 * v + 1 for v in x]) == 1.0
    assert pearson([1, 2, 3], [3, 2, 1]) == -1.0


def test_pearson_matches_numpy_on_random_vectors():
    rng = random.Random(11)
    for _ in range(100):
        n = rng.randint(2, 20)
        x = [rng.uniform(-5, 5) for _ in range(n)]
        y = [rng.uniform(-5, 5) for _ in range(n)]
        if len(set(x)) < 2 or len(set(y)) < 2:
            continue
        expected = float(np.corrcoef(x, y)[0, 1])
        assert math.isclose(pearson(x, y), expected, abs_tol=1e-12)


def test_pearson_errors():
    with pytest.raises(DegenerateInputError):
        pearson([1, 1, 1], [1, 2, 3])
    with pytest.raises(ValidationError):
        pearson([1], [1])
    with pytest.raises(ValidationError):
        pearson([1, 2], [1, 2, 3])


# --- suite evaluation -------------------------------------------------------------------


def test_evaluate_pairs_and_overgen(builder):
    synonyms = {s.unit: s for s in load_synonyms()}
    idioms = {i.idiom: i for i in load_idioms()}
    from compoeval.bridge import BackendSpec, translate_batch

    np_pairs = builder.build_npvp_suite("synthetic", "NP", 3, seed=1)
    syn = load_synonyms()[2]  # doughnut/donut
    subst_pairs = builder.build_substitutivity_suite(syn, "synthetic", 2, seed=2)
    overgen = builder.build_overgen_suite(idioms["by heart"], "synthetic", 2, seed=3)

    sources = []
    for p in np_pairs + subst_pairs:
        sources.extend([p.base_source, p.variant_source])
    sources.extend(s.source for s in overgen)
    spec = BackendSpec(kind="mock-dictionary", backend_id="small", checkpoint_label="c1")
    lookup = TranslationLookup(translate_batch(sorted(set(sources)), spec))

    results = evaluate_pairs(np_pairs + subst_pairs, lookup, synonyms=synonyms)
    # NP pairs give one result each; substitutivity two (full + synonym-only)
    assert len(results) == len(np_pairs) + 2 * len(subst_pairs)
    assert all(r.verdict for r in results)
    assert {r.training_size for r in results} == {"small"}
    assert {r.checkpoint for r in results} == {"c1"}

    over_results = evaluate_overgen(overgen, lookup, idioms)
    assert len(over_results) == len(overgen)
    assert all(r.verdict for r in over_results)  # word-for-word mock is literal


def test_translation_lookup_errors():
    from compoeval.bridge import TranslationRecord

    lookup = TranslationLookup([TranslationRecord("a", "b", "m", "c")])
    with pytest.raises(ValidationError):
        lookup["missing"]
    with pytest.raises(ValidationError):
        TranslationLookup(
            [
                TranslationRecord("a", "b", "m", "c1"),
                TranslationRecord("c", "d", "m", "c2"),
            ]
        )


def test_overgen_curve_from_results():
    results = []
    for label, rate in (("c1", 0.0), ("c2", 1.0)):
        for i in range(10):
            results.append(
                EvalResult(
                    pair_id=f"{label}-{i}",
                    verdict=i < rate * 10,
                    metric="overgeneralisation",
                    condition="idiom-context",
                    data_type="synthetic",
                    training_size="small",
                    checkpoint=label,
                    unit="by heart",
                )
            )
    curve = overgen_curve("by heart", results, ("c1", "c2"))
    assert curve.rates == (0.0, 1.0)
    with pytest.raises(ValidationError):
        overgen_curve("by heart", results, ("c1", "missing"))


def test_mock_oracle_completeness_on_all_suite_flavours(templates, semi):
    """The dictionary mock must score 1.0 on every suite flavour."""
    from compoeval.bridge import BackendSpec, translate_batch
    from compoeval.corpus import load_toy_corpus
    from compoeval.suites import SuiteBuilder

    corpus = load_toy_corpus()
    builder = SuiteBuilder(templates, semi_natural=semi, corpus=corpus)
    synonyms = {s.unit: s for s in load_synonyms()}
    whisky = next(s for s in load_synonyms() if s.british == "whisky")
    suites = [
        builder.build_npvp_suite("semi-natural", "NP", 5, seed=61),
        builder.build_conj_suite("semi-natural", "S1'", 5, seed=62),
        builder.build_conj_suite("semi-natural", "S3", 5, seed=63),
        builder.build_conj_suite(
            "natural", "S3", 2, seed=64, length_tol=8, freq_tol=10.0
        ),
        builder.build_substitutivity_suite(whisky, "semi-natural", 5, seed=65),
    ]
    spec = BackendSpec(kind="mock-dictionary")
    for pairs in suites:
        sources = sorted(
            {t for p in pairs for t in (p.base_source, p.variant_source)}
        )
        lookup = TranslationLookup(translate_batch(sources, spec))
        results = evaluate_pairs(pairs, lookup, synonyms=synonyms)
        assert all(r.verdict for r in results)


def test_flag_is_groupable_and_reported():
    from compoeval.report import aggregate

    results = [
        EvalResult(
            pair_id=f"p{i}",
            verdict=False,
            metric="consistency",
            condition="S3",
            data_type="synthetic",
            training_size="small",
            checkpoint="final",
            flag="conjunction not found" if i % 2 else None,
        )
        for i in range(4)
    ]
    table = aggregate(results, ("condition", "flag"))
    assert len(table.rows) == 2
    counts = {row.key[1]: row.count for row in table.rows}
    assert counts == {"conjunction not found": 2, None: 2}
