"""Acceptance suite: every criterion runs at its stated tolerance and
prints one PASS/FAIL line (run with ``pytest tests/test_acceptance.py -v -s``).

The heavyweight mock-oracle run (full-size suites, translated with the
dictionary mock) is built once per module and shared by the criteria
that inspect it.
"""

import functools
import math
import random
import time
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from compoeval.bridge import BackendSpec, MockDictionary, translate_batch
from compoeval.corpus import ingest_pairs
from compoeval.metrics import (
    METRIC_OVERGEN,
    TranslationLookup,
    detect_overgeneralisation,
    evaluate_overgen,
    evaluate_pairs,
    pearson,
    phase_analysis,
    token_diff,
)
from compoeval.metrics import OvergenCurve
from compoeval.report import (
    overgeneralisation_table,
    plot_curves,
    substitutivity_table,
    systematicity_table,
)
from compoeval.suites import SuiteBuilder, load_idioms, load_synonyms
from compoeval.templates import TemplateSet
from compoeval.treegen import (
    fragments_at,
    load_fragments,
    match_fragment,
    parse_bracketed,
    preorder,
    serialize,
)

from .fixture_overgen import FIXTURE
from .oracles import (
    agreement_violations,
    classify_synthetic,
    lcs_length,
    oracle_embeds,
    scan_find,
)
from .test_treegen import random_tree, sample_treebank

PER_TEMPLATE = 500
PER_UNIT = 500


def criterion(name):
    def decorate(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                print(f"ACCEPTANCE {name}: FAIL")
                raise
            print(f"ACCEPTANCE {name}: PASS")

        return wrapper

    return decorate


@pytest.fixture(scope="module")
def oracle_run(builder):
    """Full-size synthetic suites translated with the dictionary mock."""
    synonyms = load_synonyms()
    start = time.monotonic()
    suites = {
        "NP": builder.build_npvp_suite("synthetic", "NP", PER_TEMPLATE, seed=101),
        "VP": builder.build_npvp_suite("synthetic", "VP", PER_TEMPLATE, seed=102),
        "S1'": builder.build_conj_suite("synthetic", "S1'", PER_TEMPLATE, seed=103),
        "S3": builder.build_conj_suite("synthetic", "S3", PER_TEMPLATE, seed=104),
    }
    subst = []
    for i, pair_spec in enumerate(synonyms):
        subst.extend(
            builder.build_substitutivity_suite(
                pair_spec, "synthetic", PER_UNIT, seed=900 + i
            )
        )
    suites["substitutivity"] = subst

    spec = BackendSpec(kind="mock-dictionary", backend_id="mock", checkpoint_label="c0")
    synonyms_by_unit = {s.unit: s for s in synonyms}
    results = {}
    for name, pairs in suites.items():
        sources = []
        seen = set()
        for p in pairs:
            for text in (p.base_source, p.variant_source):
                if text not in seen:
                    seen.add(text)
                    sources.append(text)
        lookup = TranslationLookup(translate_batch(sources, spec))
        results[name] = evaluate_pairs(pairs, lookup, synonyms=synonyms_by_unit)
    elapsed = time.monotonic() - start
    return {"suites": suites, "results": results, "elapsed": elapsed}


@criterion("local-oracle completeness")
def test_local_oracle_completeness(oracle_run):
    for name in ("NP", "VP", "S1'", "S3"):
        assert len(oracle_run["suites"][name]) == 10 * PER_TEMPLATE
    assert len(oracle_run["suites"]["substitutivity"]) == 20 * 10 * PER_UNIT
    for name, results in oracle_run["results"].items():
        rate = sum(r.verdict for r in results) / len(results)
        assert rate == 1.0, f"{name}: consistency {rate} != 1.000"
    assert oracle_run["elapsed"] < 60.0, f"took {oracle_run['elapsed']:.1f}s"


@criterion("volatile-control calibration")
def test_volatile_control_calibration(oracle_run):
    pairs = oracle_run["suites"]["S3"]
    assert len(pairs) >= 2000
    spec = BackendSpec(
        kind="mock-volatile", backend_id="volatile", checkpoint_label="c0", salt=13
    )
    sources = sorted({t for p in pairs for t in (p.base_source, p.variant_source)})
    lookup = TranslationLookup(translate_batch(sources, spec))
    results = evaluate_pairs(pairs, lookup)
    rate = sum(r.verdict for r in results) / len(results)
    assert 0.45 <= rate <= 0.55, f"conjunct consistency {rate:.4f}"


@criterion("generation invariants")
def test_generation_invariants(builder, lexicon, oracle_run):
    templates = builder.templates
    for tid in range(1, 11):
        sentences = templates.instantiate(tid, 3000, seed=300 + tid)
        bindings = {tuple(sorted(s.binding.items())) for s in sentences}
        assert len(bindings) == 3000, f"template {tid}: duplicate bindings"
        for s in sentences:
            problems = agreement_violations(lexicon, tid, s.text)
            assert not problems, (tid, s.text, problems)
    for name in ("NP", "VP"):
        for p in oracle_run["suites"][name]:
            base, variant = p.base_source.split(), p.variant_source.split()
            assert len(base) == len(variant)
            assert sum(a != b for a, b in zip(base, variant)) == 1
    for p in oracle_run["suites"]["S3"]:
        (b_start, _), (v_start, _) = p.conjunct2_span
        first_base = p.base_source[: b_start - 5] + " ."
        first_variant = p.variant_source[: v_start - 5] + " ."
        tid_base = classify_synthetic(lexicon, first_base)
        tid_variant = classify_synthetic(lexicon, first_variant)
        assert tid_base == p.template_id
        assert tid_variant is not None and tid_variant != tid_base


@criterion("diff/metric oracles")
def test_diff_and_metric_oracles():
    rng = random.Random(424242)
    vocabulary = ["de", "het", "koning", "kind", "ziet", "en", "a", "b", "c", "d"]
    for _ in range(10_000):
        a = [rng.choice(vocabulary) for _ in range(rng.randint(0, 12))]
        b = [rng.choice(vocabulary) for _ in range(rng.randint(0, 12))]
        regions = token_diff(a, b)
        deleted = sum(r.a_end - r.a_start for r in regions)
        inserted = sum(r.b_end - r.b_start for r in regions)
        lcs = lcs_length(a, b)
        assert deleted == len(a) - lcs and inserted == len(b) - lcs

    for _ in range(100):
        n = rng.randint(2, 30)
        x = [rng.uniform(-10, 10) for _ in range(n)]
        y = [rng.uniform(-10, 10) for _ in range(n)]
        if len(set(x)) < 2 or len(set(y)) < 2:
            continue
        expected = float(np.corrcoef(x, y)[0, 1])
        assert math.isclose(pearson(x, y), expected, abs_tol=1e-12)

    assert pearson([1, 2, 3], [3, 2, 1]) == -1.0


@criterion("overgeneralisation detector fixture")
def test_overgen_detector_fixture():
    idioms = {i.idiom: i for i in load_idioms()}
    assert len(FIXTURE) == 40
    assert {name for name, _, _ in FIXTURE} == set(idioms)
    true_positives = false_positives = false_negatives = 0
    for idiom_name, target, expected in FIXTURE:
        got = detect_overgeneralisation(target, idioms[idiom_name])
        if got and expected:
            true_positives += 1
        elif got and not expected:
            false_positives += 1
        elif expected and not got:
            false_negatives += 1
    precision = true_positives / (true_positives + false_positives)
    recall = true_positives / (true_positives + false_negatives)
    assert precision == 1.0 and recall == 1.0


def _checkpointed_overgen_results(builder):
    """A tiny two-checkpoint overgeneralisation run on the mocks."""
    idioms = load_idioms()
    idioms_by_name = {i.idiom: i for i in idioms}
    sources = []
    for i, idiom in enumerate(idioms):
        sources.extend(builder.build_overgen_suite(idiom, "synthetic", 5, seed=70 + i))
    results = []
    paraphrase = {
        "c1": "hoge frequentie woorden alleen",  # nothing literal yet
    }
    for label in ("c1", "c2"):
        if label == "c1":
            rows = [
                (s.source, paraphrase["c1"]) for s in sources
            ]
        else:
            mock = MockDictionary()
            rows = [(s.source, mock.translate(s.source)) for s in sources]
        from compoeval.bridge import TranslationRecord

        lookup = TranslationLookup(
            [TranslationRecord(src, tgt, "small", label) for src, tgt in rows]
        )
        results.extend(evaluate_overgen(sources, lookup, idioms_by_name))
    return results, [i.idiom for i in idioms]


@criterion("phase analysis")
def test_phase_analysis_and_stable_table(builder):
    curve = OvergenCurve("x", ("c1", "c2", "c3", "c4"), (0.0, 0.4, 1.0, 0.3))
    out = phase_analysis(curve)
    assert out["peak"] == 1.0
    assert out["convergence"] == 0.3
    assert abs(out["delta"] - 0.7) < 1e-15

    results_a, idiom_order = _checkpointed_overgen_results(builder)
    table_a = overgeneralisation_table(results_a, idiom_order, sizes=("small",))
    results_b, _ = _checkpointed_overgen_results(builder)
    table_b = overgeneralisation_table(results_b, idiom_order, sizes=("small",))
    assert table_a.encode() == table_b.encode()


@criterion("tree toolkit")
def test_tree_toolkit():
    rng = random.Random(515151)
    for _ in range(1000):
        t = random_tree(rng)
        assert parse_bracketed(serialize(t)) == t

    for _ in range(300):
        tree = random_tree(rng, max_nodes=15)
        assert len(preorder(tree)) <= 15
        nodes = preorder(tree)
        frag_pool = []
        for node in nodes:
            if not node.terminal:
                frag_pool.extend(f for f, _ in fragments_at(node, 8)[:5])
        for frag in frag_pool:
            expected = [i for i, n in enumerate(nodes) if oracle_embeds(frag, n)]
            assert match_fragment(tree, frag) == expected

    template2 = load_fragments()[2]
    example_parse = sample_treebank()[1]
    assert match_fragment(example_parse, template2)


@criterion("corpus")
def test_corpus_acceptance():
    rng = random.Random(616161)
    words = ["alpha", "beta", "gamma", "delta", "omega", "sigma", "tau", "book"]
    pairs = []
    for i in range(10_000):
        n = rng.randint(4, 16)
        tokens = [rng.choice(words) for _ in range(n)]
        if i % 41 == 0:
            pos = rng.randrange(len(tokens))
            tokens[pos:pos] = ["by", "heart"]
        pairs.append((" ".join(tokens) + " .", f"doel {i} ."))
    corpus = ingest_pairs(pairs)
    assert len(corpus) == 10_000
    from compoeval.textutil import tokenize

    for phrase in ("by heart", "alpha beta", "omega", "missing phrase"):
        assert corpus.find_exact(phrase) == scan_find(
            corpus.records, tokenize(phrase), tokenize
        )

    planted = [
        ("s0", "uit het hoofd"),
        ("s1", "het hart klopt"),
        ("s2", "uit het hoofd geleerd"),
        ("s3", "helemaal uit het hoofd"),
        ("s4", "van buiten geleerd"),
    ]
    assert ingest_pairs(planted).literal_rate(range(5), {"hart"}) == 0.2

    def planted_corpus(n_hits, literal_fraction):
        rows = [("filler .", "vulzin .")] * 20
        n_literal = round(n_hits * literal_fraction)
        for i in range(n_hits):
            tgt = "het hart klopt" if i < n_literal else "uit het hoofd"
            rows.append((f"sentence {i} by heart inside .", tgt))
        return ingest_pairs(rows)

    admitted, count, rate = planted_corpus(240, 0.15).admits_idiom(
        "by heart", {"hart"}
    )
    assert admitted and count == 240
    admitted, count, _ = planted_corpus(120, 0.1).admits_idiom("by heart", {"hart"})
    assert not admitted  # below the occurrence threshold
    admitted, _, rate = planted_corpus(240, 0.6).admits_idiom("by heart", {"hart"})
    assert not admitted and rate > 0.2  # too literal


@criterion("reporting")
def test_reporting_shapes(builder, oracle_run):
    results = [r for rs in oracle_run["results"].values() for r in rs]
    sys_table = systematicity_table(results, sizes=("small", "medium", "full"))
    lines = sys_table.strip().split("\n")
    assert lines[0] == "data\tcondition\tsmall\tmedium\tfull"
    assert [tuple(l.split("\t")[:2]) for l in lines[1:]] == [
        ("synthetic", "NP"),
        ("synthetic", "VP"),
        ("semi-natural", "NP"),
        ("synthetic", "S1'"),
        ("synthetic", "S3"),
        ("semi-natural", "S1'"),
        ("semi-natural", "S3"),
        ("natural", "S1'"),
        ("natural", "S3"),
    ]

    subst_table = substitutivity_table(results)
    lines = subst_table.strip().split("\n")
    assert lines[0] == "data\tmetric\tsmall\tmedium\tfull"
    assert [tuple(l.split("\t")[:2]) for l in lines[1:]] == [
        ("synthetic", "consistency"),
        ("synthetic", "synonym_consistency"),
        ("semi-natural", "consistency"),
        ("semi-natural", "synonym_consistency"),
        ("natural", "consistency"),
        ("natural", "synonym_consistency"),
    ]

    overgen_results, idiom_order = _checkpointed_overgen_results(builder)
    peaks = overgeneralisation_table(overgen_results, idiom_order, sizes=("small",))
    lines = peaks.strip().split("\n")
    assert lines[0] == "data\tmodel\t" + "\t".join(idiom_order)
    assert len(lines[0].split("\t")) == 2 + 20
    assert [tuple(l.split("\t")[:2]) for l in lines[1:]] == [
        ("synthetic", "small"),
        ("semi-natural", "small"),
        ("natural", "small"),
    ]

    curves = [
        OvergenCurve(f"seed{i}", ("c1", "c2", "c3"), (0.1 * i, 0.5, 0.2 * i))
        for i in range(5)
    ]
    svg = plot_curves(curves)
    root = ET.fromstring(svg)  # strict well-formedness check
    assert len(list(root.iter("{http://www.w3.org/2000/svg}polyline"))) == 6
