"""Building the three test suites and scoring them with the mock
translators.

The dictionary mock is a perfectly local translator, so every
consistency score comes out at 1.0: it is the oracle that calibrates
the metrics.  The volatile mock flips one word based on a hash of the
whole input and lands near 0.5 on the conjunction test, the negative
control."""

from compoeval import (
    BackendSpec,
    SuiteBuilder,
    TemplateSet,
    load_idioms,
    load_lexicon,
    load_synonyms,
    translate_batch,
)
from compoeval.metrics import TranslationLookup, evaluate_overgen, evaluate_pairs
from compoeval.report import aggregate
from compoeval.treegen import SemiNaturalGenerator

lexicon = load_lexicon()
builder = SuiteBuilder(
    TemplateSet(lexicon), semi_natural=SemiNaturalGenerator(lexicon)
)
synonyms = {s.unit: s for s in load_synonyms()}
idioms = {i.idiom: i for i in load_idioms()}

suites = {
    "NP -> NP'": builder.build_npvp_suite("synthetic", "NP", 25, seed=1),
    "VP -> VP'": builder.build_npvp_suite("synthetic", "VP", 25, seed=2),
    "S1 -> S1'": builder.build_conj_suite("synthetic", "S1'", 25, seed=3),
    "S1 -> S3": builder.build_conj_suite("synthetic", "S3", 25, seed=4),
}
doughnut = next(s for s in load_synonyms() if s.british == "doughnut")
suites["substitutivity"] = builder.build_substitutivity_suite(
    doughnut, "synthetic", 25, seed=5
)

print("sample pairs:")
for name, pairs in suites.items():
    print(f"  {name}:")
    print(f"    base:    {pairs[0].base_source}")
    print(f"    variant: {pairs[0].variant_source}")


def score(pairs, backend):
    sources = sorted({t for p in pairs for t in (p.base_source, p.variant_source)})
    lookup = TranslationLookup(translate_batch(sources, backend))
    results = evaluate_pairs(pairs, lookup, synonyms=synonyms)
    return sum(r.verdict for r in results) / len(results)


mock = BackendSpec(kind="mock-dictionary", backend_id="dictionary")
volatile = BackendSpec(kind="mock-volatile", backend_id="volatile", salt=11)

print("\nconsistency per suite:")
print(f"  {'suite':<16} {'dictionary':>10} {'volatile':>10}")
for name, pairs in suites.items():
    print(f"  {name:<16} {score(pairs, mock):>10.3f} {score(pairs, volatile):>10.3f}")

# Overgeneralisation under the dictionary mock: a word-for-word
# translator copies or literally translates every idiom keyword.
sources = []
for idiom in list(idioms.values())[:5]:
    sources.extend(builder.build_overgen_suite(idiom, "synthetic", 5, seed=6))
lookup = TranslationLookup(
    translate_batch(sorted({s.source for s in sources}), mock)
)
results = evaluate_overgen(sources, lookup, idioms)
table = aggregate(results, ("unit",))
print("\novergeneralisation rate per idiom (dictionary mock):")
for row in table.rows:
    print(f"  {row.key[0]:<24} {row.value:.2f}  (n={row.count})")
