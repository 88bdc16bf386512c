"""Overgeneralisation across training checkpoints.

Emulates the three phases seen when models acquire idioms: first the
output is generic high-frequency babble (no keywords), then the idiom
is translated word-for-word (overgeneralisation peaks), and finally its
idiomatic translation is memorised.  Six staged checkpoints produce the
rise-and-fall curves, the phase statistics, and an SVG chart.
"""

from pathlib import Path

from compoeval import (
    MockDictionary,
    SuiteBuilder,
    TemplateSet,
    TranslationRecord,
    load_idioms,
    load_lexicon,
    plot_curves,
)
from compoeval.bridge import load_default_dictionary
from compoeval.metrics import (
    TranslationLookup,
    evaluate_overgen,
    overgen_curve,
    phase_analysis,
)

lexicon = load_lexicon()
builder = SuiteBuilder(TemplateSet(lexicon))
idioms = load_idioms()[:6]
idioms_by_name = {i.idiom: i for i in idioms}

sources = []
for k, idiom in enumerate(idioms):
    sources.extend(builder.build_overgen_suite(idiom, "synthetic", 10, seed=50 + k))
print(f"{len(sources)} overgeneralisation sources for {len(idioms)} idioms")

CHECKPOINTS = ("ck0", "ck1", "ck2", "ck3", "ck4", "ck5")


def checkpoint_translator(k):
    """Stage k of training: babble, then literal, then memorisation."""
    if k == 0:
        return lambda text: "de het een en van ."  # phase 1: frequent words only
    table = dict(load_default_dictionary())
    # phase 3 creeps in: each later checkpoint memorises two more idioms
    for idiom in idioms[: 2 * (k - 1)]:
        table[tuple(idiom.idiom.split())] = ("goed", "vertaald")
    mock = MockDictionary(table)
    return mock.translate


results = []
for k, label in enumerate(CHECKPOINTS):
    translate = checkpoint_translator(k)
    records = [
        TranslationRecord(s.source, translate(s.source), "small", label)
        for s in sources
    ]
    results.extend(evaluate_overgen(sources, TranslationLookup(records), idioms_by_name))

curves = [overgen_curve(i.idiom, results, CHECKPOINTS) for i in idioms]
print("\nper-idiom curves (rate per checkpoint):")
for curve in curves:
    rates = " ".join(f"{r:.2f}" for r in curve.rates)
    stats = phase_analysis(curve)
    print(
        f"  {curve.idiom:<22} {rates}   peak={stats['peak']:.2f} "
        f"convergence={stats['convergence']:.2f} delta={stats['delta']:.2f}"
    )

out = Path(__file__).parent / "output"
out.mkdir(exist_ok=True)
svg_path = out / "overgen_curves.svg"
svg_path.write_text(plot_curves(curves, title="Overgeneralisation during training"))
print(f"\nwrote {svg_path}")
