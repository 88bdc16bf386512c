"""Command-line interface.

Subcommands: generate, perturb, suite, translate, evaluate, report,
pipeline, corpus.  Exit codes: 0 success, 1 validation/usage error,
2 backend or protocol error.  A ``--config`` file supplies defaults as
flat ``key=value`` lines; explicit flags win.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

from . import bridge, corpus as corpus_mod, metrics, records, report
from .errors import BackendError, CompoevalError, ValidationError
from .lexicon import load_lexicon
from .suites import (
    COND_NP,
    COND_S1PRIME,
    COND_S3,
    COND_VP,
    RANDOM_CONTEXT,
    SEMI_NATURAL,
    SYNTHETIC,
    SuiteBuilder,
    load_idioms,
    load_synonyms,
)
from .templates import TemplateSet, load_templates
from .treegen import SemiNaturalGenerator, load_fillers


def _parse_config(path) -> dict:
    """Flat key=value config; '#' starts a comment, values keep spaces."""
    config = {}
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"config line is not key=value: {raw!r}")
        key, value = line.split("=", 1)
        config[key.strip().replace("-", "_")] = value.strip().strip('"')
    return config


def _resolve(args, config, key, default=None, cast=None):
    value = getattr(args, key, None)
    if value is None:
        value = config.get(key, default)
    if value is not None and cast is not None:
        value = cast(value)
    return value


def _builder(args, config) -> SuiteBuilder:
    lexicon = load_lexicon(_resolve(args, config, "lexicon"))
    templates = TemplateSet(lexicon, load_templates(_resolve(args, config, "templates")))
    fillers_path = _resolve(args, config, "fillers")
    semi = SemiNaturalGenerator(lexicon, load_fillers(fillers_path))
    corpus = None
    source = _resolve(args, config, "corpus_source")
    target = _resolve(args, config, "corpus_target")
    if source and target:
        corpus = corpus_mod.ingest(source, target)
    return SuiteBuilder(templates, semi_natural=semi, corpus=corpus)


def _backend_spec(args, config) -> bridge.BackendSpec:
    kind = _resolve(args, config, "backend", bridge.KIND_MOCK_DICTIONARY)
    endpoint = bridge.resolve_endpoint(_resolve(args, config, "endpoint"))
    return bridge.BackendSpec(
        kind=kind,
        endpoint=endpoint if kind == bridge.KIND_HTTP else None,
        exchange_dir=_resolve(args, config, "exchange_dir"),
        batch_size=_resolve(args, config, "batch_size", 64, int),
        backend_id=_resolve(args, config, "label", kind),
        checkpoint_label=_resolve(args, config, "checkpoint", "final"),
        salt=_resolve(args, config, "salt", 0, int),
        timeout=_resolve(args, config, "timeout", 60.0, float),
    )


def _suite_sources(dicts) -> list[str]:
    """Ordered unique source sentences from any record stream."""
    out = []
    seen = set()

    def push(text):
        if text not in seen:
            seen.add(text)
            out.append(text)

    for d in dicts:
        if "base_source" in d:
            push(d["base_source"])
            push(d["variant_source"])
        elif "source" in d:
            push(d["source"])
        elif "text" in d:
            push(d["text"])
        else:
            raise ValidationError(f"record has no source text: {sorted(d)}")
    return out


def _sha256(path) -> str:
    digest = hashlib.sha256()
    digest.update(Path(path).read_bytes())
    return digest.hexdigest()


# --- subcommands ------------------------------------------------------------


def cmd_generate(args, config):
    seed = _resolve(args, config, "seed", 0, int)
    builder = _builder(args, config)
    kind = args.kind
    tids = [args.template] if args.template else sorted(builder.templates.templates)
    rows = []
    for tid in tids:
        if kind == SYNTHETIC:
            sentences = builder.templates.instantiate(tid, args.count, seed + tid)
        else:
            sentences = builder.semi_natural.instantiate(tid, args.count, seed + tid)
        rows.extend(records.sentence_to_dict(s) for s in sentences)
    records.write_jsonl(args.out, rows)
    print(f"wrote {len(rows)} sentences to {args.out}")
    return 0


def cmd_perturb(args, config):
    seed = _resolve(args, config, "seed", 0, int)
    builder = _builder(args, config)
    rows = records.read_jsonl(args.infile)
    out = []
    for i, d in enumerate(rows):
        s = records.sentence_from_dict(d)
        if args.op == "np":
            p = builder.templates.perturb_np(s, seed + i)
        elif args.op == "vp":
            p = builder.templates.perturb_vp(s, seed + i)
        else:
            p = builder.semi_natural.perturb_person(s, seed + i)
        out.append(records.sentence_to_dict(p))
    records.write_jsonl(args.out, out)
    print(f"wrote {len(out)} perturbed sentences to {args.out}")
    return 0


def _build_suite(args, config):
    seed = _resolve(args, config, "seed", 0, int)
    builder = _builder(args, config)
    dicts = []
    if args.suite == "npvp":
        pairs = builder.build_npvp_suite(
            args.data_type, args.condition, args.per_template, seed
        )
        dicts = [records.pair_to_dict(p) for p in pairs]
    elif args.suite == "conj":
        pairs = builder.build_conj_suite(
            args.data_type, args.condition, args.per_template, seed
        )
        dicts = [records.pair_to_dict(p) for p in pairs]
    elif args.suite == "substitutivity":
        synonyms = load_synonyms(_resolve(args, config, "synonyms"))
        if args.unit:
            synonyms = [s for s in synonyms if args.unit in (s.british, s.american)]
            if not synonyms:
                raise ValidationError(f"unknown synonym {args.unit!r}")
        for pair_spec in synonyms:
            pairs = builder.build_substitutivity_suite(
                pair_spec, args.data_type, args.per_unit, seed
            )
            dicts.extend(records.pair_to_dict(p) for p in pairs)
    elif args.suite == "overgen":
        idioms = load_idioms(_resolve(args, config, "idioms"))
        if args.unit:
            idioms = [i for i in idioms if i.idiom == args.unit]
            if not idioms:
                raise ValidationError(f"unknown idiom {args.unit!r}")
        for idiom in idioms:
            sources = builder.build_overgen_suite(
                idiom, args.data_type, args.per_unit, seed
            )
            dicts.extend(records.overgen_to_dict(s) for s in sources)
    else:
        raise ValidationError(f"unknown suite {args.suite!r}")
    return dicts


def cmd_suite(args, config):
    dicts = _build_suite(args, config)
    records.write_jsonl(args.out, dicts)
    print(f"wrote {len(dicts)} suite records to {args.out}")
    if args.sources_out:
        sources = _suite_sources(dicts)
        Path(args.sources_out).write_text(
            "".join(s + "\n" for s in sources), encoding="utf-8"
        )
        print(f"wrote {len(sources)} unique sources to {args.sources_out}")
    return 0


def cmd_translate(args, config):
    spec = _backend_spec(args, config)
    if args.plain:
        sources = Path(args.infile).read_text(encoding="utf-8").splitlines()
    else:
        sources = _suite_sources(records.read_jsonl(args.infile))
    out = bridge.translate_batch(sources, spec)
    records.write_jsonl(args.out, [records.translation_to_dict(r) for r in out])
    print(f"wrote {len(out)} translations to {args.out}")
    return 0


def cmd_evaluate(args, config):
    pairs, overgen_sources = records.read_suite(args.suite)
    if args.translations:
        translation_rows = [
            records.translation_from_dict(d)
            for d in records.read_jsonl(args.translations)
        ]
    elif args.hyp and args.sources:
        source_lines = Path(args.sources).read_text(encoding="utf-8").splitlines()
        hyp_lines = Path(args.hyp).read_text(encoding="utf-8").splitlines()
        if len(source_lines) != len(hyp_lines):
            raise ValidationError(
                f"{len(source_lines)} sources but {len(hyp_lines)} hypotheses"
            )
        backend_id = _resolve(args, config, "label", "backend")
        checkpoint = _resolve(args, config, "checkpoint", "final")
        translation_rows = [
            bridge.TranslationRecord(s, h, backend_id, checkpoint)
            for s, h in zip(source_lines, hyp_lines)
        ]
    else:
        raise ValidationError("evaluate needs --translations or --sources/--hyp")
    lookup = metrics.TranslationLookup(translation_rows)
    synonyms = {s.unit: s for s in load_synonyms(_resolve(args, config, "synonyms"))}
    idioms = {i.idiom: i for i in load_idioms(_resolve(args, config, "idioms"))}
    results = []
    if pairs:
        results.extend(
            metrics.evaluate_pairs(
                pairs, lookup, synonyms=synonyms, training_size=args.training_size
            )
        )
    if overgen_sources:
        results.extend(
            metrics.evaluate_overgen(
                overgen_sources, lookup, idioms, training_size=args.training_size
            )
        )
    mode = "a" if args.append else "w"
    with open(args.out, mode, encoding="utf-8") as fh:
        for r in results:
            fh.write(json.dumps(records.result_to_dict(r), ensure_ascii=False) + "\n")
    consistent = sum(r.verdict for r in results)
    flagged = sum(1 for r in results if r.flag)
    note = f", {flagged} flagged" if flagged else ""
    print(
        f"evaluated {len(results)} results ({consistent} positive{note}) -> {args.out}"
    )
    return 0


def cmd_report(args, config):
    results = [records.result_from_dict(d) for d in records.read_jsonl(args.results)]
    if not results:
        raise ValidationError(f"no results in {args.results}")
    shape = args.shape
    if shape == "systematicity":
        Path(args.out).write_text(report.systematicity_table(results), encoding="utf-8")
    elif shape == "substitutivity":
        Path(args.out).write_text(
            report.substitutivity_table(results), encoding="utf-8"
        )
    elif shape == "overgen":
        idiom_order = [i.idiom for i in load_idioms(_resolve(args, config, "idioms"))]
        Path(args.out).write_text(
            report.overgeneralisation_table(results, idiom_order), encoding="utf-8"
        )
    elif shape == "curves":
        order = []
        for r in results:
            if r.checkpoint not in order:
                order.append(r.checkpoint)
        idioms = sorted({r.unit for r in results if r.unit})
        curves = [metrics.overgen_curve(i, results, order) for i in idioms]
        Path(args.out).write_text(report.plot_curves(curves), encoding="utf-8")
    else:
        group_by = [k.strip() for k in args.group_by.split(",") if k.strip()]
        table = report.aggregate(results, group_by)
        report.emit(table, args.format, args.out)
    print(f"wrote report to {args.out}")
    return 0


def cmd_corpus(args, config):
    corpus = corpus_mod.ingest(args.source, args.target)
    ids = corpus.find_exact(args.phrase)
    for rid in ids:
        src, tgt = corpus.records[rid]
        print(f"{rid}\t{src}\t{tgt}")
    print(f"# {len(ids)} matches", file=sys.stderr)
    return 0


def cmd_pipeline(args, config):
    seed = _resolve(args, config, "seed", 0, int)
    run_dir = Path(args.out_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    builder = _builder(args, config)
    spec = _backend_spec(args, config)
    per_template = args.per_template
    per_unit = args.per_unit

    suites: dict[str, list] = {}
    suites["npvp-NP"] = [
        records.pair_to_dict(p)
        for p in builder.build_npvp_suite(SYNTHETIC, COND_NP, per_template, seed)
    ]
    suites["npvp-VP"] = [
        records.pair_to_dict(p)
        for p in builder.build_npvp_suite(SYNTHETIC, COND_VP, per_template, seed + 1)
    ]
    suites["conj-S1"] = [
        records.pair_to_dict(p)
        for p in builder.build_conj_suite(SYNTHETIC, COND_S1PRIME, per_template, seed + 2)
    ]
    suites["conj-S3"] = [
        records.pair_to_dict(p)
        for p in builder.build_conj_suite(SYNTHETIC, COND_S3, per_template, seed + 3)
    ]
    synonyms = load_synonyms(_resolve(args, config, "synonyms"))
    subst = []
    for i, pair_spec in enumerate(synonyms):
        subst.extend(
            records.pair_to_dict(p)
            for p in builder.build_substitutivity_suite(
                pair_spec, SYNTHETIC, per_unit, seed + 10 + i
            )
        )
    suites["substitutivity"] = subst
    idioms = load_idioms(_resolve(args, config, "idioms"))
    overgen = []
    for i, idiom in enumerate(idioms):
        overgen.extend(
            records.overgen_to_dict(s)
            for s in builder.build_overgen_suite(
                idiom, SYNTHETIC, per_unit, seed + 100 + i
            )
        )
    suites["overgen"] = overgen

    synonyms_by_unit = {s.unit: s for s in synonyms}
    idioms_by_name = {i.idiom: i for i in idioms}
    all_results = []
    for name, dicts in suites.items():
        suite_path = run_dir / f"suite-{name}.jsonl"
        records.write_jsonl(suite_path, dicts)
        sources = _suite_sources(dicts)
        translations = bridge.translate_batch(sources, spec)
        records.write_jsonl(
            run_dir / f"translations-{name}.jsonl",
            [records.translation_to_dict(r) for r in translations],
        )
        lookup = metrics.TranslationLookup(translations)
        pairs, overgen_sources = [], []
        for d in dicts:
            record = records.suite_record_from_dict(d)
            (pairs if hasattr(record, "pair_id") else overgen_sources).append(record)
        if pairs:
            all_results.extend(
                metrics.evaluate_pairs(pairs, lookup, synonyms=synonyms_by_unit)
            )
        if overgen_sources:
            all_results.extend(
                metrics.evaluate_overgen(overgen_sources, lookup, idioms_by_name)
            )
    records.write_jsonl(
        run_dir / "results.jsonl", [records.result_to_dict(r) for r in all_results]
    )
    (run_dir / "systematicity.tsv").write_text(
        report.systematicity_table(all_results, sizes=(spec.backend_id,)),
        encoding="utf-8",
    )
    (run_dir / "substitutivity.tsv").write_text(
        report.substitutivity_table(all_results, sizes=(spec.backend_id,)),
        encoding="utf-8",
    )
    (run_dir / "overgeneralisation.tsv").write_text(
        report.overgeneralisation_table(
            all_results, [i.idiom for i in idioms], sizes=(spec.backend_id,)
        ),
        encoding="utf-8",
    )
    summary = report.aggregate(all_results, ("condition", "data_type", "metric"))
    report.emit(summary, "tsv", run_dir / "summary.tsv")

    data_dir = Path(__file__).parent / "data"
    manifest = {
        "command": "pipeline",
        "seed": seed,
        "backend": spec.kind,
        "per_template": per_template,
        "per_unit": per_unit,
        "config": config,
        "inputs": {
            p.name: _sha256(p) for p in sorted(data_dir.iterdir()) if p.is_file()
        },
        "suites": {name: len(dicts) for name, dicts in suites.items()},
        "results": len(all_results),
    }
    (run_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(f"pipeline complete: {run_dir}")
    return 0


# --- parser -----------------------------------------------------------------


def _add_common(parser):
    parser.add_argument("--seed", type=int, default=None, help="master random seed")
    parser.add_argument("--config", default=None, help="key=value config file")
    parser.add_argument("--jobs", type=int, default=None, help="worker count")
    parser.add_argument("--lexicon", default=None, help="lexicon TSV path")
    parser.add_argument("--templates", default=None, help="template file path")
    parser.add_argument("--fillers", default=None, help="semi-natural filler file")
    parser.add_argument("--synonyms", default=None, help="synonym table path")
    parser.add_argument("--idioms", default=None, help="idiom table path")
    parser.add_argument("--corpus-source", default=None, help="corpus source file")
    parser.add_argument("--corpus-target", default=None, help="corpus target file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="compoeval",
        description="Compositionality test suites and consistency metrics for MT",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="instantiate template sentences")
    p.add_argument("--kind", choices=(SYNTHETIC, SEMI_NATURAL), default=SYNTHETIC)
    p.add_argument("--template", type=int, default=None)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("perturb", help="apply a slot perturbation to sentences")
    p.add_argument("--op", choices=("np", "vp", "person"), required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_perturb)

    p = sub.add_parser("suite", help="build a test suite")
    p.add_argument("suite", choices=("npvp", "conj", "substitutivity", "overgen"))
    p.add_argument("--data-type", default=SYNTHETIC)
    p.add_argument(
        "--condition",
        default=None,
        help=f"npvp: {COND_NP}|{COND_VP}; conj: {COND_S1PRIME}|{COND_S3}",
    )
    p.add_argument("--per-template", type=int, default=500)
    p.add_argument("--per-unit", type=int, default=500)
    p.add_argument("--unit", default=None, help="restrict to one synonym/idiom")
    p.add_argument("--out", required=True)
    p.add_argument("--sources-out", default=None)
    _add_common(p)
    p.set_defaults(func=cmd_suite)

    p = sub.add_parser("translate", help="translate suite sources via a backend")
    p.add_argument("--backend", choices=bridge._KINDS, default=None)
    p.add_argument("--endpoint", default=None)
    p.add_argument("--dir", dest="exchange_dir", default=None)
    p.add_argument("--batch-size", type=int, default=None)
    p.add_argument("--label", default=None, help="backend/training-size label")
    p.add_argument("--checkpoint", default=None)
    p.add_argument("--salt", type=int, default=None)
    p.add_argument("--timeout", type=float, default=None)
    p.add_argument("--plain", action="store_true", help="input is plain text lines")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("evaluate", help="score translations against a suite")
    p.add_argument("--suite", required=True)
    p.add_argument("--translations", default=None)
    p.add_argument("--sources", default=None, help="plain sources (with --hyp)")
    p.add_argument("--hyp", default=None, help="plain hypotheses (with --sources)")
    p.add_argument("--label", default=None)
    p.add_argument("--checkpoint", default=None)
    p.add_argument("--training-size", default=None)
    p.add_argument("--append", action="store_true")
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("report", help="aggregate results into tables or charts")
    p.add_argument("--results", required=True)
    p.add_argument(
        "--shape",
        choices=("systematicity", "substitutivity", "overgen", "curves"),
        default=None,
    )
    p.add_argument("--group-by", default="condition,data_type")
    p.add_argument("--format", choices=report.FORMATS, default="tsv")
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("corpus", help="exact-match search over a parallel corpus")
    p.add_argument("--source", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("phrase")
    _add_common(p)
    p.set_defaults(func=cmd_corpus)

    p = sub.add_parser("pipeline", help="suites + mock translation + reports")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--backend", choices=bridge._KINDS, default=None)
    p.add_argument("--endpoint", default=None)
    p.add_argument("--dir", dest="exchange_dir", default=None)
    p.add_argument("--batch-size", type=int, default=None)
    p.add_argument("--label", default=None)
    p.add_argument("--checkpoint", default=None)
    p.add_argument("--salt", type=int, default=None)
    p.add_argument("--timeout", type=float, default=None)
    p.add_argument("--per-template", type=int, default=50)
    p.add_argument("--per-unit", type=int, default=20)
    _add_common(p)
    p.set_defaults(func=cmd_pipeline)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage problems; that code is reserved for
        # backend errors here.
        return 0 if exc.code in (0, None) else 1
    config = _parse_config(args.config) if getattr(args, "config", None) else {}
    try:
        return args.func(args, config)
    except BackendError as exc:
        print(f"backend error: {exc}", file=sys.stderr)
        return 2
    except CompoevalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
