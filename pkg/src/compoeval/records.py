"""JSONL serialization for the toolkit's record types."""

from __future__ import annotations

import json
from pathlib import Path

from .bridge import TranslationRecord
from .errors import ValidationError
from .metrics import EvalResult
from .suites import OvergenSource, TestPair
from .templates import BoundSentence


def write_jsonl(path, dicts) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for d in dicts:
            fh.write(json.dumps(d, ensure_ascii=False) + "\n")


def read_jsonl(path) -> list[dict]:
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            out.append(json.loads(line))
    return out


def sentence_to_dict(s: BoundSentence) -> dict:
    return {
        "template_id": s.template_id,
        "binding": {str(k): v for k, v in s.binding.items()},
        "text": s.text,
    }


def sentence_from_dict(d: dict) -> BoundSentence:
    return BoundSentence(
        template_id=d["template_id"],
        binding={int(k): v for k, v in d["binding"].items()},
        text=d["text"],
    )


def pair_to_dict(p: TestPair) -> dict:
    d = {
        "id": p.pair_id,
        "base_source": p.base_source,
        "variant_source": p.variant_source,
        "condition": p.condition,
        "data_type": p.data_type,
        "template_id": p.template_id,
        "unit": p.unit,
    }
    if p.conjunct2_span is not None:
        d["conjunct2_span"] = [list(span) for span in p.conjunct2_span]
    return d


def overgen_to_dict(s: OvergenSource) -> dict:
    return {
        "id": s.source_id,
        "source": s.source,
        "condition": s.condition,
        "data_type": s.data_type,
        "template_id": s.template_id,
        "unit": s.unit,
    }


def suite_record_from_dict(d: dict):
    """A TestPair or an OvergenSource, depending on the record shape."""
    if "variant_source" in d:
        span = d.get("conjunct2_span")
        return TestPair(
            pair_id=d["id"],
            base_source=d["base_source"],
            variant_source=d["variant_source"],
            condition=d["condition"],
            data_type=d["data_type"],
            template_id=d.get("template_id"),
            unit=d.get("unit"),
            conjunct2_span=tuple(tuple(s) for s in span) if span else None,
        )
    if "source" in d:
        return OvergenSource(
            source_id=d["id"],
            source=d["source"],
            condition=d["condition"],
            data_type=d["data_type"],
            template_id=d.get("template_id"),
            unit=d["unit"],
        )
    raise ValidationError(f"not a suite record: {sorted(d)}")


def read_suite(path) -> tuple[list[TestPair], list[OvergenSource]]:
    pairs, sources = [], []
    for d in read_jsonl(path):
        record = suite_record_from_dict(d)
        if isinstance(record, TestPair):
            pairs.append(record)
        else:
            sources.append(record)
    return pairs, sources


def translation_to_dict(r: TranslationRecord) -> dict:
    return {
        "source": r.source,
        "target": r.target,
        "backend": r.backend,
        "checkpoint": r.checkpoint,
    }


def translation_from_dict(d: dict) -> TranslationRecord:
    return TranslationRecord(
        source=d["source"],
        target=d["target"],
        backend=d.get("backend", "backend"),
        checkpoint=d.get("checkpoint", "final"),
    )


def result_to_dict(r: EvalResult) -> dict:
    return {
        "pair_id": r.pair_id,
        "verdict": r.verdict,
        "metric": r.metric,
        "condition": r.condition,
        "data_type": r.data_type,
        "training_size": r.training_size,
        "checkpoint": r.checkpoint,
        "template_id": r.template_id,
        "unit": r.unit,
        "flag": r.flag,
    }


def result_from_dict(d: dict) -> EvalResult:
    return EvalResult(
        pair_id=d["pair_id"],
        verdict=bool(d["verdict"]),
        metric=d["metric"],
        condition=d["condition"],
        data_type=d["data_type"],
        training_size=d["training_size"],
        checkpoint=d["checkpoint"],
        template_id=d.get("template_id"),
        unit=d.get("unit"),
        flag=d.get("flag"),
    )
