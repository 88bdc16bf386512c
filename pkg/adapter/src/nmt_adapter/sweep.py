"""Multi-checkpoint sweeps: translate one suite with every checkpoint.

Writes one hypothesis file per checkpoint (named ``<label>.hyp.txt``,
one translation per source line) plus a manifest listing the files in
training order, ready for per-checkpoint evaluation and
overgeneralisation curves downstream.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

from .models import CheckpointSet, ModelError, load_model


def read_sources(suite_path) -> list[str]:
    """Source sentences from a suite JSONL file or plain text lines.

    Understands the toolkit's suite records (``base_source`` +
    ``variant_source`` pairs, or single ``source`` / ``text`` records)
    and deduplicates while preserving order, matching the toolkit's own
    source extraction.
    """
    lines = Path(suite_path).read_text(encoding="utf-8").splitlines()
    sources: list[str] = []
    seen = set()

    def push(text):
        if text not in seen:
            seen.add(text)
            sources.append(text)

    for line in lines:
        line = line.strip()
        if not line:
            continue
        if line.startswith("{"):
            record = json.loads(line)
            if "base_source" in record:
                push(record["base_source"])
                push(record["variant_source"])
            elif "source" in record:
                push(record["source"])
            elif "text" in record:
                push(record["text"])
            else:
                raise ModelError(f"suite record has no source field: {sorted(record)}")
        else:
            push(line)
    return sources


def sweep(checkpoints: CheckpointSet, suite_path, out_dir) -> dict:
    """Translate the suite with every checkpoint; returns the manifest."""
    if not checkpoints.checkpoints:
        raise ModelError("no checkpoints given")
    sources = read_sources(suite_path)
    if not sources:
        raise ModelError(f"no sources found in {suite_path}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    src_path = out / "sources.txt"
    src_path.write_text("".join(s + "\n" for s in sources), encoding="utf-8")
    manifest = {
        "suite": str(suite_path),
        "sources": src_path.name,
        "source_count": len(sources),
        "beam_size": checkpoints.beam_size,
        "checkpoints": [],
        "skipped": [],
    }
    for ckpt in checkpoints.checkpoints:
        try:
            model = load_model(ckpt.path, beam_size=checkpoints.beam_size)
        except ModelError as exc:
            print(f"warning: skipping checkpoint {ckpt.label}: {exc}", file=sys.stderr)
            manifest["skipped"].append({"label": ckpt.label, "reason": str(exc)})
            continue
        translations = model.translate_batch(sources)
        if len(translations) != len(sources):
            raise ModelError(
                f"checkpoint {ckpt.label} returned {len(translations)} translations "
                f"for {len(sources)} sources"
            )
        hyp_path = out / f"{ckpt.label}.hyp.txt"
        hyp_path.write_text(
            "".join(t + "\n" for t in translations), encoding="utf-8"
        )
        manifest["checkpoints"].append({"label": ckpt.label, "file": hyp_path.name})
    (out / "manifest.json").write_text(
        json.dumps(manifest, indent=2) + "\n", encoding="utf-8"
    )
    return manifest
