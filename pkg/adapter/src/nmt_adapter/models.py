"""Checkpoint loading and the translation-model interface.

A model is anything with ``translate_batch(texts) -> list[str]``.  Two
loaders ship: a phrase-table model (TSV, greedy longest match, the
deterministic reference used in tests) and an optional Hugging Face
seq2seq loader for real checkpoints (``hf:<model-or-path>``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path


class ModelError(Exception):
    pass


@dataclass(frozen=True)
class Checkpoint:
    label: str
    path: str


@dataclass(frozen=True)
class CheckpointSet:
    """Ordered training checkpoints plus decoding parameters."""

    checkpoints: tuple
    beam_size: int = 1  # greedy by default; 5 matches the reference setup

    def __post_init__(self):
        labels = [c.label for c in self.checkpoints]
        if len(set(labels)) != len(labels):
            raise ModelError(f"checkpoint labels must be unique: {labels}")
        if self.beam_size < 1:
            raise ModelError("beam size must be >= 1")

    @classmethod
    def parse(cls, spec: str, beam_size: int = 1) -> "CheckpointSet":
        """Parse "label=path,label=path,..." in training order."""
        checkpoints = []
        for part in spec.split(","):
            part = part.strip()
            if not part:
                continue
            if "=" not in part:
                raise ModelError(f"checkpoint spec needs label=path: {part!r}")
            label, path = part.split("=", 1)
            checkpoints.append(Checkpoint(label.strip(), path.strip()))
        return cls(tuple(checkpoints), beam_size=beam_size)


_TOKEN_SPLIT = re.compile(r"([.,?!\"'])")


def _tokenize(text: str) -> list[str]:
    return _TOKEN_SPLIT.sub(r" \1 ", text).split()


class PhraseTableModel:
    """Greedy longest-match phrase translation with pass-through.

    Deterministic regardless of beam size, which makes it the reference
    model for protocol and sweep tests.
    """

    def __init__(self, table: dict[tuple, tuple]):
        self.table = table
        self.max_len = max((len(k) for k in table), default=1)

    @classmethod
    def load(cls, path) -> "PhraseTableModel":
        table = {}
        try:
            lines = Path(path).read_text(encoding="utf-8").splitlines()
        except OSError as exc:
            raise ModelError(f"cannot load phrase table {path}: {exc}")
        for lineno, raw in enumerate(lines, 1):
            line = raw.split("#", 1)[0].rstrip()
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ModelError(f"{path}:{lineno}: phrase table rows are 2 columns")
            src, tgt = parts
            table[tuple(src.lower().split())] = tuple(tgt.split())
        return cls(table)

    def translate(self, text: str) -> str:
        tokens = _tokenize(text)
        lowered = [t.lower() for t in tokens]
        out: list[str] = []
        i = 0
        while i < len(tokens):
            hit = None
            for n in range(min(self.max_len, len(tokens) - i), 0, -1):
                key = tuple(lowered[i : i + n])
                if key in self.table:
                    hit = (n, self.table[key])
                    break
            if hit is None:
                out.append(tokens[i])
                i += 1
            else:
                n, target = hit
                out.extend(target)
                i += n
        return " ".join(out)

    def translate_batch(self, texts) -> list[str]:
        return [self.translate(t) for t in texts]


class HuggingFaceModel:
    """Seq2seq checkpoint via transformers; beam size is honoured."""

    def __init__(self, name_or_path: str, beam_size: int = 1):
        try:
            from transformers import AutoModelForSeq2SeqLM, AutoTokenizer
        except ImportError as exc:  # pragma: no cover - optional dependency
            raise ModelError(f"transformers not installed: {exc}")
        try:
            self.tokenizer = AutoTokenizer.from_pretrained(name_or_path)
            self.model = AutoModelForSeq2SeqLM.from_pretrained(name_or_path)
        except Exception as exc:  # pragma: no cover - model download/load
            raise ModelError(f"cannot load model {name_or_path}: {exc}")
        self.beam_size = beam_size

    def translate_batch(self, texts) -> list[str]:  # pragma: no cover
        out = []
        for text in texts:
            inputs = self.tokenizer(text, return_tensors="pt")
            generated = self.model.generate(**inputs, num_beams=self.beam_size)
            out.append(self.tokenizer.decode(generated[0], skip_special_tokens=True))
        return out


def load_model(spec: str, beam_size: int = 1):
    """Load by scheme: ``hf:<ref>`` via transformers, ``*.tsv`` phrase table."""
    if spec.startswith("hf:"):
        return HuggingFaceModel(spec[3:], beam_size=beam_size)
    if spec.endswith(".tsv"):
        return PhraseTableModel.load(spec)
    raise ModelError(
        f"unknown model spec {spec!r}: expected 'hf:<name-or-path>' or a .tsv "
        f"phrase table"
    )
