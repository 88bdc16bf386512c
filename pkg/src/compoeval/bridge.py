"""Uniform interface to translation backends.

Backends are order- and count-preserving batch translators: the built-in
mocks (a deterministic phrase-table translator and a volatile variant
that flips one word on a source-hash bit), an HTTP client speaking
``POST /translate`` with ``{"texts": [...]} -> {"translations": [...]}``,
and a file-exchange mode where sources are written to ``<dir>/src.txt``
and hypotheses polled from ``<dir>/hyp.txt``.

The mocks are pure functions and safe to call concurrently; HTTP batches
are reassembled in order.
"""

from __future__ import annotations

import functools
import hashlib
import importlib.resources
import os
import time
from dataclasses import dataclass, field
from pathlib import Path

import requests

from .errors import BackendError, ProtocolError, ValidationError
from .textutil import tokenize

ENDPOINT_ENV_VAR = "COMPOEVAL_MT_ENDPOINT"

KIND_FILE = "file"
KIND_HTTP = "http"
KIND_MOCK_DICTIONARY = "mock-dictionary"
KIND_MOCK_VOLATILE = "mock-volatile"
_KINDS = (KIND_FILE, KIND_HTTP, KIND_MOCK_DICTIONARY, KIND_MOCK_VOLATILE)


@dataclass(frozen=True)
class BackendSpec:
    kind: str
    endpoint: str | None = None
    exchange_dir: str | None = None
    batch_size: int = 64
    backend_id: str = "backend"
    checkpoint_label: str = "final"
    retries: int = 3
    salt: int = 0  # mock-volatile only
    timeout: float = 60.0  # file-mode polling limit, seconds

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValidationError(f"unknown backend kind {self.kind!r}")
        if self.batch_size < 1:
            raise ValidationError("batch_size must be >= 1")
        if (self.kind == KIND_HTTP) != (self.endpoint is not None):
            raise ValidationError("endpoint must be given iff kind is http")
        if self.kind == KIND_FILE and not self.exchange_dir:
            raise ValidationError("file backend needs an exchange directory")


@dataclass(frozen=True)
class TranslationRecord:
    source: str
    target: str
    backend: str
    checkpoint: str


class MockDictionary:
    """Strictly local translator: a phrase table applied greedily
    left-to-right with longest-match lookup and pass-through for unknown
    tokens.  Serves as the compositional oracle in the metric tests."""

    def __init__(self, table: dict[tuple, tuple] | None = None):
        if table is None:
            table = _default_dictionary()
        self.table = table
        self.max_len = max((len(k) for k in table), default=1)

    def translate(self, source: str) -> str:
        tokens = tokenize(source)
        lowered = [t.lower() for t in tokens]
        out: list[str] = []
        i = 0
        while i < len(tokens):
            match = None
            for n in range(min(self.max_len, len(tokens) - i), 0, -1):
                key = tuple(lowered[i : i + n])
                if key in self.table:
                    match = (n, self.table[key])
                    break
            if match is None:
                out.append(tokens[i])
                i += 1
            else:
                n, target = match
                out.extend(target)
                i += n
        text = " ".join(out)
        if text and source[:1].isupper():
            text = text[0].upper() + text[1:]
        return text


class MockVolatile:
    """The dictionary translator with simulated erratic behaviour: one
    target word is swapped for a synonym whenever a hash bit of the whole
    source (plus a salt) is odd.  Deterministic per source, yet sensitive
    to changes anywhere in the input, which makes it a negative control
    for the consistency metrics."""

    def __init__(self, salt: int = 0, swap: tuple[str, str] = ("de", "deze"), table=None):
        self.dictionary = MockDictionary(table)
        self.salt = salt
        self.swap = swap

    def _bit(self, source: str) -> int:
        digest = hashlib.sha256(f"{self.salt}\x00{source}".encode("utf-8")).digest()
        return digest[-1] & 1

    def translate(self, source: str) -> str:
        text = self.dictionary.translate(source)
        if self._bit(source):
            old, new = self.swap
            text = " ".join(new if t == old else t for t in text.split())
        return text


@functools.lru_cache(maxsize=1)
def _default_dictionary() -> dict[tuple, tuple]:
    ref = importlib.resources.files("compoeval.data") / "mock_dictionary.tsv"
    return parse_dictionary(ref.read_text(encoding="utf-8").splitlines())


def load_default_dictionary() -> dict[tuple, tuple]:
    return dict(_default_dictionary())


def mock_dictionary(source: str) -> str:
    """Translate one sentence with the shipped dictionary table."""
    return MockDictionary(_default_dictionary()).translate(source)


def mock_volatile(source: str, salt: int = 0) -> str:
    """Translate one sentence with the hash-flipping volatile mock."""
    return MockVolatile(salt=salt, table=_default_dictionary()).translate(source)


def parse_dictionary(lines) -> dict[tuple, tuple]:
    table = {}
    for raw in lines:
        line = raw.split("#", 1)[0].rstrip()
        if not line:
            continue
        try:
            src, tgt = line.split("\t")
        except ValueError:
            raise ValidationError(f"dictionary line needs 2 columns: {raw!r}")
        table[tuple(src.lower().split())] = tuple(tgt.split())
    return table


def _translate_http(sources, spec: BackendSpec) -> list[str]:
    url = spec.endpoint.rstrip("/") + "/translate"
    out: list[str] = []
    for start in range(0, len(sources), spec.batch_size):
        batch = sources[start : start + spec.batch_size]
        payload = {"texts": batch}
        last_error = None
        for attempt in range(spec.retries + 1):
            try:
                resp = requests.post(url, json=payload, timeout=spec.timeout)
            except requests.RequestException as exc:
                last_error = exc
                time.sleep(min(0.2 * (attempt + 1), 2.0))
                continue
            if resp.status_code >= 500:
                last_error = BackendError(f"server error {resp.status_code}")
                time.sleep(min(0.2 * (attempt + 1), 2.0))
                continue
            if resp.status_code != 200:
                raise ProtocolError(
                    f"backend returned HTTP {resp.status_code}: {resp.text[:200]}"
                )
            try:
                translations = resp.json()["translations"]
            except (ValueError, KeyError):
                raise ProtocolError("malformed response: no 'translations' field")
            if not isinstance(translations, list) or len(translations) != len(batch):
                raise ProtocolError(
                    f"protocol error: sent {len(batch)} texts, "
                    f"received {len(translations) if isinstance(translations, list) else '?'}"
                )
            out.extend(str(t) for t in translations)
            break
        else:
            raise BackendError(f"backend unreachable after {spec.retries + 1} attempts: {last_error}")
    return out


def _translate_file(sources, spec: BackendSpec) -> list[str]:
    exchange = Path(spec.exchange_dir)
    exchange.mkdir(parents=True, exist_ok=True)
    src_path = exchange / "src.txt"
    hyp_path = exchange / "hyp.txt"
    if hyp_path.exists():
        hyp_path.unlink()
    src_path.write_text("".join(s + "\n" for s in sources), encoding="utf-8")
    deadline = time.monotonic() + spec.timeout
    while True:
        if hyp_path.exists():
            lines = hyp_path.read_text(encoding="utf-8").splitlines()
            if len(lines) == len(sources):
                return lines
            if len(lines) > len(sources):
                raise ProtocolError(
                    f"protocol error: {len(sources)} sources but {len(lines)} hypotheses"
                )
        if time.monotonic() > deadline:
            raise BackendError(
                f"file backend produced no complete {hyp_path} within {spec.timeout}s"
            )
        time.sleep(0.05)


def resolve_endpoint(flag_value: str | None) -> str | None:
    return flag_value or os.environ.get(ENDPOINT_ENV_VAR)


def translate_batch(sources, backend: BackendSpec) -> list[TranslationRecord]:
    """Translate sources in order; output length always equals input length."""
    sources = list(sources)
    if not sources:
        return []
    if backend.kind == KIND_MOCK_DICTIONARY:
        translator = MockDictionary()
        targets = [translator.translate(s) for s in sources]
    elif backend.kind == KIND_MOCK_VOLATILE:
        translator = MockVolatile(salt=backend.salt)
        targets = [translator.translate(s) for s in sources]
    elif backend.kind == KIND_HTTP:
        targets = _translate_http(sources, backend)
    else:
        targets = _translate_file(sources, backend)
    if len(targets) != len(sources):
        raise ProtocolError(
            f"protocol error: {len(sources)} sources, {len(targets)} translations"
        )
    return [
        TranslationRecord(s, t, backend.backend_id, backend.checkpoint_label)
        for s, t in zip(sources, targets)
    ]
