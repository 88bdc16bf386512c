"""Synthetic sentence templates and slot-level perturbations.

A template is an ordered list of literal tokens and constrained slots.
Instantiation enumerates the full binding space (the product of each
slot's admissible surfaces, with agreement and distinctness constraints
folded into the enumeration) and samples from it without replacement via
a seeded partial shuffle, so output is deterministic, duplicate-free and
exhaustion is detected exactly.

Templates are immutable after loading; all operations here are pure, so
parallel instantiation over disjoint seed schedules is safe.
"""

from __future__ import annotations

import importlib.resources
import random
import re
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

from .errors import (
    BindingSpaceExhaustedError,
    NoSubstituteError,
    ValidationError,
)
from .lexicon import INVARIANT, PLURAL, SINGULAR, Lexicon, inflect_third_singular
from .textutil import seeded_sample

_SLOT_RE = re.compile(
    r"^\[([A-Za-z]+):([A-Za-z-]+)(?::(sg|pl))?\](?:@(\w+))?(?:#(\w+))?$"
)
_NUM_SHORT = {"sg": SINGULAR, "pl": PLURAL}
_SENT_FINAL = (".", "?", "!")
# Sentence-initial tokens that are safe to decapitalise when a sentence
# becomes a second conjunct.  Anything else (proper nouns in natural
# data) keeps its casing.
_DECAP = {"The", "A", "An", "Did"}

SUBJECT_ROLE = "subj"
OBJECT_ROLE = "obj"


@dataclass(frozen=True)
class SlotSpec:
    pos: str
    subcategory: str
    number: str | None  # None = free (nouns) or agreeing (verbs)
    role: str | None = None
    group: str | None = None


@dataclass(frozen=True)
class Template:
    template_id: int
    items: tuple  # str literals interleaved with SlotSpec

    @property
    def slots(self) -> list[tuple[int, SlotSpec]]:
        """(item index, spec) for every slot, in sentence order."""
        return [(i, it) for i, it in enumerate(self.items) if isinstance(it, SlotSpec)]


@dataclass(frozen=True)
class BoundSentence:
    template_id: int
    binding: dict  # slot ordinal -> chosen surface
    text: str


class Conjoined(NamedTuple):
    text: str
    second_start: int  # character offset where the second conjunct begins


def parse_template_line(line: str) -> Template:
    try:
        tid_str, body = line.split("\t", 1)
        tid = int(tid_str)
    except ValueError:
        raise ValidationError(f"template line must be '<id>\\t<tokens>': {line!r}")
    items: list = []
    for tok in body.split():
        if tok.startswith("["):
            m = _SLOT_RE.match(tok)
            if not m:
                raise ValidationError(f"bad slot syntax {tok!r} in template {tid}")
            pos, subcat, num, role, group = m.groups()
            items.append(
                SlotSpec(pos, subcat, _NUM_SHORT.get(num), role=role, group=group)
            )
        else:
            items.append(tok)
    if not items or items[-1] not in _SENT_FINAL:
        raise ValidationError(f"template {tid} must end with sentence punctuation")
    return Template(tid, tuple(items))


def load_templates(path: str | Path | None = None) -> dict[int, Template]:
    """Load a template file, or the shipped ten-template default."""
    if path is None:
        ref = importlib.resources.files("compoeval.data") / "templates.txt"
        text = ref.read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    templates = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        t = parse_template_line(line)
        if t.template_id in templates:
            raise ValidationError(f"duplicate template id {t.template_id}")
        templates[t.template_id] = t
    return templates


class _Dim:
    """One independent dimension of the binding space."""

    __slots__ = ("kind", "ordinals", "options", "size")

    def __init__(self, kind, ordinals, options, size):
        self.kind = kind  # "plain" | "pair" | "agree"
        self.ordinals = ordinals  # slot ordinals this dimension binds
        self.options = options
        self.size = size


class _Compiled:
    def __init__(self, template, lexicon, overrides):
        self.template = template
        self.lexicon = lexicon
        self.slot_items = template.slots  # [(item_idx, spec)]
        self.specs = [spec for _, spec in self.slot_items]
        self.options = []  # per ordinal: list of (surface, number), or lemma list
        self.controller = {}  # agree-slot ordinal -> controlling noun ordinal
        self._build_options(overrides)
        self.dims = self._build_dims()
        self.total = 1
        for d in self.dims:
            self.total *= d.size

    def _slot_options(self, spec, overrides, ordinal):
        lex = self.lexicon
        number = spec.number
        if number is None and overrides:
            number = overrides.get(spec.role) or overrides.get(ordinal)
        if spec.pos in ("N", "V"):
            if number is not None:
                return [(s, number) for s in lex.lookup(spec.pos, spec.subcategory, number)]
            opts = [(s, SINGULAR) for s in lex.lookup(spec.pos, spec.subcategory, SINGULAR)]
            opts += [(s, PLURAL) for s in lex.lookup(spec.pos, spec.subcategory, PLURAL)]
            return opts
        return [(s, INVARIANT) for s in lex.lookup(spec.pos, spec.subcategory, INVARIANT)]

    def _build_options(self, overrides):
        overrides = overrides or {}
        for ordinal, spec in enumerate(self.specs):
            if spec.pos == "V" and spec.number is None:
                ctrl = None
                for j in range(ordinal - 1, -1, -1):
                    prev = self.specs[j]
                    if prev.pos == "N" and prev.number is None:
                        ctrl = j
                        break
                if ctrl is None:
                    raise ValidationError(
                        f"template {self.template.template_id}: verb slot {ordinal} "
                        f"has no preceding free-number noun to agree with"
                    )
                self.controller[ordinal] = ctrl
                lemmas = self.lexicon.lookup("V", spec.subcategory, PLURAL)
                self.options.append(list(lemmas))
            else:
                self.options.append(self._slot_options(spec, overrides, ordinal))

    def _build_dims(self):
        dims = []
        grouped: dict[str, list[int]] = {}
        for ordinal, spec in enumerate(self.specs):
            if spec.group:
                grouped.setdefault(spec.group, []).append(ordinal)
        consumed = set()
        for group, ordinals in grouped.items():
            if len(ordinals) != 2:
                raise ValidationError(
                    f"distinct group #{group} must mark exactly two slots"
                )
            a, b = ordinals
            if self.options[a] != self.options[b]:
                raise ValidationError(
                    f"distinct group #{group} slots must share a lexical class"
                )
            n = len(self.options[a])
            dims_entry = _Dim("pair", (a, b), self.options[a], n * (n - 1))
            dims.append((a, dims_entry))
            consumed.update(ordinals)
        for ordinal, spec in enumerate(self.specs):
            if ordinal in consumed:
                continue
            kind = "agree" if ordinal in self.controller else "plain"
            opts = self.options[ordinal]
            dims.append((ordinal, _Dim(kind, (ordinal,), opts, len(opts))))
        dims.sort(key=lambda pair: pair[0])
        return [d for _, d in dims]

    def decode(self, index: int) -> dict[int, str]:
        """Mixed-radix decode of a binding-space index into slot choices."""
        digits = []
        for d in reversed(self.dims):
            index, rem = divmod(index, d.size)
            digits.append(rem)
        digits.reverse()
        chosen: dict[int, tuple] = {}  # ordinal -> (surface, number) | lemma
        for d, digit in zip(self.dims, digits):
            if d.kind == "pair":
                n = len(d.options)
                a_idx, r = divmod(digit, n - 1)
                b_idx = r if r < a_idx else r + 1
                chosen[d.ordinals[0]] = d.options[a_idx]
                chosen[d.ordinals[1]] = d.options[b_idx]
            else:
                chosen[d.ordinals[0]] = d.options[digit]
        binding = {}
        numbers = {}
        for ordinal in range(len(self.specs)):
            if ordinal in self.controller:
                continue
            surface, number = chosen[ordinal]
            binding[ordinal] = surface
            numbers[ordinal] = number
        for ordinal, ctrl in self.controller.items():
            lemma = chosen[ordinal]
            number = numbers[ctrl]
            binding[ordinal] = (
                lemma if number == PLURAL else inflect_third_singular(lemma)
            )
        return binding


class TemplateSet:
    """Templates bound to a lexicon, with instantiation and perturbation."""

    def __init__(self, lexicon: Lexicon, templates: dict[int, Template] | None = None):
        self.lexicon = lexicon
        self.templates = templates if templates is not None else load_templates()
        self._cache: dict = {}
        for t in self.templates.values():
            self._compiled(t.template_id)  # every slot must resolve at load

    def _compiled(self, template_id, overrides=None) -> _Compiled:
        frozen = (
            tuple(sorted((str(k), v) for k, v in overrides.items()))
            if overrides
            else None
        )
        key = (template_id, frozen)
        if key not in self._cache:
            if template_id not in self.templates:
                raise ValidationError(f"unknown template id {template_id}")
            self._cache[key] = _Compiled(
                self.templates[template_id], self.lexicon, overrides
            )
        return self._cache[key]

    def binding_space(self, template_id, overrides=None) -> int:
        return self._compiled(template_id, overrides).total

    def render(self, template_id, binding) -> str:
        compiled = self._compiled(template_id)
        tokens = []
        ordinal = 0
        for item in compiled.template.items:
            if isinstance(item, SlotSpec):
                tokens.append(binding[ordinal])
                ordinal += 1
            else:
                tokens.append(item)
        text = " ".join(tokens)
        return text[0].upper() + text[1:]

    def instantiate(
        self, template_id: int, count: int, seed: int, overrides=None
    ) -> list[BoundSentence]:
        """`count` distinct bindings, deterministic for a given seed.

        `overrides` optionally pins a free slot's number, keyed by role
        name or slot ordinal (used by the suite builders).
        """
        if count < 1:
            raise ValidationError("count must be >= 1")
        compiled = self._compiled(template_id, overrides)
        if count > compiled.total:
            raise BindingSpaceExhaustedError(count, compiled.total)
        rng = random.Random(seed)
        out = []
        for index in seeded_sample(rng, compiled.total, count):
            binding = compiled.decode(index)
            out.append(
                BoundSentence(template_id, binding, self.render(template_id, binding))
            )
        return out

    def enumerate_bindings(self, template_id, overrides=None):
        """Every binding in index order (intended for small test lexica)."""
        compiled = self._compiled(template_id, overrides)
        for index in range(compiled.total):
            yield compiled.decode(index)

    def _perturb(self, s: BoundSentence, role: str, seed: int) -> BoundSentence:
        compiled = self._compiled(s.template_id)
        target = None
        for ordinal, spec in enumerate(compiled.specs):
            if spec.role == role:
                target = (ordinal, spec)
                break
        if target is None:
            raise ValidationError(
                f"template {s.template_id} has no slot with role {role!r}"
            )
        ordinal, spec = target
        current = s.binding[ordinal]
        number = self.lexicon.number_of(spec.pos, spec.subcategory, current)
        candidates = [
            x for x in self.lexicon.lookup(spec.pos, spec.subcategory, number)
            if x != current
        ]
        if spec.group:
            partners = {
                s.binding[o]
                for o, other in enumerate(compiled.specs)
                if other.group == spec.group and o != ordinal
            }
            candidates = [x for x in candidates if x not in partners]
        if not candidates:
            raise NoSubstituteError(
                f"no substitute for {current!r} "
                f"({spec.pos}:{spec.subcategory}:{number}) in template {s.template_id}"
            )
        rng = random.Random(seed)
        replacement = candidates[rng.randrange(len(candidates))]
        binding = dict(s.binding)
        binding[ordinal] = replacement
        return BoundSentence(s.template_id, binding, self.render(s.template_id, binding))

    def perturb_np(self, s: BoundSentence, seed: int) -> BoundSentence:
        """Replace the subject noun, preserving subcategory and number."""
        return self._perturb(s, SUBJECT_ROLE, seed)

    def perturb_vp(self, s: BoundSentence, seed: int) -> BoundSentence:
        """Replace the noun inside the verb phrase."""
        return self._perturb(s, OBJECT_ROLE, seed)

    def slot_token_positions(self, template_id) -> dict[int, int]:
        """Slot ordinal -> token index in the rendered sentence."""
        compiled = self._compiled(template_id)
        positions = {}
        ordinal = 0
        for i, item in enumerate(compiled.template.items):
            if isinstance(item, SlotSpec):
                positions[ordinal] = i
                ordinal += 1
        return positions


def _strip_final_punct(text: str) -> str:
    stripped = text.rstrip()
    if not stripped or not stripped.endswith(_SENT_FINAL):
        raise ValidationError(
            f"conjunct must end with sentence-final punctuation: {text!r}"
        )
    return stripped[:-1].rstrip()


def conjoin(s1, s2) -> Conjoined:
    """Join two sentences with "and", recording where the second begins.

    The first conjunct loses its final punctuation.  The second keeps its
    casing unless it starts with a known sentence-initial function word
    (template-generated sentences all do); proper-noun-initial natural
    sentences are left untouched.
    """
    t1 = s1.text if isinstance(s1, BoundSentence) else s1
    t2 = s2.text if isinstance(s2, BoundSentence) else s2
    _strip_final_punct(t2)  # precondition check only
    first = _strip_final_punct(t1)
    words = t2.split()
    if words and words[0] in _DECAP:
        t2 = t2.replace(words[0], words[0].lower(), 1)
    text = first + " and " + t2
    return Conjoined(text, len(first) + len(" and "))
