"""Bracketed constituency trees, fragment matching, and the semi-natural
templates built on corpus-attested NP/VP fragments.

Fragment extraction enumerates connected top-down fragments up to a node
budget rather than inducing maximal common fragments pairwise; frequent
large fragments surface either way, and the bounded enumeration keeps
the dependency footprint at zero.  Raw-text parsing is out of scope: the
module consumes pre-parsed one-tree-per-line treebanks.
"""

from __future__ import annotations

import importlib.resources
import random
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from .errors import (
    BindingSpaceExhaustedError,
    EmptyFillerPoolError,
    NoSubstituteError,
    TreeSyntaxError,
    ValidationError,
)
from .lexicon import PLURAL, SINGULAR, Lexicon, inflect_third_singular
from .templates import BoundSentence
from .textutil import seeded_sample


@dataclass(frozen=True)
class Tree:
    """A constituency (sub)tree.

    ``terminal`` marks leaf tokens.  A nonterminal with no children is an
    open substitution slot, which only ever occurs in fragments.
    """

    label: str
    children: tuple = ()
    terminal: bool = False

    @property
    def is_open(self) -> bool:
        return not self.terminal and not self.children


def parse_bracketed(text: str) -> Tree:
    """Parse one bracketed tree; raises TreeSyntaxError with a char offset."""
    i = _skip_ws(text, 0)
    if i >= len(text):
        raise TreeSyntaxError("empty input", i)
    tree, i = _parse_node(text, i)
    i = _skip_ws(text, i)
    if i != len(text):
        raise TreeSyntaxError("trailing content after tree", i)
    return tree


def _skip_ws(text, i):
    while i < len(text) and text[i].isspace():
        i += 1
    return i


def _read_atom(text, i):
    j = i
    while j < len(text) and not text[j].isspace() and text[j] not in "()":
        j += 1
    return text[i:j], j


def _parse_node(text, i):
    if text[i] != "(":
        raise TreeSyntaxError(f"expected '(' but found {text[i]!r}", i)
    i = _skip_ws(text, i + 1)
    label, i = _read_atom(text, i)  # may be empty for PTB-style bare roots
    children = []
    while True:
        i = _skip_ws(text, i)
        if i >= len(text):
            raise TreeSyntaxError("unbalanced parentheses", i)
        ch = text[i]
        if ch == ")":
            return Tree(label, tuple(children)), i + 1
        if ch == "(":
            node, i = _parse_node(text, i)
            children.append(node)
        else:
            atom, i = _read_atom(text, i)
            children.append(Tree(atom, (), terminal=True))


def serialize(tree: Tree) -> str:
    if tree.terminal:
        return tree.label
    if not tree.children:
        return f"({tree.label} )"
    inner = " ".join(serialize(c) for c in tree.children)
    return f"({tree.label} {inner})"


def preorder(tree: Tree) -> list[Tree]:
    out = []
    stack = [tree]
    while stack:
        node = stack.pop()
        out.append(node)
        stack.extend(reversed(node.children))
    return out


def tree_yield(tree: Tree) -> str:
    return " ".join(n.label for n in preorder(tree) if n.terminal)


def nonterminal_count(tree: Tree) -> int:
    return sum(1 for n in preorder(tree) if not n.terminal)


def node_count(tree: Tree) -> int:
    return len(preorder(tree))


def embeds(frag: Tree, node: Tree) -> bool:
    """True when the fragment matches top-down at this node.

    Labels must be equal; an open slot matches any nonterminal; expanded
    fragment nodes require the node's full child sequence to match.
    """
    if frag.terminal:
        return node.terminal and frag.label == node.label
    if node.terminal or frag.label != node.label:
        return False
    if frag.is_open:
        return True
    if len(frag.children) != len(node.children):
        return False
    return all(embeds(f, c) for f, c in zip(frag.children, node.children))


def match_fragment(tree: Tree, frag: Tree) -> list[int]:
    """Preorder indices of nodes where the fragment embeds."""
    return [i for i, node in enumerate(preorder(tree)) if embeds(frag, node)]


def fragments_at(node: Tree, max_nodes: int, _memo=None) -> list[tuple[Tree, int]]:
    """All top-down fragments rooted at a node, with node counts.

    Every nonterminal below the root is either left open or expanded with
    its full child sequence; terminals are kept as-is.
    """
    if _memo is None:
        _memo = {}
    key = id(node)
    if key in _memo:
        return _memo[key]
    if node.terminal:
        result = [(node, 1)]
    else:
        result = [(Tree(node.label), 1)]
        child_options = [fragments_at(c, max_nodes, _memo) for c in node.children]
        combos = [((), 1)]
        for options in child_options:
            nxt = []
            for frags, size in combos:
                for f, n in options:
                    if size + n <= max_nodes:
                        nxt.append((frags + (f,), size + n))
            combos = nxt
        for frags, size in combos:
            result.append((Tree(node.label, frags), size))
    _memo[key] = result
    return result


def count_fragments(
    treebank: list[Tree],
    min_nonterminals: int,
    top_k: int,
    max_nodes: int = 25,
) -> list[tuple[str, int]]:
    """Fragments ranked by count desc, then serialization asc."""
    if min_nonterminals < 1:
        raise ValidationError("min_nonterminals must be >= 1")
    counts: Counter = Counter()
    for tree in treebank:
        memo: dict = {}
        for node in preorder(tree):
            if node.terminal:
                continue
            for frag, _ in fragments_at(node, max_nodes, memo):
                if nonterminal_count(frag) >= min_nonterminals:
                    counts[serialize(frag)] += 1
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return ranked[: max(top_k, 0)]


def load_treebank(path: str | Path) -> list[Tree]:
    trees = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line:
            trees.append(parse_bracketed(line))
    return trees


def harvest_fillers(treebank: list[Tree], frag: Tree) -> list[str]:
    """Yields of every subtree matching the fragment, in corpus order."""
    fillers = []
    for tree in treebank:
        nodes = preorder(tree)
        for i in match_fragment(tree, frag):
            fillers.append(tree_yield(nodes[i]))
    return fillers


# --- semi-natural templates ---------------------------------------------

# Frame token markers: {N} people noun, {FRAG} fragment filler,
# {V:lemma} a literal verb agreeing with the people noun.
SEMI_NATURAL_FRAMES = {
    1: ("The", "{N}", "{FRAG}", "."),
    2: ("The", "{N}", "{FRAG}", "."),
    3: ("The", "{N}", "{FRAG}", "."),
    4: ("The", "{N}", "{V:read}", "an", "article", "about", "{FRAG}", "."),
    5: ("The", "{N}", "{V:read}", "an", "article", "about", "{FRAG}", "."),
    6: ("An", "article", "about", "{FRAG}", "is", "read", "by", "the", "{N}", "."),
    7: ("An", "article", "about", "{FRAG}", ",", "is", "read", "by", "the", "{N}", "."),
    8: ("Did", "the", "{N}", "hear", "about", "{FRAG}", "?"),
    9: ("Did", "the", "{N}", "hear", "about", "{FRAG}", "?"),
    10: ("Did", "the", "{N}", "hear", "about", "{FRAG}", "?"),
}

# Templates whose filler is a finite VP: the filler then constrains the
# number of the people noun.
_VP_TEMPLATES = {1, 2, 3}

_SG_LEADS = {"is", "was", "has", "does"}
_PL_LEADS = {"are", "were", "have", "do"}
_MODAL_LEADS = {"will", "would", "can", "could", "may", "might", "must", "should", "did"}


def filler_number(filler: str) -> str | None:
    """Number constraint a finite-VP filler imposes on its subject.

    Heuristic on the leading verb's morphology; None means either number
    is acceptable.
    """
    head = filler.split()[0].lower()
    if head in _SG_LEADS:
        return SINGULAR
    if head in _PL_LEADS:
        return PLURAL
    if head in _MODAL_LEADS:
        return None
    if head.endswith("s") and not head.endswith("ss"):
        return SINGULAR
    return PLURAL


def _load_data_tsv(name: str) -> list[tuple[str, str]]:
    ref = importlib.resources.files("compoeval.data") / name
    rows = []
    for raw in ref.read_text(encoding="utf-8").splitlines():
        line = raw.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        first, rest = line.split("\t", 1)
        rows.append((first.strip(), rest))
    return rows


def load_fillers(path: str | Path | None = None) -> dict[int, list[str]]:
    if path is None:
        rows = _load_data_tsv("fillers.tsv")
    else:
        rows = []
        for raw in Path(path).read_text(encoding="utf-8").splitlines():
            if not raw.strip() or raw.lstrip().startswith("#"):
                continue
            first, rest = raw.split("\t", 1)
            rows.append((first.strip(), rest))
    fillers: dict[int, list[str]] = {}
    for tid, yield_str in rows:
        fillers.setdefault(int(tid), []).append(yield_str)
    return fillers


def load_fragments(path: str | Path | None = None) -> dict[int, Tree]:
    rows = (
        _load_data_tsv("fragments.tsv")
        if path is None
        else [
            tuple(raw.split("\t", 1))
            for raw in Path(path).read_text(encoding="utf-8").splitlines()
            if raw.strip() and not raw.lstrip().startswith("#")
        ]
    )
    return {int(tid): parse_bracketed(frag) for tid, frag in rows}


class SemiNaturalGenerator:
    """Instantiates the ten semi-natural templates from filler pools."""

    def __init__(
        self,
        lexicon: Lexicon,
        fillers: dict[int, list[str]] | None = None,
        fragments: dict[int, Tree] | None = None,
    ):
        self.lexicon = lexicon
        self.fillers = fillers if fillers is not None else load_fillers()
        self.fragments = fragments if fragments is not None else load_fragments()

    def _noun_options(self, number: str | None):
        if number is not None:
            return [(s, number) for s in self.lexicon.lookup("N", "people", number)]
        opts = [(s, SINGULAR) for s in self.lexicon.lookup("N", "people", SINGULAR)]
        opts += [(s, PLURAL) for s in self.lexicon.lookup("N", "people", PLURAL)]
        return opts

    def _pairs(self, template_id: int, number: str | None):
        if template_id not in SEMI_NATURAL_FRAMES:
            raise ValidationError(f"unknown semi-natural template id {template_id}")
        pool = self.fillers.get(template_id, [])
        if not pool:
            raise EmptyFillerPoolError(
                f"empty filler pool for semi-natural template {template_id}"
            )
        nouns = self._noun_options(number)
        pairs = []
        for f_idx, filler in enumerate(pool):
            constraint = filler_number(filler) if template_id in _VP_TEMPLATES else None
            for surface, num in nouns:
                if constraint is None or constraint == num:
                    pairs.append((surface, num, f_idx))
        return pairs

    def binding_space(self, template_id: int, number: str | None = None) -> int:
        return len(self._pairs(template_id, number))

    def render(self, template_id: int, binding: dict) -> str:
        noun = binding[0]
        filler = binding[1]
        number = self.lexicon.number_of("N", "people", noun)
        tokens = []
        for tok in SEMI_NATURAL_FRAMES[template_id]:
            if tok == "{N}":
                tokens.append(noun)
            elif tok == "{FRAG}":
                tokens.extend(filler.split())
            elif tok.startswith("{V:"):
                # frame-literal verb inflected for the noun, e.g. read(s)
                lemma = tok[3:-1]
                tokens.append(
                    lemma if number == PLURAL else inflect_third_singular(lemma)
                )
            else:
                tokens.append(tok)
        return " ".join(tokens)

    def instantiate(
        self, template_id: int, count: int, seed: int, number: str | None = None
    ) -> list[BoundSentence]:
        """`count` distinct (noun, filler) combinations, seeded."""
        if count < 1:
            raise ValidationError("count must be >= 1")
        pairs = self._pairs(template_id, number)
        if count > len(pairs):
            raise BindingSpaceExhaustedError(count, len(pairs))
        rng = random.Random(seed)
        pool = self.fillers[template_id]
        out = []
        for idx in seeded_sample(rng, len(pairs), count):
            surface, _, f_idx = pairs[idx]
            binding = {0: surface, 1: pool[f_idx]}
            out.append(
                BoundSentence(template_id, binding, self.render(template_id, binding))
            )
        return out

    def perturb_person(self, s: BoundSentence, seed: int) -> BoundSentence:
        """Swap the people noun for another of the same number."""
        current = s.binding[0]
        number = self.lexicon.number_of("N", "people", current)
        candidates = [
            x for x in self.lexicon.lookup("N", "people", number) if x != current
        ]
        if not candidates:
            raise NoSubstituteError(f"no substitute for {current!r} (people:{number})")
        rng = random.Random(seed)
        binding = dict(s.binding)
        binding[0] = candidates[rng.randrange(len(candidates))]
        return BoundSentence(s.template_id, binding, self.render(s.template_id, binding))

    def noun_token_index(self, s: BoundSentence) -> int:
        """Token index of the people noun in the rendered sentence."""
        idx = 0
        for tok in SEMI_NATURAL_FRAMES[s.template_id]:
            if tok == "{N}":
                return idx
            if tok == "{FRAG}":
                idx += len(s.binding[1].split())
            else:
                idx += 1
        raise ValidationError(f"frame {s.template_id} has no noun slot")
