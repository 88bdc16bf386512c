"""Shared tokenization and seeded sampling helpers."""

from __future__ import annotations

import re

_PUNCT = re.compile(r"([.,?!\"'])")


def tokenize(text: str) -> list[str]:
    """Split on whitespace after separating . , ? ! \" ' as standalone tokens."""
    return _PUNCT.sub(r" \1 ", text).split()


def detokenize(tokens) -> str:
    return " ".join(tokens)


def seeded_sample(rng, n: int, k: int) -> list[int]:
    """k distinct indices from range(n), deterministic given rng state.

    Partial Fisher-Yates over a sparse permutation, so it only depends on
    rng.randrange (stable across Python versions, unlike random.sample).
    """
    if k > n:
        raise ValueError(f"cannot sample {k} from {n}")
    perm: dict[int, int] = {}
    out = []
    for i in range(k):
        j = i + rng.randrange(n - i)
        vi = perm.get(i, i)
        vj = perm.get(j, j)
        perm[i], perm[j] = vj, vi
        out.append(vj)
    return out
