"""Synthetic sentence generation: lexicon, templates, perturbations.

Walks through the tagged vocabulary, number agreement, deterministic
template instantiation, and the two slot perturbations that build
systematicity test pairs.
"""

from compoeval import TemplateSet, conjoin, load_lexicon

lexicon = load_lexicon()

# The lexicon is organized by (POS, subcategory, number).
print("elite nouns (sg):", ", ".join(lexicon.lookup("N", "elite", "singular")))
print("transitive verbs (pl):", ", ".join(lexicon.lookup("V", "transitive", "plural")[:6]), "...")

# Verb agreement: the plural form is the lemma, singulars are derived.
for number in ("singular", "plural"):
    print(f"agree({number}, criticise) ->", lexicon.agree(number, "criticise"))

templates = TemplateSet(lexicon)
print("\nbinding-space sizes per template:")
for tid in sorted(templates.templates):
    print(f"  template {tid:>2}: {templates.binding_space(tid):>7} distinct bindings")

# Instantiation samples without replacement, deterministically per seed.
sentences = templates.instantiate(1, count=5, seed=42)
print("\ntemplate 1, seed 42:")
for s in sentences:
    print("  ", s.text)

# The same call reproduces the same sample.
again = templates.instantiate(1, count=5, seed=42)
assert [s.text for s in again] == [s.text for s in sentences]

# NP -> NP': the subject noun changes, number agreement is preserved.
base = sentences[0]
print("\nbase:        ", base.text)
print("perturb_np:  ", templates.perturb_np(base, seed=7).text)
print("perturb_vp:  ", templates.perturb_vp(base, seed=7).text)

# Conjunction builds the S -> S CONJ S test items; the offset of the
# second conjunct is recorded for later conjunct-level evaluation.
second = templates.instantiate(6, count=1, seed=9)[0]
joined = conjoin(base, second)
print("\nconjoined:   ", joined.text)
print("second starts at char", joined.second_start, "->", repr(joined.text[joined.second_start :]))
