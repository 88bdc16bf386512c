"""Tree fragments and semi-natural data.

Parses bracketed constituency trees, matches and counts tree fragments,
harvests filler yields from a treebank, and instantiates the
semi-natural templates that embed corpus-attested NP/VP structures.
"""

import importlib.resources

from compoeval import (
    SemiNaturalGenerator,
    count_fragments,
    harvest_fillers,
    load_lexicon,
    match_fragment,
    parse_bracketed,
    serialize,
)
from compoeval.treegen import load_fragments, preorder

# Round-tripping the bracketed format.
tree = parse_bracketed("(NP (DT the) (NN king))")
print("parsed:", tree.label, "->", serialize(tree))

# Fragments leave open substitution slots at the frontier: "(VB )".
fragment = parse_bracketed("(VP (TO ) (VP (VB ) (NP )))")
print("fragment with open slots:", serialize(fragment))

# A small hand-parsed treebank ships with the package.
data = importlib.resources.files("compoeval.data")
treebank = [
    parse_bracketed(line)
    for line in (data / "sample_treebank.txt").read_text().splitlines()
    if line.strip()
]
print(f"\nsample treebank: {len(treebank)} trees")

# Matching a template fragment against the parse of its example sentence.
fragments = load_fragments()
sites = match_fragment(treebank[1], fragments[2])
nodes = preorder(treebank[1])
print("template-2 VP fragment matches at preorder nodes:", sites)

# Counting frequent large fragments (depth-bounded enumeration).
ranked = count_fragments(treebank, min_nonterminals=15, top_k=3)
print("\ntop fragments with >= 15 nonterminals:")
for frag, count in ranked:
    print(f"  x{count}  {frag[:90]}...")

# Harvesting filler yields for a fragment.
fillers = harvest_fillers(treebank, fragments[4])
print("\nfillers harvested for the template-4 NP fragment:")
for f in fillers:
    print("  ", f)

# Semi-natural sentences vary one people-noun and the filler; finite VP
# fillers constrain the noun's number.
generator = SemiNaturalGenerator(load_lexicon())
print("\nsemi-natural samples:")
for tid in (2, 4, 7, 10):
    for s in generator.instantiate(tid, count=1, seed=tid):
        print(f"  t{tid}: {s.text}")
