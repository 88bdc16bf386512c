"""Parallel-corpus utilities: exact search, literal-translation rates,
the idiom admission filter, and length/frequency-matched sampling."""

from compoeval.corpus import load_toy_corpus

corpus = load_toy_corpus()
print(f"toy corpus: {len(corpus)} aligned sentence pairs")

# Exact phrase search over the source side.
hits = corpus.find_exact("by heart")
print(f'\n"by heart" occurs in {len(hits)} sentences:')
for rid in hits:
    src, tgt = corpus.records[rid]
    print(f"  [{rid}] {src}")
    print(f"        {tgt}")

# How many of those references translate the keyword literally?
rate = corpus.literal_rate(hits, {"hart"})
print(f'\nliteral rate for keyword "hart": {rate:.2f}')
admitted, count, rate = corpus.admits_idiom("by heart", {"hart"})
print(
    f"idiom filter (needs >= 200 exact matches and <= 20% literal): "
    f"count={count}, literal={rate:.2f} -> admitted={admitted}"
)
print("(the toy corpus is far below the 200-occurrence bar, as expected)")

# Frequency-and-length-matched sampling of natural sentences.
reference = corpus.records[14][0]
profile = corpus.profile(reference)
print(f"\nreference sentence ({profile.length} tokens, "
      f"mean log-freq {profile.mean_log_freq:.2f}):")
print("  ", reference)
matched = corpus.sample_matched(profile, n=3, seed=1, length_tol=3, freq_tol=0.5)
print("matched natural samples:")
for m in matched:
    print("  ", m)
