"""
Essay text features
===================

Turn free-text answers into eight numbers: counts, two readability
scores, lexicon sentiment and the mono/polysyllable ratio.
"""

from admitnet.textfeat import default_lexicon, extract_piq_features, text_stats

lexicon = default_lexicon()

# a short answer and a wordier one
short = "The cat sat."
long_ = ("I am grateful for a wonderful opportunity to contribute. "
         "Collaborative engineering communities are inspiring and rewarding!")

for text in (short, long_):
    print(text_stats(text))
    vec = extract_piq_features(text, lexicon)
    for name, value in zip(vec.__dataclass_fields__, vec.as_tuple()):
        print(f"  {name:<22} {value:.3f}")

# empty answers still give a vector; readability is missing (nan)
print(extract_piq_features("", lexicon))
