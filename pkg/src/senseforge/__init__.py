"""Corpus sense annotation and multi-sense word embeddings.

The pipeline: parse WordNet 3.0 into a lexicon, clean a raw corpus into
WordNet-resolvable tokens, disambiguate every token into a sense key with
one of the MSSA algorithms, train CBOW sense vectors over the annotated
corpus, and score the result on word-similarity benchmarks.
"""

__version__ = "0.1.0"
