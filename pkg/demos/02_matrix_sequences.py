"""Matrices as token sequences: dimension tokens, row-major coefficients."""

import numpy as np

from matseq import codec
from matseq.serialize import SequenceLayout, matrix_to_tokens, tokens_to_matrix

rng = np.random.default_rng(0)

m = np.array([[3.14, -0.5], [1e4, 0.0]])
print("2x2 example matrix:\n", m, "\n")
for scheme in (codec.P10, codec.P1000, codec.B1999, codec.FP15):
    layout = SequenceLayout(scheme)
    tokens = matrix_to_tokens(m, layout)
    print(f"{scheme.label():>6} ({len(tokens):>2} tokens): {' '.join(tokens)}")
    assert np.array_equal(tokens_to_matrix(tokens, layout),
                          np.vectorize(lambda x: codec.triplet_to_value(
                              codec.round_to_triplet(x)))(m))

print("\nsequence length scales with the coefficient arity:")
big = rng.uniform(-10, 10, (20, 20))
for scheme in (codec.P10, codec.P1000, codec.B1999, codec.FP15):
    layout = SequenceLayout(scheme)
    print(f"  20x20 under {scheme.label():>6}: {len(matrix_to_tokens(big, layout))} tokens")

print("\nmalformed sequences are rejected, with the offending position:")
layout = SequenceLayout(codec.P10)
tokens = matrix_to_tokens(m, layout)
for broken, label in [
    (tokens[:-2], "truncated"),
    (tokens + ["E0"], "trailing junk"),
    (["V2", "what", *tokens[2:]], "bad dimension token"),
]:
    try:
        tokens_to_matrix(broken, layout)
    except Exception as err:
        print(f"  {label:>18}: {type(err).__name__}: {err}")
