"""Tour of the number codecs: one value, four spellings."""

from matseq import codec

VALUES = [3.14, -6.02e23, 23.14069, -0.5, 0.0]

print("value -> (sign, mantissa, exponent), then tokens per scheme\n")
for x in VALUES:
    t = codec.round_to_triplet(x)
    print(f"{x!r:>12}  ->  ({t.sign:+d}, {t.mantissa}, {t.exponent})")
    for scheme in (codec.P10, codec.P1000, codec.B1999, codec.FP15):
        tokens = codec.encode_number(t, scheme)
        back = codec.decode_number(tokens, scheme)
        assert back == t
        print(f"{'':>12}  {scheme.label():>6}: {' '.join(tokens)}")
    print()

print("vocabulary sizes (number tokens only):")
for name, scheme in codec.SCHEMES.items():
    vocab = codec.build_vocabulary(scheme)
    print(f"  {name:>7}: {len(vocab):>6} tokens, {scheme.tokens_per_number} per coefficient")

print("\nprecision variants share the 3-token layout:")
for name in ("P100", "P1000", "P10000"):
    scheme = codec.get_scheme(name)
    t = codec.round_to_triplet(23.14069, scheme.precision_digits)
    print(f"  {name:>7} ({scheme.precision_digits} digits): "
          f"{' '.join(codec.encode_number(t, scheme))}")
