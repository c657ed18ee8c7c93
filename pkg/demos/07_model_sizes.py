"""Parameter budgets for encoder-decoder shapes over these vocabularies."""

from matseq import codec
from matseq.params import TransformerShape, param_count

print("parameter counts for typical configurations\n")
print(f"{'config':<34} {'vocab':>6} {'total':>12}")
configs = [
    ("1/1 layers, 256 dims", 1, 1, 256, 256),
    ("2/2 layers, 512 dims", 2, 2, 512, 512),
    ("6/1 layers, 512 dims", 6, 1, 512, 512),
    ("1/6 layers, 512 dims", 1, 6, 512, 512),
]
for name in ("P10", "P1000", "B1999", "FP15"):
    scheme = codec.get_scheme(name)
    vocab = len(codec.build_vocabulary(scheme, max_dim=30)) + 3  # pad/bos/eos
    for label, ne, nd, de, dd in configs:
        shape = TransformerShape(ne, nd, de, dd, vocab, vocab, 1024)
        total = param_count(shape).total
        print(f"{name + ', ' + label:<34} {vocab:>6} {total:>12,}")
    print()

print("breakdown of one shape (6/1 layers, 512 dims, FP15 in / P1000 out):")
vin = len(codec.build_vocabulary(codec.FP15, max_dim=30)) + 3
vout = len(codec.build_vocabulary(codec.P1000, max_dim=30)) + 3
counts = param_count(TransformerShape(6, 1, 512, 512, vin, vout, 1024))
for field in ("input_embedding", "output_embedding", "encoder", "decoder"):
    print(f"  {field:<16} {getattr(counts, field):>12,}")
print(f"  {'total':<16} {counts.total:>12,}")
