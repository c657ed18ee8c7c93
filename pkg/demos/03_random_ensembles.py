"""Wigner spectra: the A*sqrt(n/3) law and semicircle convergence.

Uses 5000 matrices per cell to stay fast; the acceptance suite runs the
full 100k-sample version.
"""

import numpy as np

from matseq import ensembles as ens

SAMPLES = 5000
print(f"pooled eigenvalue std over {SAMPLES} Wigner matrices (A=10):\n")
print(f"{'law':<10} {'n':>3} {'empirical':>10} {'A*sqrt(n/3)':>12}")
laws = {
    "uniform": ens.IidUniform(10.0),
    "gaussian": ens.IidGaussian(10.0 / np.sqrt(3.0)),
    "laplace": ens.IidLaplace(10.0 / np.sqrt(3.0)),
}
for law, kind in laws.items():
    for n in (5, 10, 20):
        spec = ens.EnsembleSpec(kind, ens.square_dims(n), symmetric=True)
        values = ens.pooled_eigenvalues(spec, SAMPLES, seed=1)
        print(f"{law:<10} {n:>3} {values.std():>10.3f} {ens.wigner_eig_std(10, n):>12.3f}")

print("\nsemicircle fit at n=20 (uniform coefficients):")
spec = ens.EnsembleSpec(ens.IidUniform(10.0), ens.square_dims(20), symmetric=True)
values = ens.pooled_eigenvalues(spec, SAMPLES, seed=2)
sigma = ens.wigner_eig_std(10.0, 20)
print(f"  KS distance to the semicircle CDF: "
      f"{ens.ks_distance_to_semicircle(values, sigma):.4f}")

edges = np.linspace(-2 * sigma, 2 * sigma, 13)
counts, _ = np.histogram(values, bins=edges)
density = counts / counts.sum() / np.diff(edges)
print("\n  bin centre   empirical   semicircle")
for left, right, d in zip(edges[:-1], edges[1:], density):
    mid = 0.5 * (left + right)
    bar = "#" * int(300 * d)
    print(f"  {mid:>9.2f}   {d:.5f}     {ens.semicircle_density(mid, sigma):.5f}  {bar}")

print("\nprescribed spectra via eigenvector reuse:")
for family in ens.EIG_FAMILIES:
    spec = ens.EnsembleSpec(ens.SpectralResample(family), ens.square_dims(5), True)
    values = ens.pooled_eigenvalues(spec, 2000, seed=3)
    print(f"  {family:>9}: min {values.min():>8.2f}  max {values.max():>8.2f}  "
          f"rms {np.sqrt((values**2).mean()):>7.2f}")
