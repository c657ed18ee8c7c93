"""Seeded random-matrix ensembles and their spectral statistics.

Every sampler is a pure function of (spec, seed): the generator is PCG64
seeded with SeedSequence(entropy), where entropy is the integer seed or a
(seed, index) pair for the i-th matrix of a stream. Draw order inside one
matrix is fixed (dimensions, then amplitude when ranged, then coefficients,
then resampled eigenvalues), so batched generation is bit-identical to
serial generation.

Symmetric Wigner matrices with coefficient standard deviation s have
eigenvalue standard deviation s * sqrt(n), i.e. A * sqrt(n/3) for uniform
coefficients in [-A, A]; their spectral density converges to the semicircle
law p(x) = sqrt(4 sigma^2 - x^2) / (2 pi sigma^2) on [-2 sigma, 2 sigma].
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np

from . import linalg
from .errors import NoConvergenceError, ShapeError

EIG_FAMILIES = ("positive", "uniform", "gaussian", "laplace")

Entropy = Union[int, Sequence[int]]


def rng_from(entropy: Entropy) -> np.random.Generator:
    """The package-wide generator: PCG64 behind SeedSequence(entropy)."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


# ---------------------------------------------------------------------------
# Specs


@dataclass(frozen=True)
class DimSpec:
    """Fixed (m, n) dimensions or uniform ranges; cols=None ties cols to rows (square)."""

    rows: int | tuple[int, int]
    cols: int | tuple[int, int] | None = None

    def __post_init__(self):
        for side in (self.rows, self.cols):
            if isinstance(side, tuple):
                lo, hi = side
                if not (1 <= lo <= hi):
                    raise ValueError(f"bad dimension range {side}")
            elif side is not None and side < 1:
                raise ValueError(f"dimensions must be >= 1, got {side}")

    @property
    def fixed(self) -> bool:
        return not (isinstance(self.rows, tuple) or isinstance(self.cols, tuple))

    @property
    def always_square(self) -> bool:
        """True when every draw is square (cols tied to rows, or equal fixed sides)."""
        if self.cols is None:
            return True
        return self.fixed and self.rows == self.cols

    @property
    def max_rows(self) -> int:
        return self.rows[1] if isinstance(self.rows, tuple) else self.rows

    @property
    def max_cols(self) -> int:
        if self.cols is None:
            return self.max_rows
        return self.cols[1] if isinstance(self.cols, tuple) else self.cols

    def draw(self, rng: np.random.Generator) -> tuple[int, int]:
        rows = self.rows if not isinstance(self.rows, tuple) \
            else int(rng.integers(self.rows[0], self.rows[1] + 1))
        if self.cols is None:
            return rows, rows
        cols = self.cols if not isinstance(self.cols, tuple) \
            else int(rng.integers(self.cols[0], self.cols[1] + 1))
        return rows, cols


def square_dims(n: int | tuple[int, int]) -> DimSpec:
    return DimSpec(n, None)


@dataclass(frozen=True)
class IidUniform:
    """Coefficients uniform in [-A, A]; a (lo, hi) amplitude draws A per matrix."""

    amplitude: float | tuple[float, float] = 10.0

    def __post_init__(self):
        amp = self.amplitude
        if isinstance(amp, tuple):
            if not (0 < amp[0] <= amp[1]):
                raise ValueError(f"bad amplitude range {amp}")
        elif amp <= 0:
            raise ValueError("amplitude must be positive")

    @property
    def coeff_std(self) -> float:
        if isinstance(self.amplitude, tuple):
            raise ValueError("coefficient std is undefined for a ranged amplitude")
        return self.amplitude / math.sqrt(3.0)


@dataclass(frozen=True)
class IidGaussian:
    """Centred gaussian coefficients; a (lo, hi) std draws the std per matrix."""

    std: float | tuple[float, float] = 10.0 / math.sqrt(3.0)

    def __post_init__(self):
        s = self.std
        if isinstance(s, tuple):
            if not (0 < s[0] <= s[1]):
                raise ValueError(f"bad std range {s}")
        elif s <= 0:
            raise ValueError("std must be positive")

    @property
    def coeff_std(self) -> float:
        if isinstance(self.std, tuple):
            raise ValueError("coefficient std is undefined for a ranged std")
        return self.std


@dataclass(frozen=True)
class IidLaplace:
    """Centred Laplace coefficients with the given standard deviation."""

    std: float = 10.0 / math.sqrt(3.0)

    def __post_init__(self):
        if self.std <= 0:
            raise ValueError("std must be positive")

    @property
    def coeff_std(self) -> float:
        return self.std


@dataclass(frozen=True)
class SpectralResample:
    """Symmetric matrices with a prescribed eigenvalue law.

    A gaussian Wigner draw M = P^T D P keeps its eigenvectors P while D is
    replaced with i.i.d. values from `family`, scaled to the target
    eigenvalue std: `eig_std` when given, otherwise
    rel_std * ref_amplitude * sqrt(n/3) (the Wigner reference).
    """

    family: str
    rel_std: float = 1.0
    ref_amplitude: float = 10.0
    eig_std: float | None = None

    def __post_init__(self):
        if self.family not in EIG_FAMILIES:
            raise ValueError(f"family must be one of {EIG_FAMILIES}, got {self.family!r}")
        if self.rel_std <= 0 or self.ref_amplitude <= 0:
            raise ValueError("scales must be positive")
        if self.eig_std is not None and self.eig_std <= 0:
            raise ValueError("eig_std must be positive")

    def target_std(self, n: int) -> float:
        if self.eig_std is not None:
            return self.eig_std
        return self.rel_std * wigner_eig_std(self.ref_amplitude, n)


@dataclass(frozen=True)
class Mixture:
    """Weighted mixture of ensemble kinds; the component is drawn per matrix."""

    components: tuple
    weights: tuple[float, ...] | None = None

    def __post_init__(self):
        if not self.components:
            raise ValueError("mixture needs at least one component")
        w = self.weights
        if w is None:
            w = tuple(1.0 / len(self.components) for _ in self.components)
            object.__setattr__(self, "weights", w)
        if len(w) != len(self.components) or any(x <= 0 for x in w):
            raise ValueError("weights must be positive, one per component")
        total = sum(w)
        if abs(total - 1.0) > 1e-9:
            object.__setattr__(self, "weights", tuple(x / total for x in w))


EnsembleKind = Union[IidUniform, IidGaussian, IidLaplace, SpectralResample, Mixture]


@dataclass(frozen=True)
class EnsembleSpec:
    kind: EnsembleKind
    dims: DimSpec
    symmetric: bool = False

    def __post_init__(self):
        if self.symmetric and not self.dims.always_square:
            raise ValueError("symmetric ensembles need square dimensions")
        if isinstance(self.kind, SpectralResample) or (
            isinstance(self.kind, Mixture)
            and any(isinstance(c, SpectralResample) for c in self.kind.components)
        ):
            if not self.symmetric:
                raise ValueError("spectral resampling requires a symmetric ensemble")

    def coefficient_std(self) -> float:
        if isinstance(self.kind, (IidUniform, IidGaussian, IidLaplace)):
            return self.kind.coeff_std
        raise ValueError(f"coefficient std undefined for {type(self.kind).__name__}")


def wigner_spec(amplitude: float | tuple[float, float] = 10.0,
                dims: int | tuple[int, int] = 5) -> EnsembleSpec:
    """Symmetric iid-uniform ensemble (the default training ensemble)."""
    return EnsembleSpec(IidUniform(amplitude), square_dims(dims), symmetric=True)


# ---------------------------------------------------------------------------
# Spectral formulas


def wigner_eig_std(amplitude: float, n: int) -> float:
    """Eigenvalue standard deviation A * sqrt(n/3) of a uniform[-A, A] Wigner matrix."""
    if amplitude <= 0 or n < 1:
        raise ValueError("need amplitude > 0 and n >= 1")
    return amplitude * math.sqrt(n / 3.0)


def semicircle_density(x, sigma: float):
    """Semicircle density sqrt(4 sigma^2 - x^2) / (2 pi sigma^2), 0 outside |x| <= 2 sigma."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    x = np.asarray(x, dtype=float)
    inside = np.abs(x) <= 2.0 * sigma
    out = np.zeros_like(x)
    out[inside] = np.sqrt(4.0 * sigma**2 - x[inside] ** 2) / (2.0 * math.pi * sigma**2)
    return out if out.ndim else float(out)


def semicircle_cdf(x, sigma: float):
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    x = np.asarray(x, dtype=float)
    z = np.clip(x / (2.0 * sigma), -1.0, 1.0)
    out = 0.5 + z * np.sqrt(1.0 - z**2) / math.pi + np.arcsin(z) / math.pi
    return out if out.ndim else float(out)


def ks_distance_to_semicircle(values: np.ndarray, sigma: float) -> float:
    """Kolmogorov-Smirnov distance between an eigenvalue sample and the semicircle CDF."""
    values = np.sort(np.asarray(values, dtype=float).ravel())
    n = len(values)
    cdf = semicircle_cdf(values, sigma)
    grid = np.arange(1, n + 1) / n
    return float(max(np.max(grid - cdf), np.max(cdf - (grid - 1.0 / n))))


# ---------------------------------------------------------------------------
# Sampling


def _symmetric_from_triangle(vals: np.ndarray, n: int) -> np.ndarray:
    m = np.zeros((n, n))
    iu = np.triu_indices(n)
    m[iu] = vals
    m.T[iu] = vals
    return m


def _draw_iid(rng, kind, rows, cols, symmetric):
    count = rows * (rows + 1) // 2 if symmetric else rows * cols
    if isinstance(kind, IidUniform):
        amp = kind.amplitude
        if isinstance(amp, tuple):
            amp = float(rng.uniform(amp[0], amp[1]))
        vals = rng.uniform(-amp, amp, size=count)
    elif isinstance(kind, IidGaussian):
        std = kind.std
        if isinstance(std, tuple):
            std = float(rng.uniform(std[0], std[1]))
        vals = rng.normal(0.0, std, size=count)
    else:
        vals = rng.laplace(0.0, kind.std / math.sqrt(2.0), size=count)
    if symmetric:
        return _symmetric_from_triangle(vals, rows)
    return vals.reshape(rows, cols)


def _draw_eigenvalues(rng, family: str, sigma: float, n: int) -> np.ndarray:
    if family == "positive":
        return np.abs(rng.normal(0.0, sigma, size=n))
    if family == "uniform":
        return rng.uniform(-math.sqrt(3.0) * sigma, math.sqrt(3.0) * sigma, size=n)
    if family == "gaussian":
        return rng.normal(0.0, sigma, size=n)
    return rng.laplace(0.0, sigma / math.sqrt(2.0), size=n)


def _spectral_draw(rng, kind: SpectralResample, n: int):
    """The random half of spectral resampling (fixed draw order)."""
    base = _draw_iid(rng, IidGaussian(1.0), n, n, True)
    target = _draw_eigenvalues(rng, kind.family, kind.target_std(n), n)
    return base, target


def _spectral_build(base: np.ndarray, target: np.ndarray) -> np.ndarray:
    """The deterministic half: keep the eigenvectors, replace the spectrum."""
    eig = linalg.sym_eigen(base)
    p = eig.vectors
    out = p.T @ (target[:, None] * p)
    return 0.5 * (out + out.T)


def spectral_resample(kind: SpectralResample, n: int, rng: np.random.Generator,
                      max_retries: int = 5) -> np.ndarray:
    if n < 2:
        raise ValueError("spectral resampling needs n >= 2")
    for _ in range(max_retries):
        base, target = _spectral_draw(rng, kind, n)
        try:
            return _spectral_build(base, target)
        except NoConvergenceError:
            continue
    raise NoConvergenceError(f"no convergent base draw in {max_retries} tries")


def _pick_component(rng, mixture: Mixture):
    u = float(rng.random())
    acc = 0.0
    for comp, w in zip(mixture.components, mixture.weights):
        acc += w
        if u < acc:
            return comp
    return mixture.components[-1]


def _sample_kind(rng, kind, rows, cols, symmetric):
    if isinstance(kind, Mixture):
        return _sample_kind(rng, _pick_component(rng, kind), rows, cols, symmetric)
    if isinstance(kind, SpectralResample):
        return spectral_resample(kind, rows, rng)
    return _draw_iid(rng, kind, rows, cols, symmetric)


def sample_with(spec: EnsembleSpec, rng: np.random.Generator) -> np.ndarray:
    rows, cols = spec.dims.draw(rng)
    if spec.symmetric and rows != cols:
        raise ShapeError("symmetric ensembles need square dimensions")
    return _sample_kind(rng, spec.kind, rows, cols, spec.symmetric)


def sample(spec: EnsembleSpec, seed: Entropy) -> np.ndarray:
    """Deterministic draw: same (spec, seed) gives the same matrix bit-for-bit."""
    return sample_with(spec, rng_from(seed))


def sample_many(spec: EnsembleSpec, seed: int, count: int, start: int = 0) -> list[np.ndarray]:
    """The matrices ``[sample(spec, (seed, i)) for i in range(start, start+count)]``.

    Spectral-resampling draws are batched through the eigensolver, which is
    bit-identical to the serial path because the random draws per index come
    from that index's own generator in the serial order.
    """
    indices = range(start, start + count)
    needs_eig = isinstance(spec.kind, SpectralResample) or (
        isinstance(spec.kind, Mixture)
        and any(isinstance(c, SpectralResample) for c in spec.kind.components)
    )
    if not needs_eig:
        return [sample(spec, (seed, i)) for i in indices]

    rngs = [rng_from((seed, i)) for i in indices]
    pending: list[tuple[int, SpectralResample, np.ndarray, np.ndarray]] = []
    out: list[np.ndarray | None] = [None] * count
    for k, rng in enumerate(rngs):
        rows, _ = spec.dims.draw(rng)
        kind = spec.kind
        if isinstance(kind, Mixture):
            kind = _pick_component(rng, kind)
        if isinstance(kind, SpectralResample):
            base, target = _spectral_draw(rng, kind, rows)
            pending.append((k, kind, base, target))
        else:
            out[k] = _draw_iid(rng, kind, rows, rows, True)
    by_n: dict[int, list[tuple[int, SpectralResample, np.ndarray, np.ndarray]]] = {}
    for item in pending:
        by_n.setdefault(item[2].shape[0], []).append(item)
    for _, items in by_n.items():
        bases = np.stack([b for _, _, b, _ in items])
        try:
            _, vecs = linalg.sym_eigen_batch(bases)
        except NoConvergenceError:
            vecs = None
        for j, (k, kind, base, target) in enumerate(items):
            if vecs is not None:
                p = vecs[j]
                built = p.T @ (target[:, None] * p)
                out[k] = 0.5 * (built + built.T)
            else:
                # rare fallback: redo this index serially with its own rng,
                # replicating the serial retry budget
                try:
                    out[k] = _spectral_build(base, target)
                except NoConvergenceError:
                    out[k] = spectral_resample(kind, base.shape[0], rngs[k], max_retries=4)
    return out  # type: ignore[return-value]


# ---------------------------------------------------------------------------
# Monte-Carlo statistics


def pooled_eigenvalues(spec: EnsembleSpec, samples: int, seed: int,
                       chunk: int = 2000) -> np.ndarray:
    """Eigenvalues of `samples` draws, pooled into one flat array."""
    if not spec.symmetric:
        raise ShapeError("eigenvalue statistics need a symmetric ensemble")
    pools = []
    start = 0
    while start < samples:
        step = min(chunk, samples - start)
        mats = sample_many(spec, seed, step, start)
        by_n: dict[int, list[np.ndarray]] = {}
        for m in mats:
            by_n.setdefault(m.shape[0], []).append(m)
        for _, group in sorted(by_n.items()):
            vals = linalg.sym_eigvals_batch(np.stack(group))
            pools.append(vals.ravel())
        start += step
    return np.concatenate(pools)


@dataclass(frozen=True)
class HistogramResult:
    bin_edges: np.ndarray
    counts: np.ndarray
    mean: float
    std: float
    n_eigenvalues: int

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["bin_left", "bin_right", "count"])
            for left, right, count in zip(self.bin_edges[:-1], self.bin_edges[1:], self.counts):
                writer.writerow([f"{left!r}", f"{right!r}", int(count)])


def eig_histogram(spec: EnsembleSpec, samples: int, bins: int, seed: int,
                  chunk: int = 2000) -> HistogramResult:
    """Pooled eigenvalue histogram with its empirical mean and std."""
    if samples < 1 or bins < 1:
        raise ValueError("need samples >= 1 and bins >= 1")
    values = pooled_eigenvalues(spec, samples, seed, chunk)
    counts, edges = np.histogram(values, bins=bins)
    return HistogramResult(edges, counts, float(values.mean()), float(values.std()),
                           len(values))


# ---------------------------------------------------------------------------
# Noise


def add_noise(m: np.ndarray, level: float, coeff_std: float,
              seed: Entropy | np.random.Generator,
              mirror_symmetric: bool = True) -> np.ndarray:
    """Add centred gaussian noise with std = level * coeff_std per coefficient.

    Exactly symmetric inputs get mirrored (symmetric) noise unless disabled.
    `seed` may be an existing generator to draw from an ongoing stream.
    """
    if level < 0:
        raise ValueError("noise level must be >= 0")
    m = np.asarray(m, dtype=float)
    if level == 0.0:
        return m.copy()
    rng = seed if isinstance(seed, np.random.Generator) else rng_from(seed)
    std = level * coeff_std
    rows, cols = m.shape
    if mirror_symmetric and rows == cols and np.array_equal(m, m.T):
        noise = _symmetric_from_triangle(rng.normal(0.0, std, size=rows * (rows + 1) // 2), rows)
    else:
        noise = rng.normal(0.0, std, size=m.shape)
    return m + noise
