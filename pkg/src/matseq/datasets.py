"""Example and dataset-file generation for the nine matrix tasks.

One example is a pure function of (task, global_seed, index): the index's own
generator draws dimensions, operands and noise, the oracle runs on the
rounded clean input, and both sides are serialised to tokens. Dataset files
are newline-delimited JSON records plus a sidecar manifest; regenerating with
the same seed is byte-identical, in any worker layout.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import __version__ as _version
from . import codec, ensembles, linalg, serialize
from .codec import EncodingScheme, Vocabulary
from .ensembles import (
    DimSpec,
    EnsembleSpec,
    IidGaussian,
    IidLaplace,
    IidUniform,
    Mixture,
    SpectralResample,
    rng_from,
    square_dims,
)
from .errors import (
    NoConvergenceError,
    ResampleExhaustedError,
    ShapeError,
    SingularMatrixError,
)
from .serialize import SequenceLayout

TASK_NAMES = (
    "transpose",
    "add",
    "matvec",
    "matmul",
    "eigenvalues",
    "eigenvectors",
    "singular_values",
    "svd",
    "invert",
)

SYMMETRIC_TASKS = {"eigenvalues", "eigenvectors", "singular_values", "svd"}
TWO_OPERAND_TASKS = {"add", "matvec", "matmul"}

DEFAULT_PREFIX = {
    "transpose": "Transpose",
    "add": "Add",
    "matvec": "Dot",
    "matmul": "Mul",
    "eigenvalues": "Eigenvalues",
    "eigenvectors": "Eigenvectors",
    "singular_values": "SingularValues",
    "svd": "SVD",
    "invert": "Invert",
}

GOAL_LETTERS = {
    "T": "transpose",
    "A": "add",
    "D": "matvec",
    "M": "matmul",
    "E": "eigenvalues",
    "F": "eigenvectors",
    "I": "invert",
}

DATASET_FORMAT = "matseq-dataset"
DATASET_FORMAT_VERSION = 1


@dataclass(frozen=True)
class MatrixTask:
    """One task configuration: ensemble, codecs, noise and joint-training prefix."""

    name: str
    input_spec: EnsembleSpec
    scheme_in: EncodingScheme = codec.P1000
    scheme_out: EncodingScheme = codec.P1000
    noise_level: float = 0.0
    task_prefix: str | None = None
    noise_on_target: bool = False
    mirror_noise: bool = True
    max_condition: float | None = None
    max_tokens: int | None = None
    max_retries: int = 64

    def __post_init__(self):
        if self.name not in TASK_NAMES:
            raise ValueError(f"unknown task {self.name!r}; expected one of {TASK_NAMES}")
        if self.name in ("eigenvalues", "eigenvectors") and not self.input_spec.symmetric:
            raise ValueError(f"{self.name} needs a symmetric ensemble")
        if self.name in ("eigenvalues", "eigenvectors", "invert") \
                and not self.input_spec.dims.always_square:
            raise ValueError(f"{self.name} needs square dimensions")
        if self.noise_level < 0:
            raise ValueError("noise level must be >= 0")
        if self.noise_level > 0:
            self.input_spec.coefficient_std()  # must be defined to scale the noise

    @property
    def layout_in(self) -> SequenceLayout:
        return SequenceLayout(self.scheme_in)

    @property
    def layout_out(self) -> SequenceLayout:
        return SequenceLayout(self.scheme_out)


def default_task(name: str, *, dims: int | tuple[int, int] | DimSpec | None = None,
                 scheme_in: EncodingScheme = codec.P1000,
                 scheme_out: EncodingScheme | None = None,
                 amplitude: float | tuple[float, float] = 10.0,
                 symmetric: bool | None = None,
                 **kwargs) -> MatrixTask:
    """Task with its conventional defaults (5x5, uniform [-10, 10]; 4x4 for SVD tasks)."""
    if symmetric is None:
        symmetric = name in SYMMETRIC_TASKS
    if dims is None:
        dims = 4 if name in ("svd", "singular_values") else 5
    if not isinstance(dims, DimSpec):
        dims = square_dims(dims) if symmetric or name in ("eigenvalues", "eigenvectors",
                                                          "invert") else DimSpec(dims, dims)
    spec = EnsembleSpec(IidUniform(amplitude), dims, symmetric=symmetric)
    return MatrixTask(name, spec, scheme_in, scheme_out or scheme_in, **kwargs)


@dataclass(frozen=True)
class ExampleRecord:
    task: str
    index: int
    rows: int
    cols: int
    input_tokens: list[str]
    output_tokens: list[str]
    input_matrix: np.ndarray       # what the tokens decode to (noisy when noise > 0)
    target_matrix: np.ndarray      # rounded target, as serialised
    clean_input: np.ndarray        # rounded clean operand concatenation
    target_exact: np.ndarray       # oracle output before output rounding

    def to_json(self, include_values: bool = True) -> str:
        rec = {
            "task": self.task,
            "index": self.index,
            "m": self.rows,
            "n": self.cols,
            "input_tokens": " ".join(self.input_tokens),
            "output_tokens": " ".join(self.output_tokens),
        }
        if include_values:
            rec["clean_input"] = [float(x) for x in self.clean_input.ravel()]
            rec["target"] = [float(x) for x in self.target_exact.ravel()]
        return json.dumps(rec, separators=(",", ":"))


def _concat_input(task_name: str, operands: list[np.ndarray]) -> np.ndarray:
    if len(operands) == 1:
        return operands[0]
    return serialize.concat_operands(operands, axis="cols")


def _oracle(task_name: str, operands: list[np.ndarray]) -> tuple[np.ndarray, np.ndarray | None]:
    """Target matrix for rounded operands; second slot carries eigen/svd parts unused."""
    a = operands[0]
    if task_name == "transpose":
        return linalg.transpose(a), None
    if task_name == "add":
        return linalg.add(a, operands[1]), None
    if task_name in ("matvec", "matmul"):
        return linalg.matmul(linalg.transpose(a), operands[1]), None
    if task_name == "eigenvalues":
        return linalg.sym_eigen(a).values.reshape(-1, 1), None
    if task_name == "eigenvectors":
        res = linalg.sym_eigen(a)
        return serialize.eigen_output(res.values, res.vectors), None
    if task_name == "singular_values":
        return linalg.singular_values(a).reshape(-1, 1), None
    if task_name == "svd":
        res = linalg.svd(a)
        return serialize.svd_output(res.singular, res.u, res.v), None
    if task_name == "invert":
        return linalg.invert(a), None
    raise ValueError(task_name)


def _draw_operands(task: MatrixTask, rng: np.random.Generator) -> list[np.ndarray]:
    spec = task.input_spec
    rows, cols = spec.dims.draw(rng)
    if spec.symmetric and rows != cols:
        raise ShapeError("symmetric task with non-square draw")
    first = ensembles._sample_kind(rng, spec.kind, rows, cols, spec.symmetric)
    if task.name == "matvec":
        second = ensembles._sample_kind(rng, spec.kind, rows, 1, False)
        return [first, second]
    if task.name in ("add", "matmul"):
        second = ensembles._sample_kind(rng, spec.kind, rows, cols, spec.symmetric)
        return [first, second]
    return [first]


def make_example_with_rng(task: MatrixTask, index: int,
                          rng: np.random.Generator) -> ExampleRecord:
    d_in = task.scheme_in.precision_digits
    d_out = task.scheme_out.precision_digits
    for _ in range(task.max_retries):
        try:
            operands = _draw_operands(task, rng)
            rounded = [serialize.round_matrix(op, d_in) for op in operands]
            if task.name == "invert" and task.max_condition is not None:
                if linalg.condition_number(rounded[0]) > task.max_condition:
                    continue
            if task.noise_level > 0:
                std = task.noise_level * task.input_spec.coefficient_std()
                noisy = [
                    ensembles.add_noise(r, 1.0, std, rng, mirror_symmetric=task.mirror_noise)
                    for r in rounded
                ]
                noisy = [serialize.round_matrix(nm, d_in) for nm in noisy]
            else:
                noisy = rounded
            oracle_in = noisy if task.noise_on_target else rounded
            target, _ = _oracle(task.name, oracle_in)
        except (SingularMatrixError, NoConvergenceError, OverflowError):
            continue
        clean_input = _concat_input(task.name, rounded)
        noisy_input = _concat_input(task.name, noisy)
        input_tokens = serialize.matrix_to_tokens(noisy_input, task.layout_in)
        output_tokens = serialize.matrix_to_tokens(target, task.layout_out)
        if task.max_tokens is not None and (
            len(input_tokens) > task.max_tokens or len(output_tokens) > task.max_tokens
        ):
            continue
        if task.task_prefix:
            input_tokens = [task.task_prefix, *input_tokens]
            output_tokens = [task.task_prefix, *output_tokens]
        return ExampleRecord(
            task=task.name,
            index=index,
            rows=noisy_input.shape[0],
            cols=noisy_input.shape[1],
            input_tokens=input_tokens,
            output_tokens=output_tokens,
            input_matrix=serialize.round_matrix(noisy_input, d_in),
            target_matrix=serialize.round_matrix(target, d_out),
            clean_input=clean_input,
            target_exact=target,
        )
    raise ResampleExhaustedError(
        f"no usable draw for task {task.name!r} index {index} in {task.max_retries} tries"
    )


def make_example(task: MatrixTask, index: int, global_seed: int) -> ExampleRecord:
    """Deterministic example i of the stream defined by (task, global_seed)."""
    return make_example_with_rng(task, index, rng_from((global_seed, index)))


# ---------------------------------------------------------------------------
# Required dimension tokens


def required_max_dim(task: MatrixTask) -> int:
    """Largest V token any record of this task can emit (input or output side)."""
    mr, mc = task.input_spec.dims.max_rows, task.input_spec.dims.max_cols
    name = task.name
    if name == "transpose":
        return max(mr, mc)
    if name == "add" or name == "matmul":
        return max(mr, 2 * mc, mc)
    if name == "matvec":
        return max(mr, mc + 1)
    if name == "eigenvalues" or name == "singular_values" or name == "invert":
        return max(mr, mc)
    if name == "eigenvectors":
        return mr + 1
    return mr + mc + 1  # svd composite


def task_vocabularies(task: MatrixTask) -> tuple[Vocabulary, Vocabulary]:
    """Input and output vocabularies covering every token this task can emit."""
    max_dim = required_max_dim(task)
    extra = (task.task_prefix,) if task.task_prefix else ()
    vin = codec.build_vocabulary(task.scheme_in, max_dim, extra)
    vout = codec.build_vocabulary(task.scheme_out, max_dim, extra)
    return vin, vout


# ---------------------------------------------------------------------------
# Dataset files


def _scheme_dict(s: EncodingScheme) -> dict:
    return {"kind": s.kind, "param": s.param, "precision_digits": s.precision_digits,
            "name": s.name}


def _dims_dict(d: DimSpec) -> dict:
    return {"rows": list(d.rows) if isinstance(d.rows, tuple) else d.rows,
            "cols": list(d.cols) if isinstance(d.cols, tuple) else d.cols}


def _kind_dict(kind) -> dict:
    if isinstance(kind, IidUniform):
        amp = list(kind.amplitude) if isinstance(kind.amplitude, tuple) else kind.amplitude
        return {"kind": "iid_uniform", "amplitude": amp}
    if isinstance(kind, IidGaussian):
        std = list(kind.std) if isinstance(kind.std, tuple) else kind.std
        return {"kind": "iid_gaussian", "std": std}
    if isinstance(kind, IidLaplace):
        return {"kind": "iid_laplace", "std": kind.std}
    if isinstance(kind, SpectralResample):
        return {"kind": "spectral_resample", "family": kind.family, "rel_std": kind.rel_std,
                "ref_amplitude": kind.ref_amplitude, "eig_std": kind.eig_std}
    return {"kind": "mixture", "weights": list(kind.weights),
            "components": [_kind_dict(c) for c in kind.components]}


def _task_dict(task: MatrixTask) -> dict:
    return {
        "name": task.name,
        "ensemble": _kind_dict(task.input_spec.kind),
        "dims": _dims_dict(task.input_spec.dims),
        "symmetric": task.input_spec.symmetric,
        "scheme_in": _scheme_dict(task.scheme_in),
        "scheme_out": _scheme_dict(task.scheme_out),
        "noise_level": task.noise_level,
        "noise_on_target": task.noise_on_target,
        "mirror_noise": task.mirror_noise,
        "task_prefix": task.task_prefix,
        "max_condition": task.max_condition,
        "max_tokens": task.max_tokens,
    }


def _manifest(tasks: Sequence[MatrixTask], count: int, global_seed: int,
              include_values: bool) -> dict:
    vin, vout = task_vocabularies(tasks[0])
    for extra_task in tasks[1:]:
        vi, vo = task_vocabularies(extra_task)
        if len(vi) > len(vin):
            vin = vi
        if len(vo) > len(vout):
            vout = vo
    return {
        "format": DATASET_FORMAT,
        "format_version": DATASET_FORMAT_VERSION,
        "library_version": _version,
        "rng": "pcg64 seeded with SeedSequence((global_seed, index))",
        "global_seed": global_seed,
        "count": count,
        "include_values": include_values,
        "tasks": [_task_dict(t) for t in tasks],
        "vocab_in_sha256": vin.sha256(),
        "vocab_out_sha256": vout.sha256(),
        "max_dim_token": max(required_max_dim(t) for t in tasks),
    }


def manifest_path(path: str | Path) -> Path:
    return Path(str(path) + ".manifest.json")


def _write_records(records: Iterable[str], path: Path) -> None:
    with open(path, "w") as fh:
        for line in records:
            fh.write(line)
            fh.write("\n")


def write_dataset(task: MatrixTask, count: int, global_seed: int, path: str | Path,
                  *, include_values: bool = True, workers: int = 1) -> dict:
    """Stream `count` records to `path` (JSONL) plus a `<path>.manifest.json` sidecar."""
    path = Path(path)
    if count < 0:
        raise ValueError("count must be >= 0")

    def render(index: int) -> str:
        return make_example(task, index, global_seed).to_json(include_values)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            _write_records(pool.map(render, range(count), chunksize=64), path)
    else:
        _write_records(map(render, range(count)), path)
    manifest = _manifest([task], count, global_seed, include_values)
    manifest_path(path).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest


def with_default_prefix(task: MatrixTask) -> MatrixTask:
    if task.task_prefix:
        return task
    return replace(task, task_prefix=DEFAULT_PREFIX[task.name])


def joint_goal(goal: str, **task_kwargs) -> list[MatrixTask]:
    """Tasks named by goal letters (e.g. "TADMEFI"), each with its prefix token."""
    tasks = []
    for letter in goal.upper():
        if letter not in GOAL_LETTERS:
            raise ValueError(f"unknown goal letter {letter!r}; known: {sorted(GOAL_LETTERS)}")
        tasks.append(with_default_prefix(default_task(GOAL_LETTERS[letter], **task_kwargs)))
    return tasks


def make_joint_example(tasks: Sequence[MatrixTask], weights: Sequence[float] | None,
                       index: int, global_seed: int) -> ExampleRecord:
    if weights is None:
        weights = [1.0 / len(tasks)] * len(tasks)
    total = float(sum(weights))
    rng = rng_from((global_seed, index))
    u = float(rng.random()) * total
    acc = 0.0
    chosen = tasks[-1]
    for t, w in zip(tasks, weights):
        acc += w
        if u < acc:
            chosen = t
            break
    return make_example_with_rng(chosen, index, rng)


def make_joint_dataset(tasks: Sequence[MatrixTask], count: int, global_seed: int,
                       path: str | Path, *, weights: Sequence[float] | None = None,
                       include_values: bool = True, workers: int = 1) -> dict:
    """Interleave several prefixed tasks into one dataset file."""
    if not tasks:
        raise ValueError("need at least one task")
    prefixes = [t.task_prefix for t in tasks]
    if any(p is None for p in prefixes):
        raise ValueError("every joint task needs a task_prefix token")
    if len(set(prefixes)) != len(prefixes):
        raise ValueError(f"duplicate prefix tokens: {prefixes}")
    if any(t.scheme_in != tasks[0].scheme_in or t.scheme_out != tasks[0].scheme_out
           for t in tasks):
        raise ValueError("joint tasks must share input and output schemes")
    if weights is not None and (len(weights) != len(tasks) or any(w <= 0 for w in weights)):
        raise ValueError("weights must be positive, one per task")
    path = Path(path)

    def render(index: int) -> str:
        return make_joint_example(tasks, weights, index, global_seed).to_json(include_values)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            _write_records(pool.map(render, range(count), chunksize=64), path)
    else:
        _write_records(map(render, range(count)), path)
    manifest = _manifest(list(tasks), count, global_seed, include_values)
    manifest_path(path).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest


def iter_records(path: str | Path) -> Iterator[dict]:
    """Parsed dataset records; token strings come back as lists."""
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            rec["input_tokens"] = rec["input_tokens"].split()
            rec["output_tokens"] = rec["output_tokens"].split()
            yield rec


def read_manifest(path: str | Path) -> dict:
    return json.loads(manifest_path(path).read_text())


def scheme_from_dict(d: dict) -> EncodingScheme:
    return EncodingScheme(d["kind"], d["param"], d["precision_digits"], d.get("name", ""))


# ---------------------------------------------------------------------------
# The out-of-distribution train/test grid


@dataclass(frozen=True)
class OodSuite:
    """Training ensembles (7 rows) and test ensembles (11 columns) for the
    eigenvalue generalisation study on 5x5 symmetric matrices."""

    base_seed: int
    sigma_train: float
    train_specs: dict[str, EnsembleSpec]
    test_specs: dict[str, EnsembleSpec]

    def seed_for(self, name: str) -> tuple[int, int]:
        names = [*self.train_specs, *self.test_specs]
        return (self.base_seed, names.index(name))


def ood_suite(base_seed: int = 0, n: int = 5) -> OodSuite:
    dims = square_dims(n)

    def sym(kind) -> EnsembleSpec:
        return EnsembleSpec(kind, dims, symmetric=True)

    half = (0.5, 0.5)
    train = {
        "wigner_baseline": sym(IidUniform(10.0)),
        "wigner_amplitude_1_100": sym(IidUniform((1.0, 100.0))),
        "wigner_positive": sym(Mixture((IidUniform(10.0), SpectralResample("positive")), half)),
        "wigner_gaussian": sym(Mixture((IidUniform(10.0), SpectralResample("gaussian")), half)),
        "wigner_laplace": sym(Mixture((IidUniform(10.0), SpectralResample("laplace")), half)),
        "laplace": sym(SpectralResample("laplace")),
        "gaussian_uniform_laplace": sym(Mixture((
            SpectralResample("gaussian"), SpectralResample("uniform"),
            SpectralResample("laplace")))),
    }
    test = {}
    for ratio in (0.3, 1.0, 1.2):
        test[f"wigner_{ratio:g}"] = sym(IidUniform(10.0 * ratio))
    for family in ("positive", "uniform", "gaussian", "laplace"):
        for ratio in (0.6, 1.0):
            test[f"{family}_{ratio:g}"] = sym(SpectralResample(family, rel_std=ratio))
    return OodSuite(base_seed, 10.0 / np.sqrt(3.0), train, test)
