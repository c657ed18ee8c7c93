"""Tolerance-based scoring of predicted token sequences.

A prediction is correct when it parses into a matrix of the expected shape
and satisfies the task's verification formula within a relative tolerance:
generic ||P - O|| < tau ||O||; eigen pairs must re-diagonalise the input,
||H I H^T - D|| < tau ||D||; SVD triples must satisfy ||U I V - S|| < tau ||S||;
inverses must satisfy ||P I - Id|| < tau ||Id||. Entrywise norms: l1 = sum of
absolute values, l2 = sum of squares, linf = max absolute value.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import datasets, linalg
from .errors import ParseError, ShapeError
from .serialize import SequenceLayout, tokens_to_matrix

NORMS = ("l1", "l2", "linf")

CORRECT = "correct"
INCORRECT = "incorrect"
ILL_FORMED = "ill_formed"


def matrix_norm(a: np.ndarray, norm: str = "l1") -> float:
    a = np.asarray(a, dtype=float)
    if norm == "l1":
        return float(np.abs(a).sum())
    if norm == "l2":
        return float((a * a).sum())
    if norm == "linf":
        return float(np.abs(a).max())
    raise ValueError(f"unknown norm {norm!r}; expected one of {NORMS}")


def rel_error(p: np.ndarray, o: np.ndarray, norm: str = "l1") -> float:
    """||P - O|| / ||O||; 0 when both vanish, inf when only the reference does."""
    p, o = np.asarray(p, dtype=float), np.asarray(o, dtype=float)
    if p.shape != o.shape:
        raise ShapeError(f"shape mismatch {p.shape} vs {o.shape}")
    err = matrix_norm(p - o, norm)
    ref = matrix_norm(o, norm)
    if ref == 0.0:
        return 0.0 if err == 0.0 else float("inf")
    return err / ref


def split_eigen_composite(mat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(values, H) from the (n+1) x n stack; rows of H are the eigenvectors."""
    mat = np.asarray(mat, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1] + 1:
        raise ShapeError(f"eigen composite must be (n+1) x n, got {mat.shape}")
    return mat[0], mat[1:]


def split_svd_composite(mat: np.ndarray, rows: int, cols: int):
    """(singular, U, V) from the (rows+cols+1) x k stack of an SVD target."""
    mat = np.asarray(mat, dtype=float)
    k = min(rows, cols)
    if mat.shape != (rows + cols + 1, k):
        raise ShapeError(f"svd composite must be {(rows + cols + 1, k)}, got {mat.shape}")
    return mat[0], mat[1:1 + rows].T, mat[1 + rows:]


def _within(err: float, tol: float, ref: float) -> bool:
    if tol == 0.0:
        return err == 0.0
    return err < tol * ref


def check_matrices(task: str, input_matrix: np.ndarray | None, predicted: np.ndarray,
                   target: np.ndarray, tol: float, norm: str = "l1",
                   strict_identity_norm: bool = False) -> bool:
    """Task verification formula on already-parsed matrices."""
    if task == "eigenvectors":
        values, h = split_eigen_composite(predicted)
        d = np.diag(values)
        err = matrix_norm(h @ input_matrix @ h.T - d, norm)
        return _within(err, tol, matrix_norm(d, norm))
    if task == "svd":
        rows, cols = input_matrix.shape
        sig, u, v = split_svd_composite(predicted, rows, cols)
        s = np.diag(sig)
        err = matrix_norm(u @ input_matrix @ v - s, norm)
        return _within(err, tol, matrix_norm(s, norm))
    if task == "invert":
        n = input_matrix.shape[0]
        err = matrix_norm(predicted @ input_matrix - np.eye(n), norm)
        ref = 1.0 if strict_identity_norm else matrix_norm(np.eye(n), norm)
        return _within(err, tol, ref)
    err = matrix_norm(predicted - target, norm)
    return _within(err, tol, matrix_norm(target, norm))


def check_prediction(task: str, input_matrix: np.ndarray | None,
                     predicted_tokens: Sequence[str], target: np.ndarray,
                     tol: float, norm: str = "l1", *, layout: SequenceLayout,
                     strict_identity_norm: bool = False) -> str:
    """Verdict for one predicted token sequence: correct / incorrect / ill_formed."""
    try:
        predicted = tokens_to_matrix(predicted_tokens, layout)
    except ParseError:
        return ILL_FORMED
    if predicted.shape != target.shape:
        return ILL_FORMED
    ok = check_matrices(task, input_matrix, predicted, target, tol, norm,
                        strict_identity_norm)
    return CORRECT if ok else INCORRECT


# ---------------------------------------------------------------------------
# Failure diagnostics


@dataclass(frozen=True)
class EigvecDiagnostics:
    """Structure metrics of a predicted eigen pair.

    `vector_norms` are the norms of the predicted eigenvectors (the rows of
    the parsed H block); `successive_dots` are dot products of consecutive
    eigenvectors; `weak_residual` is ||H^T D H - I||_1 / ||I||_1, the
    reconstruction error of the input matrix; `cond` is the condition number
    of H (1 exactly when H is orthogonal).
    """

    eigenvalue_rel_error: float
    vector_norms: np.ndarray
    successive_dots: np.ndarray
    weak_residual: float
    cond: float


def eigvec_diagnostics(input_matrix: np.ndarray, prediction: np.ndarray) -> EigvecDiagnostics:
    values, h = split_eigen_composite(prediction)
    true_values = linalg.sym_eigen(input_matrix).values
    eig_err = rel_error(values.reshape(-1, 1), true_values.reshape(-1, 1), "l1")
    norms = np.sqrt((h * h).sum(axis=1))
    dots = (h[:-1] * h[1:]).sum(axis=1)
    weak = rel_error(h.T @ np.diag(values) @ h, input_matrix, "l1")
    return EigvecDiagnostics(eig_err, norms, dots, weak, linalg.condition_number(h))


@dataclass(frozen=True)
class InverseDiagnostics:
    """identity_residual is ||P I - Id||_1 / n (the task check, per coefficient);
    inverse_distance is ||P - I^-1||_1 / ||I^-1||_1 (the training objective);
    input_cond predicts which of the two blows up."""

    identity_residual: float
    inverse_distance: float
    input_cond: float


def inverse_diagnostics(input_matrix: np.ndarray, predicted: np.ndarray,
                        true_inverse: np.ndarray | None = None) -> InverseDiagnostics:
    n = input_matrix.shape[0]
    if true_inverse is None:
        true_inverse = linalg.invert(input_matrix)
    residual = matrix_norm(predicted @ input_matrix - np.eye(n), "l1") / n
    distance = rel_error(predicted, true_inverse, "l1")
    return InverseDiagnostics(residual, distance, linalg.condition_number(input_matrix))


# ---------------------------------------------------------------------------
# File-level scoring


@dataclass
class EvalReport:
    total: int
    well_formed: int
    tolerances: tuple[float, ...]
    norms: tuple[str, ...]
    correct: dict[tuple[float, str], int]
    diagnostics: list[dict] = field(default_factory=list)

    def accuracy(self, tol: float, norm: str = "l1") -> float:
        if self.total == 0:
            return 0.0
        return self.correct[(tol, norm)] / self.total

    def to_text(self) -> str:
        lines = [f"records: {self.total}   well-formed: {self.well_formed}"]
        header = "tolerance " + " ".join(f"{n:>10}" for n in self.norms)
        lines.append(header)
        for tol in self.tolerances:
            row = f"{tol * 100:7.2f}%  " + " ".join(
                f"{self.accuracy(tol, n):10.4f}" for n in self.norms
            )
            lines.append(row)
        return "\n".join(lines)

    def accuracy_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["tolerance", *self.norms])
        for tol in self.tolerances:
            writer.writerow([tol, *[self.accuracy(tol, n) for n in self.norms]])
        return buf.getvalue()


def read_predictions(path: str | Path) -> list[list[str]]:
    """One space-separated token sequence per line, aligned with the dataset."""
    lines = Path(path).read_text().splitlines()
    return [line.split() for line in lines]


def score_file(dataset_path: str | Path, predictions_path: str | Path,
               tolerances: Sequence[float], norms: Sequence[str] = ("l1",),
               *, diagnostics: bool = False,
               strict_identity_norm: bool = False) -> EvalReport:
    """Score a predictions file against a dataset file, line by line."""
    manifest = datasets.read_manifest(dataset_path)
    task_info = {t["name"]: t for t in manifest["tasks"]}
    layouts_in = {n: SequenceLayout(datasets.scheme_from_dict(t["scheme_in"]))
                  for n, t in task_info.items()}
    layouts_out = {n: SequenceLayout(datasets.scheme_from_dict(t["scheme_out"]))
                   for n, t in task_info.items()}
    predictions = read_predictions(predictions_path)
    records = list(datasets.iter_records(dataset_path))
    if len(records) != len(predictions):
        raise ValueError(
            f"dataset has {len(records)} records but predictions file has "
            f"{len(predictions)} lines"
        )
    if not records:
        raise ValueError("empty dataset")

    tolerances = tuple(tolerances)
    norms = tuple(norms)
    for n in norms:
        matrix_norm(np.zeros((1, 1)), n)  # validate names early
    correct = {(tol, n): 0 for tol in tolerances for n in norms}
    well_formed = 0
    diag_rows: list[dict] = []

    for rec, pred in zip(records, predictions):
        task = rec["task"]
        info = task_info[task]
        prefix = info.get("task_prefix")
        out_tokens = rec["output_tokens"]
        in_tokens = rec["input_tokens"]
        if prefix:
            out_tokens = out_tokens[1:]
            in_tokens = in_tokens[1:]
            if pred and pred[0] == prefix:
                pred = pred[1:]
            else:
                pred = None  # missing prefix: not well formed
        target = tokens_to_matrix(out_tokens, layouts_out[task])
        input_matrix = tokens_to_matrix(in_tokens, layouts_in[task])
        parsed = None
        if pred is not None:
            try:
                parsed = tokens_to_matrix(pred, layouts_out[task])
            except ParseError:
                parsed = None
        if parsed is not None and parsed.shape != target.shape:
            parsed = None
        if parsed is None:
            continue  # counts as incorrect everywhere
        well_formed += 1
        for tol in tolerances:
            for n in norms:
                if check_matrices(task, input_matrix, parsed, target, tol, n,
                                  strict_identity_norm):
                    correct[(tol, n)] += 1
        if diagnostics and task == "eigenvectors":
            d = eigvec_diagnostics(input_matrix, parsed)
            diag_rows.append({
                "index": rec["index"], "task": task,
                "eigenvalue_rel_error": d.eigenvalue_rel_error,
                "min_vector_norm": float(d.vector_norms.min()),
                "max_vector_norm": float(d.vector_norms.max()),
                "max_abs_dot": float(np.abs(d.successive_dots).max()),
                "weak_residual": d.weak_residual,
                "cond": d.cond,
            })
        elif diagnostics and task == "invert":
            true_inv = None
            if "target" in rec and rec["target"] is not None:
                true_inv = np.array(rec["target"], dtype=float).reshape(target.shape)
            d = inverse_diagnostics(input_matrix, parsed, true_inv)
            diag_rows.append({
                "index": rec["index"], "task": task,
                "identity_residual": d.identity_residual,
                "inverse_distance": d.inverse_distance,
                "input_cond": d.input_cond,
            })

    return EvalReport(len(records), well_formed, tolerances, norms, correct, diag_rows)


def write_predictions(token_lists: Sequence[Sequence[str]], path: str | Path) -> None:
    with open(path, "w") as fh:
        for tokens in token_lists:
            fh.write(" ".join(tokens))
            fh.write("\n")
