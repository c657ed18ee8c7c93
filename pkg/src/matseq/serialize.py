"""Matrix <-> token-sequence serialisation.

A matrix is spelled as two dimension tokens (``Vm``, ``Vn``) followed by its
coefficients in row-major order, each rounded to the scheme's precision and
encoded. Composite outputs (several matrices in one) are stacked into a single
matrix before serialisation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import codec
from .codec import EncodingScheme
from .errors import ParseError, RangeError, ShapeError


@dataclass(frozen=True)
class SequenceLayout:
    scheme: EncodingScheme
    emit_dims: bool = True

    def token_length(self, rows: int, cols: int) -> int:
        head = 2 if self.emit_dims else 0
        return head + rows * cols * self.scheme.tokens_per_number


def as_matrix(data) -> np.ndarray:
    """Validate and normalise to a 2-d float array (vectors become columns)."""
    m = np.asarray(data, dtype=float)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2 or m.size == 0:
        raise ShapeError(f"expected a non-empty 2-d matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ShapeError("matrix coefficients must be finite")
    return m


def round_matrix(m, digits: int = 3) -> np.ndarray:
    """Coefficient-wise rounding to `digits` significant decimal digits."""
    m = as_matrix(m)
    out = np.empty_like(m)
    flat_in, flat_out = m.ravel(), out.ravel()
    for i, x in enumerate(flat_in):
        flat_out[i] = codec.triplet_to_value(codec.round_to_triplet(x, digits))
    return out


def matrix_to_tokens(m, layout: SequenceLayout) -> list[str]:
    """Serialise a matrix: [Vrows, Vcols] then rounded row-major coefficients."""
    m = as_matrix(m)
    rows, cols = m.shape
    scheme = layout.scheme
    tokens: list[str] = []
    if layout.emit_dims:
        tokens.append(codec.dimension_token(rows))
        tokens.append(codec.dimension_token(cols))
    for i in range(rows):
        for j in range(cols):
            try:
                t = codec.round_to_triplet(m[i, j], scheme.precision_digits)
                tokens.extend(codec.encode_number(t, scheme, check_range=True))
            except (OverflowError, RangeError) as err:
                raise type(err)(f"coefficient ({i}, {j}): {err}") from err
    return tokens


def tokens_to_matrix(tokens: Sequence[str], layout: SequenceLayout,
                     shape: tuple[int, int] | None = None) -> np.ndarray:
    """Strict inverse of matrix_to_tokens.

    With emit_dims the shape comes from the leading V tokens; otherwise it
    must be supplied. Any malformation (missing dimensions, wrong element
    count, bad coefficient, trailing tokens) raises ParseError.
    """
    scheme = layout.scheme
    pos = 0
    if layout.emit_dims:
        if len(tokens) < 2:
            raise ParseError("missing dimension tokens", len(tokens))
        rows = codec.parse_dimension_token(tokens[0])
        if rows is None:
            raise ParseError(f"expected row-dimension token, got {tokens[0]!r}", 0)
        cols = codec.parse_dimension_token(tokens[1])
        if cols is None:
            raise ParseError(f"expected column-dimension token, got {tokens[1]!r}", 1)
        pos = 2
    else:
        if shape is None:
            raise ValueError("shape is required when the layout omits dimension tokens")
        rows, cols = shape
    arity = scheme.tokens_per_number
    expected = pos + rows * cols * arity
    if len(tokens) != expected:
        raise ParseError(
            f"a {rows}x{cols} matrix takes {expected} tokens, got {len(tokens)}",
            min(len(tokens), expected),
        )
    out = np.empty((rows, cols))
    flat = out.ravel()
    for k in range(rows * cols):
        t = codec.decode_number(tokens[pos:pos + arity], scheme, offset=pos)
        flat[k] = codec.triplet_to_value(t)
        pos += arity
    return out


def concat_operands(ms: Sequence[np.ndarray], axis: str = "cols") -> np.ndarray:
    """Concatenate operand matrices into one ("cols" side by side, "rows" stacked)."""
    if axis not in ("rows", "cols"):
        raise ValueError("axis must be 'rows' or 'cols'")
    mats = [as_matrix(m) for m in ms]
    try:
        return np.concatenate(mats, axis=0 if axis == "rows" else 1)
    except ValueError as err:
        raise ShapeError(f"incompatible operand shapes {[m.shape for m in mats]}") from err


def eigen_output(values, vectors) -> np.ndarray:
    """Stack sorted eigenvalues (first row) over the eigenvector matrix: (n+1) x n."""
    values = np.asarray(values, dtype=float).reshape(1, -1)
    vectors = as_matrix(vectors)
    if values.shape[1] != vectors.shape[1] or vectors.shape[0] != vectors.shape[1]:
        raise ShapeError(
            f"need n values over an n x n matrix, got {values.shape[1]} and {vectors.shape}"
        )
    return np.vstack([values, vectors])


def svd_output(singular, u, v) -> np.ndarray:
    """Stack [singular-value row; U^T; V] into the (m+n+1) x min(m,n) composite.

    U is k x m with rows = left singular vectors, V is n x k with columns =
    right singular vectors, k = min(m, n).
    """
    singular = np.asarray(singular, dtype=float).reshape(1, -1)
    u = as_matrix(u)
    v = as_matrix(v)
    k = singular.shape[1]
    if u.shape[0] != k or v.shape[1] != k:
        raise ShapeError(f"need U k x m and V n x k with k={k}, got {u.shape} and {v.shape}")
    return np.vstack([singular, u.T, v])
