"""Token codecs for reals in scientific notation.

A real number is normalised to a triplet (sign, mantissa, exponent) with a
fixed number of significant decimal digits, then spelled as tokens under one
of several schemes:

* positional base B  — sign token, mantissa digits in base B, exponent token
  (presets P10, P100, P1000, P10000),
* balanced base 2a+1 — signed mantissa digits in [-a, a], exponent token
  (preset B1999),
* single float token — the whole number as one ``FPm/b`` token (preset FP15).

All schemes share the exponent token spelling ``E<int>`` and the zero
convention ``+0 * 10^0``.
"""

from __future__ import annotations

import decimal
import hashlib
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .errors import ParseError, RangeError

EXP_MIN = -100
EXP_MAX = 100

_ROUND_CTX = {
    d: decimal.Context(prec=d, rounding=decimal.ROUND_HALF_UP) for d in (2, 3, 4)
}

_DIGIT_RE = re.compile(r"^(?:0|-?[1-9][0-9]*)$")
_EXP_RE = re.compile(r"^E(0|-?[1-9][0-9]*)$")
_FP_RE = re.compile(r"^FP(0|-?[1-9][0-9]*)/(0|-?[1-9][0-9]*)$")
_DIM_RE = re.compile(r"^V([1-9][0-9]*)$")


@dataclass(frozen=True)
class FloatTriplet:
    """Canonical (sign, mantissa, exponent) form: value = sign * mantissa * 10**exponent.

    The mantissa is 0 (zero convention: sign +1, exponent 0) or an integer
    whose decimal digit count is the precision of the triplet.
    """

    sign: int
    mantissa: int
    exponent: int

    def __post_init__(self):
        if self.sign not in (-1, 1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign}")
        if self.mantissa < 0:
            raise ValueError("mantissa carries no sign; use the sign field")
        if self.mantissa == 0 and (self.sign != 1 or self.exponent != 0):
            raise ValueError("zero must be encoded as (+1, 0, 0)")
        if not EXP_MIN <= self.exponent <= EXP_MAX:
            raise ValueError(f"exponent {self.exponent} outside [{EXP_MIN}, {EXP_MAX}]")

    @property
    def digits(self) -> int:
        """Number of significant decimal digits (0 for the zero triplet)."""
        return 0 if self.mantissa == 0 else len(str(self.mantissa))

    @property
    def signed_mantissa(self) -> int:
        return self.sign * self.mantissa


ZERO_TRIPLET = FloatTriplet(1, 0, 0)


def round_to_triplet(x: float, digits: int = 3) -> FloatTriplet:
    """Round `x` to `digits` significant digits, half away from zero.

    Rounding happens on the shortest decimal string of the float, so what a
    human reads is what gets rounded.  Raises OverflowError when the rounded
    exponent leaves [-100, 100] (the magnitude is not encodable).
    """
    if digits not in (2, 3, 4):
        raise ValueError(f"precision must be 2, 3 or 4 digits, got {digits}")
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot encode non-finite value {x!r}")
    if x == 0.0:
        return ZERO_TRIPLET
    rounded = _ROUND_CTX[digits].plus(decimal.Decimal(repr(x)))
    sign_bit, digs, exp = rounded.as_tuple()
    pad = digits - len(digs)
    mantissa = int("".join(map(str, digs))) * 10**pad
    exponent = int(exp) - pad
    if not EXP_MIN <= exponent <= EXP_MAX:
        raise OverflowError(
            f"{x!r} rounds to exponent {exponent}, outside [{EXP_MIN}, {EXP_MAX}]"
        )
    return FloatTriplet(-1 if sign_bit else 1, mantissa, exponent)


def triplet_to_value(t: FloatTriplet) -> float:
    """Exact decimal value of a triplet, correctly rounded to binary."""
    return float(f"{t.signed_mantissa}e{t.exponent}")


def rescale_triplet(t: FloatTriplet, digits: int) -> FloatTriplet:
    """Rewrite `t` with exactly `digits` significant digits (exact, no re-rounding).

    Raises RangeError when `t` already carries more digits than requested
    (that would need re-rounding) or when the rescaled exponent underflows.
    """
    if t.mantissa == 0:
        return t
    delta = digits - t.digits
    if delta < 0:
        raise RangeError(
            f"mantissa {t.mantissa} has {t.digits} digits; re-round to {digits} first"
        )
    if delta == 0:
        return t
    exponent = t.exponent - delta
    if exponent < EXP_MIN:
        raise RangeError(f"rescaling to {digits} digits underflows the exponent range")
    return FloatTriplet(t.sign, t.mantissa * 10**delta, exponent)


# ---------------------------------------------------------------------------
# Encoding schemes


@dataclass(frozen=True)
class EncodingScheme:
    """A parameterised token codec.

    kind is one of "positional" (param = base B >= 2), "balanced"
    (param = a >= 1, digits in [-a, a], base 2a+1) or "float" (param = p,
    even and >= 0, single-token encoding with rewrite exponent in
    [-(p+2)/2, (p+2)/2]).
    """

    kind: str
    param: int
    precision_digits: int = 3
    name: str = ""

    def __post_init__(self):
        if self.precision_digits not in (2, 3, 4):
            raise ValueError("precision_digits must be 2, 3 or 4")
        if self.kind == "positional":
            if self.param < 2:
                raise ValueError("positional base must be >= 2")
        elif self.kind == "balanced":
            if self.param < 1:
                raise ValueError("balanced parameter a must be >= 1")
        elif self.kind == "float":
            if self.param < 0 or self.param % 2:
                raise ValueError("float-token parameter p must be even and >= 0")
        else:
            raise ValueError(f"unknown scheme kind {self.kind!r}")

    # -- derived quantities -------------------------------------------------

    @property
    def mantissa_max(self) -> int:
        return 10**self.precision_digits - 1

    @property
    def mantissa_min(self) -> int:
        return 10 ** (self.precision_digits - 1)

    @property
    def mantissa_token_count(self) -> int:
        """Digit tokens spent on the mantissa."""
        if self.kind == "positional":
            k = 1
            while self.param**k <= self.mantissa_max:
                k += 1
            return k
        if self.kind == "balanced":
            base = 2 * self.param + 1
            k = 1
            while (base**k - 1) // 2 < self.mantissa_max:
                k += 1
            return k
        return 0

    @property
    def tokens_per_number(self) -> int:
        if self.kind == "positional":
            return self.mantissa_token_count + 2
        if self.kind == "balanced":
            return self.mantissa_token_count + 1
        return 1

    @property
    def float_exp_bound(self) -> int:
        """Rewrite-exponent bound of the single-token scheme (dynamic range 10**(p+2))."""
        if self.kind != "float":
            raise ValueError("only float-token schemes bound the rewrite exponent")
        return (self.param + 2) // 2

    def exponent_in_vocabulary(self, t: FloatTriplet) -> bool:
        """Whether the triplet's tokens all belong to this scheme's vocabulary."""
        if self.kind == "float" and t.mantissa != 0:
            return abs(t.exponent) <= self.float_exp_bound
        return True

    def label(self) -> str:
        if self.name:
            return self.name
        tag = {"positional": "P", "balanced": "B", "float": "FP"}[self.kind]
        return f"{tag}{self.param}(d={self.precision_digits})"


def positional_base(base: int, digits: int = 3, name: str = "") -> EncodingScheme:
    return EncodingScheme("positional", base, digits, name)


def balanced_base(a: int, digits: int = 3, name: str = "") -> EncodingScheme:
    return EncodingScheme("balanced", a, digits, name)


def float_token(p: int, digits: int = 3, name: str = "") -> EncodingScheme:
    return EncodingScheme("float", p, digits, name)


P10 = positional_base(10, 3, "P10")
P100 = positional_base(100, 2, "P100")
P1000 = positional_base(1000, 3, "P1000")
P10000 = positional_base(10000, 4, "P10000")
B1999 = balanced_base(999, 3, "B1999")
FP15 = float_token(14, 3, "FP15")

SCHEMES = {s.name: s for s in (P10, P100, P1000, P10000, B1999, FP15)}


def get_scheme(name: str) -> EncodingScheme:
    try:
        return SCHEMES[name.upper()]
    except KeyError:
        raise ValueError(f"unknown scheme {name!r}; expected one of {sorted(SCHEMES)}") from None


# ---------------------------------------------------------------------------
# Number <-> tokens


def _positional_digits(m: int, base: int, k: int) -> list[int]:
    digs = [0] * k
    for i in range(k - 1, -1, -1):
        m, digs[i] = divmod(m, base)
    return digs


def _balanced_digits(sm: int, a: int, k: int) -> list[int]:
    base = 2 * a + 1
    digs = [0] * k
    for i in range(k - 1, -1, -1):
        r = ((sm + a) % base) - a
        digs[i] = r
        sm = (sm - r) // base
    return digs


def encode_number(t: FloatTriplet, scheme: EncodingScheme, *, check_range: bool = False) -> list[str]:
    """Spell a triplet as tokens under `scheme`.

    Spelling is total for any triplet at the scheme's precision; pass
    check_range=True to additionally enforce the float-token dynamic-range
    bound (RangeError), which is what matrix serialisation does so that every
    emitted token belongs to the scheme's vocabulary.
    """
    if t.mantissa != 0 and t.digits != scheme.precision_digits:
        t = rescale_triplet(t, scheme.precision_digits)
    if check_range and not scheme.exponent_in_vocabulary(t):
        raise RangeError(
            f"rewrite exponent {t.exponent} exceeds +/-{scheme.float_exp_bound} "
            f"of {scheme.label()}"
        )
    if scheme.kind == "positional":
        digs = _positional_digits(t.mantissa, scheme.param, scheme.mantissa_token_count)
        sign = "+" if t.sign > 0 else "-"
        return [sign, *map(str, digs), f"E{t.exponent}"]
    if scheme.kind == "balanced":
        digs = _balanced_digits(t.signed_mantissa, scheme.param, scheme.mantissa_token_count)
        return [*map(str, digs), f"E{t.exponent}"]
    return [f"FP{t.signed_mantissa}/{t.exponent}"]


def _parse_exponent(tok: str, position: int) -> int:
    m = _EXP_RE.match(tok)
    if not m:
        raise ParseError(f"expected exponent token, got {tok!r}", position)
    e = int(m.group(1))
    if not EXP_MIN <= e <= EXP_MAX:
        raise ParseError(f"exponent {e} outside [{EXP_MIN}, {EXP_MAX}]", position)
    return e


def _validate_mantissa(sign: int, mantissa: int, exponent: int, scheme: EncodingScheme,
                       position: int) -> FloatTriplet:
    if mantissa == 0:
        if sign != 1 or exponent != 0:
            raise ParseError("zero must be spelled with sign + and exponent E0", position)
        return ZERO_TRIPLET
    if not scheme.mantissa_min <= mantissa <= scheme.mantissa_max:
        raise ParseError(
            f"mantissa {mantissa} outside [{scheme.mantissa_min}, {scheme.mantissa_max}]",
            position,
        )
    return FloatTriplet(sign, mantissa, exponent)


def decode_number(tokens: Sequence[str], scheme: EncodingScheme, *, offset: int = 0) -> FloatTriplet:
    """Parse one number's tokens back into a triplet (strict inverse of encode_number).

    `offset` shifts reported error positions when the tokens are a slice of a
    longer sequence.
    """
    arity = scheme.tokens_per_number
    if len(tokens) != arity:
        raise ParseError(
            f"{scheme.label()} numbers take {arity} tokens, got {len(tokens)}",
            offset + len(tokens),
        )
    if scheme.kind == "float":
        m = _FP_RE.match(tokens[0])
        if not m:
            raise ParseError(f"expected FPm/b token, got {tokens[0]!r}", offset)
        sm, b = int(m.group(1)), int(m.group(2))
        if not EXP_MIN <= b <= EXP_MAX:
            raise ParseError(f"exponent {b} outside [{EXP_MIN}, {EXP_MAX}]", offset)
        return _validate_mantissa(-1 if sm < 0 else 1, abs(sm), b, scheme, offset)

    if scheme.kind == "positional":
        sign_tok = tokens[0]
        if sign_tok not in ("+", "-"):
            raise ParseError(f"expected sign token, got {sign_tok!r}", offset)
        sign = 1 if sign_tok == "+" else -1
        mantissa = 0
        for i, tok in enumerate(tokens[1:-1], start=1):
            if not _DIGIT_RE.match(tok) or not 0 <= int(tok) < scheme.param:
                raise ParseError(f"digit {tok!r} out of base {scheme.param}", offset + i)
            mantissa = mantissa * scheme.param + int(tok)
        exponent = _parse_exponent(tokens[-1], offset + arity - 1)
        return _validate_mantissa(sign, mantissa, exponent, scheme, offset)

    a = scheme.param
    base = 2 * a + 1
    sm = 0
    for i, tok in enumerate(tokens[:-1]):
        if not _DIGIT_RE.match(tok) or abs(int(tok)) > a:
            raise ParseError(f"balanced digit {tok!r} outside [-{a}, {a}]", offset + i)
        sm = sm * base + int(tok)
    exponent = _parse_exponent(tokens[-1], offset + arity - 1)
    return _validate_mantissa(-1 if sm < 0 else 1, abs(sm), exponent, scheme, offset)


# ---------------------------------------------------------------------------
# Vocabularies


@dataclass(frozen=True)
class Vocabulary:
    """Ordered, immutable token table; index of a token is its line number on disk."""

    tokens: tuple[str, ...]
    index: dict[str, int] = field(repr=False, compare=False, default_factory=dict)

    def __post_init__(self):
        idx = {tok: i for i, tok in enumerate(self.tokens)}
        if len(idx) != len(self.tokens):
            raise ValueError("vocabulary tokens must be unique")
        object.__setattr__(self, "index", idx)

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: str) -> bool:
        return token in self.index

    def index_of(self, token: str) -> int:
        return self.index[token]

    def to_text(self) -> str:
        return "\n".join(self.tokens) + "\n"

    def sha256(self) -> str:
        return hashlib.sha256(self.to_text().encode()).hexdigest()

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def load(cls, path: str | Path) -> "Vocabulary":
        lines = Path(path).read_text().splitlines()
        return cls(tuple(lines))


def _number_tokens(scheme: EncodingScheme) -> list[str]:
    exps = [f"E{e}" for e in range(EXP_MIN, EXP_MAX + 1)]
    mantissas = [0, *range(scheme.mantissa_min, scheme.mantissa_max + 1)]
    if scheme.kind == "positional":
        digit_values: set[int] = set()
        for m in mantissas:
            digit_values.update(_positional_digits(m, scheme.param, scheme.mantissa_token_count))
        return ["+", "-", *map(str, sorted(digit_values)), *exps]
    if scheme.kind == "balanced":
        digit_values = set()
        for m in mantissas:
            for sm in {m, -m}:
                digit_values.update(_balanced_digits(sm, scheme.param, scheme.mantissa_token_count))
        return [*map(str, sorted(digit_values)), *exps]
    bound = scheme.float_exp_bound
    toks = ["FP0/0"]
    for sm in range(-scheme.mantissa_max, scheme.mantissa_max + 1):
        if abs(sm) < scheme.mantissa_min:
            continue
        toks.extend(f"FP{sm}/{b}" for b in range(-bound, bound + 1))
    return toks


def dimension_token(n: int) -> str:
    if n < 1:
        raise ValueError("dimension tokens start at V1")
    return f"V{n}"


def parse_dimension_token(tok: str) -> int | None:
    m = _DIM_RE.match(tok)
    return int(m.group(1)) if m else None


def build_vocabulary(scheme: EncodingScheme, max_dim: int = 0,
                     task_tokens: Iterable[str] = ()) -> Vocabulary:
    """Deterministic vocabulary: number tokens, then V1..Vmax, then task tokens."""
    if max_dim < 0:
        raise ValueError("max_dim must be >= 0")
    tokens = _number_tokens(scheme)
    tokens.extend(dimension_token(n) for n in range(1, max_dim + 1))
    tokens.extend(task_tokens)
    return Vocabulary(tuple(tokens))
