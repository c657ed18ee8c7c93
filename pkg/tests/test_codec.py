"""Number codec: rounding, the four encodings, vocabularies."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from matseq import codec
from matseq.codec import (
    B1999,
    FP15,
    P10,
    P100,
    P1000,
    P10000,
    EncodingScheme,
    FloatTriplet,
    balanced_base,
    build_vocabulary,
    decode_number,
    encode_number,
    float_token,
    positional_base,
    round_to_triplet,
    triplet_to_value,
)
from matseq.errors import ParseError, RangeError

from oracles import round_sig_string

ALL_PRESETS = (P10, P100, P1000, P10000, B1999, FP15)


# --- rounding ---------------------------------------------------------------

def test_round_worked_examples():
    assert round_to_triplet(23.14069) == FloatTriplet(1, 231, -1)
    assert round_to_triplet(-0.5) == FloatTriplet(-1, 500, -3)
    assert round_to_triplet(0.0) == FloatTriplet(1, 0, 0)
    assert round_to_triplet(-0.0) == FloatTriplet(1, 0, 0)
    assert round_to_triplet(999.96) == FloatTriplet(1, 100, 1)
    assert round_to_triplet(3.14) == FloatTriplet(1, 314, -2)
    assert round_to_triplet(-6.02e23) == FloatTriplet(-1, 602, 21)


def test_round_half_away_from_zero_on_decimal_string():
    assert round_to_triplet(2.345).mantissa == 235
    assert round_to_triplet(-2.345) == FloatTriplet(-1, 235, -2)
    assert round_to_triplet(998.5).mantissa == 999  # half-even would give 998


def test_round_precisions():
    assert round_to_triplet(23.14069, 2) == FloatTriplet(1, 23, 0)
    assert round_to_triplet(23.14069, 4) == FloatTriplet(1, 2314, -2)
    with pytest.raises(ValueError):
        round_to_triplet(1.0, 5)


def test_round_overflow():
    with pytest.raises(OverflowError):
        round_to_triplet(1e200)
    with pytest.raises(OverflowError):
        round_to_triplet(1e-150)
    with pytest.raises(ValueError):
        round_to_triplet(float("nan"))
    # extremes that stay inside the exponent clamp
    assert round_to_triplet(9.98e102).exponent == 100
    assert round_to_triplet(1.23e-98).exponent == -100


def test_round_matches_string_oracle():
    rng = np.random.default_rng(1)
    vals = np.sign(rng.standard_normal(3000)) * 10.0 ** rng.uniform(-30, 30, 3000) \
        * rng.uniform(1.0, 10.0, 3000)
    for v in vals:
        for d in (2, 3, 4):
            t = round_to_triplet(float(v), d)
            assert (t.sign, t.mantissa, t.exponent) == round_sig_string(float(v), d)


def test_triplet_invariants():
    with pytest.raises(ValueError):
        FloatTriplet(0, 314, 0)
    with pytest.raises(ValueError):
        FloatTriplet(1, -5, 0)
    with pytest.raises(ValueError):
        FloatTriplet(1, 0, 3)  # zero must carry exponent 0
    with pytest.raises(ValueError):
        FloatTriplet(-1, 0, 0)  # and sign +
    with pytest.raises(ValueError):
        FloatTriplet(1, 100, 101)


def test_triplet_to_value():
    assert triplet_to_value(FloatTriplet(1, 314, -2)) == 3.14
    assert triplet_to_value(FloatTriplet(1, 0, 0)) == 0.0
    assert triplet_to_value(FloatTriplet(-1, 602, 21)) == -6.02e23


@given(st.integers(100, 999), st.integers(-100, 100), st.booleans())
@settings(max_examples=300)
def test_rounding_idempotence(mantissa, exponent, negative):
    t = FloatTriplet(-1 if negative else 1, mantissa, exponent)
    assert round_to_triplet(triplet_to_value(t), 3) == t


# --- encoding ---------------------------------------------------------------

def test_encode_table_rows():
    pos = round_to_triplet(3.14)
    neg = round_to_triplet(-6.02e23)
    assert encode_number(pos, P10) == ["+", "3", "1", "4", "E-2"]
    assert encode_number(neg, P10) == ["-", "6", "0", "2", "E21"]
    assert encode_number(pos, P1000) == ["+", "314", "E-2"]
    assert encode_number(neg, P1000) == ["-", "602", "E21"]
    assert encode_number(pos, B1999) == ["314", "E-2"]
    assert encode_number(neg, B1999) == ["-602", "E21"]
    assert encode_number(pos, FP15) == ["FP314/-2"]
    assert encode_number(neg, FP15) == ["FP-602/21"]


def test_encode_more_examples():
    assert encode_number(round_to_triplet(23.14069), P10) == ["+", "2", "3", "1", "E-1"]
    assert encode_number(round_to_triplet(23.14069), P1000) == ["+", "231", "E-1"]
    assert encode_number(round_to_triplet(-0.5), P10) == ["-", "5", "0", "0", "E-3"]
    assert encode_number(round_to_triplet(-0.5), P1000) == ["-", "500", "E-3"]


def test_encode_zero_per_scheme():
    zero = codec.ZERO_TRIPLET
    assert encode_number(zero, P10) == ["+", "0", "0", "0", "E0"]
    assert encode_number(zero, P1000) == ["+", "0", "E0"]
    assert encode_number(zero, P100) == ["+", "0", "E0"]
    assert encode_number(zero, B1999) == ["0", "E0"]
    assert encode_number(zero, FP15) == ["FP0/0"]


def test_token_arity():
    t = round_to_triplet(-1.23)
    for scheme, arity in ((P10, 5), (P1000, 3), (B1999, 2), (FP15, 1), (P100, 3),
                          (P10000, 3)):
        tt = round_to_triplet(-1.23, scheme.precision_digits)
        assert len(encode_number(tt, scheme)) == arity == scheme.tokens_per_number
    assert len(encode_number(t, positional_base(2, 3))) == 12  # 10 bits + sign + exp


def test_float_token_range_check():
    t = round_to_triplet(-6.02e23)
    assert encode_number(t, FP15) == ["FP-602/21"]  # spelling is total
    with pytest.raises(RangeError):
        encode_number(t, FP15, check_range=True)
    inside = round_to_triplet(3.14)
    assert encode_number(inside, FP15, check_range=True) == ["FP314/-2"]


def test_encode_precision_mismatch():
    t2 = round_to_triplet(3.14, 2)  # (1, 31, -1)
    # exact rescale into a 3-digit scheme
    assert encode_number(t2, P1000) == ["+", "310", "E-2"]
    t4 = round_to_triplet(3.14159, 4)
    with pytest.raises(RangeError):
        encode_number(t4, P1000)


# --- decoding ---------------------------------------------------------------

def test_decode_examples():
    assert decode_number(["+", "2", "3", "1", "E-1"], P10) == FloatTriplet(1, 231, -1)
    assert decode_number(["FP-602/21"], FP15) == FloatTriplet(-1, 602, 21)
    assert decode_number(["-602", "E21"], B1999) == FloatTriplet(-1, 602, 21)
    assert decode_number(["+", "0", "0", "0", "E0"], P10) == codec.ZERO_TRIPLET


@pytest.mark.parametrize("tokens,scheme", [
    (["+", "3", "1"], P10),                    # arity
    (["+", "3", "1", "4", "1", "E-2"], P10),   # arity
    (["?", "3", "1", "4", "E-2"], P10),        # sign
    (["+", "a", "1", "4", "E-2"], P10),        # unknown digit
    (["+", "12", "1", "4", "E-2"], P10),       # digit out of base
    (["+", "314", "E-2"], P10),                # wrong scheme arity
    (["+", "3", "1", "4", "E-200"], P10),      # exponent range
    (["+", "0", "0", "0", "E5"], P10),         # non-canonical zero
    (["-", "0", "0", "0", "E0"], P10),         # non-canonical zero sign
    (["+", "0", "1", "4", "E-2"], P10),        # mantissa below range
    (["1000", "E0"], B1999),                   # balanced digit out of range
    (["FP-602/200"], FP15),                    # exponent range
    (["FP31/0"], FP15),                        # mantissa below range
    (["FP314/x"], FP15),                       # malformed
])
def test_decode_errors(tokens, scheme):
    with pytest.raises(ParseError):
        decode_number(tokens, scheme)


def test_parse_error_position():
    err = None
    try:
        decode_number(["+", "3", "x", "4", "E-2"], P10, offset=10)
    except ParseError as e:
        err = e
    assert err is not None and err.position == 12


# --- round trips ------------------------------------------------------------

def _random_triplet(scheme, rng) -> FloatTriplet:
    if rng.random() < 0.05:
        return codec.ZERO_TRIPLET
    mantissa = int(rng.integers(scheme.mantissa_min, scheme.mantissa_max + 1))
    if scheme.kind == "float":
        b = scheme.float_exp_bound
        exponent = int(rng.integers(-b, b + 1))
    else:
        exponent = int(rng.integers(codec.EXP_MIN, codec.EXP_MAX + 1))
    return FloatTriplet(-1 if rng.random() < 0.5 else 1, mantissa, exponent)


@pytest.mark.parametrize("scheme", ALL_PRESETS + (balanced_base(5), float_token(6),
                                                  positional_base(2), positional_base(7)))
def test_round_trip_random(scheme):
    rng = np.random.default_rng(hash(scheme.label()) % 2**32)
    for _ in range(2000):
        t = _random_triplet(scheme, rng)
        tokens = encode_number(t, scheme, check_range=True)
        assert decode_number(tokens, scheme) == t


def test_round_trip_exhaustive_p1000_mantissas():
    rng = np.random.default_rng(5)
    for mantissa in range(100, 1000):
        e = int(rng.integers(-100, 101))
        t = FloatTriplet(1 if mantissa % 2 else -1, mantissa, e)
        assert decode_number(encode_number(t, P1000), P1000) == t


def test_cross_scheme_value_consistency():
    rng = np.random.default_rng(6)
    for _ in range(200):
        t = _random_triplet(FP15, rng)  # FP15 has the narrowest exponent range
        values = {
            scheme.label(): triplet_to_value(decode_number(encode_number(t, scheme), scheme))
            for scheme in ALL_PRESETS
            if scheme.precision_digits == 3
        }
        assert len(set(values.values())) == 1


@given(st.integers(100, 999), st.booleans())
@settings(max_examples=200)
def test_balanced_digits_stay_in_range(mantissa, negative):
    scheme = balanced_base(5)
    t = FloatTriplet(-1 if negative else 1, mantissa, 0)
    tokens = encode_number(t, scheme)
    digits = [int(tok) for tok in tokens[:-1]]
    assert all(-5 <= d <= 5 for d in digits)
    assert decode_number(tokens, scheme) == t


def test_balanced_b1999_single_digit():
    t = FloatTriplet(-1, 999, 0)
    assert encode_number(t, B1999) == ["-999", "E0"]


# --- vocabularies -----------------------------------------------------------

def test_vocab_counts():
    assert len(build_vocabulary(P10)) == 213
    assert len(build_vocabulary(P1000)) == 1104
    assert len(build_vocabulary(B1999)) == 2002
    assert len(build_vocabulary(FP15)) == 30601
    assert len(build_vocabulary(P100)) == 294
    assert len(build_vocabulary(P10000)) == 9204


def test_vocab_exponent_tokens():
    vocab = build_vocabulary(P10)
    exps = [t for t in vocab.tokens if t.startswith("E")]
    assert len(exps) == 201
    assert "E-100" in vocab and "E100" in vocab and "E0" in vocab


def test_vocab_dimension_and_task_tokens():
    vocab = build_vocabulary(P1000, max_dim=30, task_tokens=("Transpose", "Add"))
    assert len(vocab) == 1104 + 30 + 2
    for n in (1, 30):
        assert f"V{n}" in vocab
    assert "V31" not in vocab
    assert vocab.index_of("Add") == len(vocab) - 1


def test_vocab_covers_all_emitted_tokens():
    rng = np.random.default_rng(9)
    for scheme in ALL_PRESETS:
        vocab = build_vocabulary(scheme)
        for _ in range(500):
            t = _random_triplet(scheme, rng)
            for token in encode_number(t, scheme, check_range=True):
                assert token in vocab


def test_vocab_order_deterministic_and_invertible(tmp_path):
    v1 = build_vocabulary(P1000, max_dim=5)
    v2 = build_vocabulary(P1000, max_dim=5)
    assert v1.tokens == v2.tokens
    for i, tok in enumerate(v1.tokens):
        assert v1.index_of(tok) == i
    path = tmp_path / "vocab.txt"
    v1.save(path)
    v3 = codec.Vocabulary.load(path)
    assert v3.tokens == v1.tokens and v3.sha256() == v1.sha256()


def test_scheme_validation():
    with pytest.raises(ValueError):
        EncodingScheme("positional", 1)
    with pytest.raises(ValueError):
        EncodingScheme("balanced", 0)
    with pytest.raises(ValueError):
        EncodingScheme("float", 13)
    with pytest.raises(ValueError):
        EncodingScheme("weird", 10)
    with pytest.raises(ValueError):
        codec.get_scheme("nope")
    assert codec.get_scheme("p1000") is P1000
