"""Parameter counting for the encoder-decoder transformer shapes used downstream.

P = d_e (w_i + w_p + 2) + ((w_o + w_p + 2) d_d + w_o)
    + n_e d_e (12 d_e + 13) + n_d d_d (14 d_d + 2 d_e + 19)

the four terms being the input embedding (tokens + learned positions + its
layer norm), the output embedding (tied to the prediction head, whose bias
adds w_o), the encoder stack and the decoder stack.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class TransformerShape:
    enc_layers: int
    dec_layers: int
    enc_dim: int
    dec_dim: int
    vocab_in: int
    vocab_out: int
    max_positions: int

    def __post_init__(self):
        for name in ("enc_layers", "dec_layers", "vocab_in", "vocab_out", "max_positions"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.enc_dim <= 0 or self.dec_dim <= 0:
            raise ValueError("model dimensions must be positive")


@dataclass(frozen=True)
class ParamCount:
    input_embedding: int
    output_embedding: int
    encoder: int
    decoder: int

    @property
    def total(self) -> int:
        return self.input_embedding + self.output_embedding + self.encoder + self.decoder


def encoder_layer_params(dim: int) -> int:
    """Self-attention + 4x FFN + two layer norms: 12 d^2 + 13 d."""
    return dim * (12 * dim + 13)


def decoder_layer_params(dim: int, enc_dim: int) -> int:
    """Encoder layer plus cross-attention and its norm: 14 d^2 + 19 d + 2 d_e d."""
    return dim * (14 * dim + 2 * enc_dim + 19)


def param_count(shape: TransformerShape) -> ParamCount:
    s = shape
    return ParamCount(
        input_embedding=s.enc_dim * (s.vocab_in + s.max_positions + 2),
        output_embedding=(s.vocab_out + s.max_positions + 2) * s.dec_dim + s.vocab_out,
        encoder=s.enc_layers * encoder_layer_params(s.enc_dim),
        decoder=s.dec_layers * decoder_layer_params(s.dec_dim, s.enc_dim),
    )
