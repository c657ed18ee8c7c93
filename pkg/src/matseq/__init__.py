"""matseq: linear algebra as token sequences.

Encode real matrices as token sequences under scientific-notation codecs,
generate seeded datasets for nine matrix tasks from controlled random-matrix
ensembles, and score predicted sequences under tolerance-based norms.
"""

__version__ = "0.1.0"

from .codec import (  # noqa: F401
    B1999,
    FP15,
    P10,
    P100,
    P1000,
    P10000,
    SCHEMES,
    EncodingScheme,
    FloatTriplet,
    Vocabulary,
    balanced_base,
    build_vocabulary,
    decode_number,
    encode_number,
    float_token,
    get_scheme,
    positional_base,
    round_to_triplet,
    triplet_to_value,
)
from .errors import (  # noqa: F401
    MatseqError,
    NoConvergenceError,
    NotSymmetricError,
    ParseError,
    RangeError,
    ResampleExhaustedError,
    ShapeError,
    SingularMatrixError,
)
from .serialize import (  # noqa: F401
    SequenceLayout,
    concat_operands,
    eigen_output,
    matrix_to_tokens,
    round_matrix,
    svd_output,
    tokens_to_matrix,
)
