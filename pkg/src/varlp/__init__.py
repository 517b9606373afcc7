"""Variable-exponent sequence spaces l_{p_n}: norms, embeddings, witnesses,
Bernstein numbers and the quasi-norm topology."""

__version__ = "0.1.0"

from .errors import BoundViolation, ParseError, PreconditionError, UndecidableTail
from .exponents import (
    INF,
    AffineLog,
    Constant,
    ExponentSequence,
    IndexSet,
    Infinite,
    Power,
    difference_set,
    gap_reciprocal,
)
from .norms import NormContext, holder_pairing, luxemburg_norm, modular, quasi_triangle_constant
from .embedding import classify_pair, exists_c, linfty_relation
from .witness import construct_block_witness, verify_witness
from .bernstein import bernstein_estimate, bernstein_sweep, flat_vector, singularity_classify
from .topology import check_inclusion, rho_metric, riesz_witness

__all__ = [
    "AffineLog",
    "BoundViolation",
    "Constant",
    "ExponentSequence",
    "INF",
    "IndexSet",
    "Infinite",
    "NormContext",
    "ParseError",
    "Power",
    "PreconditionError",
    "UndecidableTail",
    "bernstein_estimate",
    "bernstein_sweep",
    "check_inclusion",
    "classify_pair",
    "construct_block_witness",
    "difference_set",
    "exists_c",
    "flat_vector",
    "gap_reciprocal",
    "holder_pairing",
    "linfty_relation",
    "luxemburg_norm",
    "modular",
    "quasi_triangle_constant",
    "rho_metric",
    "riesz_witness",
    "singularity_classify",
    "verify_witness",
]
