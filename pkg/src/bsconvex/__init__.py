"""Exact word metrics and almost-convexity audits for B(1,p) = Z[1/p] ⋊ Z."""

from .arith import PFraction, normalize
from .audit import (
    Constants,
    WitnessFamily,
    ac_table,
    audit_lemma1,
    audit_lemma2,
    build_witnesses,
    certify_divergence,
    choose_j,
    derived_constants,
    distance_lower_bound,
    witness_audit,
)
from .cayley import (
    Ball,
    GeneratingSet,
    ball,
    inside_ball_distance,
    pairs_within,
    validate_generating_set,
    word_length,
)
from .errors import BudgetExceededError, ConfigError, GenerationError
from .group import GroupElement, conjugate, element, identity, inverse, multiply, power, word_product

__version__ = "0.1.0"
