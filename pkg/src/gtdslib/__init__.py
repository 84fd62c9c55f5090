"""Keyed permutations over finite fields from triangular dynamical systems.

The library builds permutations of F_q^n from ordered branch systems
y_i = p_i(x_i) * g_i(x_{i+1..n}) + h_i(x_{i+1..n}), instantiates the classic
design families on top of them (Feistel, SPN, Lai-Massey, Horst, Bricks,
Arion-style), and verifies differential-uniformity and correlation bounds by
exhaustive sweep on desk-scale fields.
"""

from . import errors
from .field import FieldCtx, FieldElement, field_from_json, field_to_json
from .polynomial import (
    MultiPoly,
    NoZerosResult,
    PermPolyCert,
    UniPoly,
    has_no_zeros,
    interpolate,
    invert_permutation_polynomial,
    is_permutation_polynomial,
    perm_poly_certificate,
    poly_from_json,
    poly_to_json,
    reduce_mod,
)
from .gtds import (
    Branch,
    Gtds,
    all_states,
    build_gtds,
    exhaustive_bijection_check,
    gtds_from_json,
    gtds_to_json,
    is_orthogonal_exhaustive,
    state_from_index,
    state_index,
)
from .cipher import (
    AffineLayer,
    CipherSpec,
    RoundKeys,
    RoundSpec,
    cipher_from_json,
    cipher_to_json,
    key_add,
    keyed_orthogonality_check,
    keys_from_json,
    keys_to_json,
    random_round_keys,
)
from .instantiations import (
    ArionGtds,
    ArionParams,
    GeneralizedLaiMassey,
    LaiMasseyParams,
    gtds_round,
    lai_massey_2_direct,
    lai_massey_equivalence_check,
    make_arion_gtds,
    make_bricks,
    make_feistel_unbalanced,
    make_generalized_lai_massey,
    make_horst,
    make_lai_massey_2,
    make_partial_spn,
    make_spn,
)
from .analysis import (
    CorrReport,
    CriteriaResult,
    DdtReport,
    LinearTrail,
    UniDeltaReport,
    WeilCheck,
    affine_mask_transport,
    check_correlation_against_bounds,
    check_ddt_against_bounds,
    correlation,
    correlation_table,
    ddt,
    difference_nonconstant_criteria,
    differential_uniformity_uni,
    gtds_correlation_bound,
    gtds_ddt_bound,
    gtds_ddt_bound_simple,
    trail_lp,
    weil_sum_check,
)

__version__ = "0.1.0"
