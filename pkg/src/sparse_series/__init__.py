"""Sparse power series in Pisot and Salem bases.

Exact and interval tools for series sum c(n) / q^n whose coefficients are
supported on sparse sets: certified base classification, arithmetic-function
sieves, coefficient sequences with tail majorants, finite-scale checks of
irrationality criteria, series enclosures and base-t digit streams.
"""

__version__ = "0.1.0"

from .algebraic import (
    PISOT,
    SALEM,
    NEITHER,
    UNDECIDED,
    AlgebraicField,
    BaseClassification,
    FieldElement,
    MonicIntPolynomial,
    build_field,
    classify_base,
    element_arith,
    embed,
    field_norm,
    house,
    isolate_roots,
    parse_polynomial,
)
from .criteria import (
    CheckpointSchedule,
    ConditionRow,
    CriterionReport,
    NormWitness,
    check_interlacing,
    check_theorem_main,
    check_theorem_prepared,
    check_theorem_rational,
    degree_ell_ratio,
    dominance_census,
    good_N_census,
    liouville_gap,
    r_decomposition_check,
    witness_search,
)
from .errors import *  # noqa: F401,F403
from .intervals import ComplexBox, Interval
from .report import parse_report, render_report
from .sequences import (
    CoefficientSequence,
    SupportSet,
    add_sequences,
    convolution_power,
    explicit_support,
    fiber_sequence,
    indicator_sequence,
    ones_sequence,
    power_support,
    r_value,
    sequence_from_dict,
    stats,
    sumset,
    xi_from_prefix,
    xi_prefix_range,
    xi_tail,
    xi_tail_range,
    zero_sequence,
)
from .series_eval import DigitStream, digit_stream, evaluate_series, nonzero_digit_density
from .sieve import ArithTable, PowerMap, phi_lower_bound_check, required_horizon, sieve, summatory, value_set_count
