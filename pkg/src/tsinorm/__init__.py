"""Exact mixed-Tsirelson norms, regular set families and analytic probes."""

from .errors import ConfigError, DomainError, ParseError
from .ordinals import (
    OMEGA,
    ONE,
    TWO,
    ZERO,
    Ordinal,
    format_ordinal,
    parse_ordinal,
)
from .families import (
    AdmissibilityScanner,
    Ank,
    Apply,
    Explicit,
    Family,
    Minus,
    PairSum,
    Power,
    Renumber,
    Restrict,
    Schreier,
    Singletons,
    Union,
    enumerate_members,
    format_family,
    index_bound,
    is_admissible,
    is_maximal,
    member,
    parse_family,
    subset_check,
)
from .norm_engine import (
    CertNode,
    SpaceSpec,
    Vector,
    brute_force_norm,
    certificate_from_json,
    certificate_to_json,
    distortion_norm,
    format_rational,
    level_norm,
    norm,
    norm_value,
    verify_certificate,
)
from .analysis import (
    DiagnosticsReport,
    GammaConfig,
    dagger_probe,
    gamma_ordinal,
    schreier_sum_bound,
    shift_witness,
    spreading_constant,
    tame_check,
    theta_diagnostics,
)

__version__ = "0.1.0"
