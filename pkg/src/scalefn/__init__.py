"""Signed scaling functions of Markov and geometrically finite interval maps."""

from .errors import *  # noqa: F401,F403
from .map_model import (
    Affine,
    DiffeoModel,
    MarkovMap,
    PowerLawEnd,
    asymmetry,
    branch_at,
    build_map,
    conjugate_map,
    critical_orbit,
    derivative,
    evaluate,
    find_critical,
    inverse_branch,
    is_geometrically_finite,
    load_map,
)
from .partition import (
    Interval,
    PartitionLevel,
    Symbol,
    decay_fit,
    distortion_ratio,
    first_level,
    parse_word,
    partition_level,
    refine,
    sign_of_word,
    word_interval,
)
from .scaling import discontinuity_probe, holder_modulus, routed_family, scaling_function, signed_scale
from .symbolic import (
    DualAddress,
    ForwardAddress,
    classify_address,
    coding_map,
    dual_shift,
    periodic_addresses,
    periodic_point,
    random_addresses,
    truncate,
)
from .invariants import (
    compare_invariants,
    default_addresses,
    eigenvalue_direct,
    eigenvalue_via_scaling,
    exponent_estimate,
    exponent_via_scaling,
)

__version__ = "0.1.0"
