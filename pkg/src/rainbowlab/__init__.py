"""Rainbow matchings in [n]^k: exact checks, Monte Carlo checks, and the s0 computation."""

from .constructions import (
    SizeSequence,
    Status,
    Verdict,
    c_counterexample,
    is_down_set,
    sequence_a,
    sequence_b,
    sequence_c,
    sequence_d,
    sequence_e,
    sequence_satisfying_check,
    shift_closure,
)
from .concentration import (
    SamplerConfig,
    TailReport,
    check_eqnew2,
    check_prop_prob,
    empirical_tail,
    exact_pair_probabilities,
    half_split_check,
    sample_matching,
    tail_bound_1,
    tail_bound_2_factor,
)
from .matching import (
    BudgetExceeded,
    HallReport,
    OrderedMatching,
    RainbowMatching,
    SearchStatus,
    hall_deficiency_j,
    hall_report,
    intersection_count,
    rainbow_search,
    saturating_matching,
    verify_conjecture_exhaustive,
)
from .spectral import SpectrumSummary, alon_chung_check, edge_count, pg_spectrum
from .threshold import (
    ThresholdReport,
    contradiction_value,
    expectation_tail_bound,
    min_passing_s,
    threshold_report,
    x_of,
    z_of,
)
from .tuple_space import (
    Family,
    ParameterError,
    SpaceParams,
    decode_tuple,
    disjoint,
    encode_tuple,
    extremal_family,
    family_density,
    random_family,
)

__version__ = "0.1.0"
