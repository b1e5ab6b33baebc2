"""Correlations of antipodal two-colourings of the sphere, their
Bell-type bounds, and the quantum reference curves."""

from .bounds import (
    BoundReport,
    ChainCorrelations,
    braunstein_caves_value,
    chsh_value,
    lemma1_bounds,
    lemma2_bound,
    lemma3_reflection_angles,
    lemma4_check,
    theorem1_bounds,
    verify_colouring,
    verify_curve,
)
from .colourings import (
    BandColouring,
    Colouring,
    ColouringPair,
    HarmonicColouring,
    check_antipodal,
    circle_colouring_value,
    evaluate,
    load_colouring,
    make_catalogue,
    negate,
)
from .correlation import (
    ClosedFormDomainError,
    CorrelationCurve,
    CurvePoint,
    QuadratureError,
    SamplingPlan,
    chi,
    circle_correlation,
    closed_form,
    correlation_mc,
    correlation_quadrature,
    curve_for,
    extend_to_pi,
    gamma_of,
    mixture_correlation,
    read_curve_csv,
    write_curve_csv,
)
from .geometry import (
    AxisPair,
    Direction,
    angle_between,
    antipode,
    partner_direction,
    sample_axis_pair,
)
from .quantum import (
    TwoQubitState,
    WernerParam,
    haar_unitaries,
    mc_quantum_correlation,
    parse_state_text,
    pr_box_correlation,
    random_state,
    singlet_correlation,
    twirl,
    werner_correlation,
    werner_pp,
)
from .search import (
    CrossingResult,
    NoCrossingError,
    SearchOutcome,
    SlopeEstimate,
    SweepResult,
    ThetaMaxEstimate,
    estimate_theta_max,
    find_crossing,
    harmonic_search,
    slope_at_half_pi,
    sweep_delta,
)

__version__ = "0.1.0"

__all__ = [
    "AxisPair",
    "BandColouring",
    "BoundReport",
    "ChainCorrelations",
    "ClosedFormDomainError",
    "Colouring",
    "ColouringPair",
    "CorrelationCurve",
    "CrossingResult",
    "CurvePoint",
    "Direction",
    "HarmonicColouring",
    "NoCrossingError",
    "QuadratureError",
    "SamplingPlan",
    "SearchOutcome",
    "SlopeEstimate",
    "SweepResult",
    "ThetaMaxEstimate",
    "TwoQubitState",
    "WernerParam",
    "angle_between",
    "antipode",
    "braunstein_caves_value",
    "check_antipodal",
    "chi",
    "chsh_value",
    "circle_colouring_value",
    "circle_correlation",
    "closed_form",
    "correlation_mc",
    "correlation_quadrature",
    "curve_for",
    "estimate_theta_max",
    "evaluate",
    "extend_to_pi",
    "find_crossing",
    "gamma_of",
    "haar_unitaries",
    "harmonic_search",
    "lemma1_bounds",
    "lemma2_bound",
    "lemma3_reflection_angles",
    "lemma4_check",
    "load_colouring",
    "make_catalogue",
    "mc_quantum_correlation",
    "mixture_correlation",
    "negate",
    "parse_state_text",
    "partner_direction",
    "pr_box_correlation",
    "random_state",
    "read_curve_csv",
    "sample_axis_pair",
    "singlet_correlation",
    "slope_at_half_pi",
    "sweep_delta",
    "theorem1_bounds",
    "twirl",
    "verify_colouring",
    "verify_curve",
    "werner_correlation",
    "werner_pp",
    "write_curve_csv",
]
