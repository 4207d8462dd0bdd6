"""Shannon/Stratonovich value of information for discrete decision problems."""
from .engine import (
    DecisionProblem,
    GibbsSolution,
    VoiCurve,
    beta_for_info,
    check_marginal_conditions,
    cumulant,
    cumulant_derivative,
    gibbs_channel,
    info_from_cumulant,
    value_at_info,
    voi_curve,
)
from .estimators import GibbsChannel, RateDistortionChannel, ValueOfInformation
from .measure import (
    CostMatrix,
    FiniteSpace,
    entropy,
    expected_cost,
    is_translation_invariant,
    marginals,
    mutual_information,
    normalize,
    partial_normalize_rows,
)
from .models import (
    ModelSpec,
    build_cost,
    build_problem,
    closed_form_Z,
    cost_effect,
    hartley_voi,
    limit_Z_unit_linear,
    maxent_cost,
    variance_effect,
)

__version__ = "0.1.0"

__all__ = [
    "beta_for_info",
    "build_cost",
    "build_problem",
    "check_marginal_conditions",
    "closed_form_Z",
    "cost_effect",
    "CostMatrix",
    "cumulant",
    "cumulant_derivative",
    "DecisionProblem",
    "entropy",
    "expected_cost",
    "FiniteSpace",
    "gibbs_channel",
    "GibbsChannel",
    "GibbsSolution",
    "hartley_voi",
    "info_from_cumulant",
    "is_translation_invariant",
    "limit_Z_unit_linear",
    "marginals",
    "maxent_cost",
    "ModelSpec",
    "mutual_information",
    "normalize",
    "partial_normalize_rows",
    "RateDistortionChannel",
    "value_at_info",
    "ValueOfInformation",
    "variance_effect",
    "voi_curve",
    "VoiCurve",
]
