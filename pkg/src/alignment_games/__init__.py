"""Zero-sum alignment games: closed-form solvers, an exact LP oracle and a simulator."""
from .model import (
    Arc,
    CostProfile,
    Domain,
    FixedCardinality,
    FixedLength,
    FreeLength,
    GameSpec,
    IndependentSubsets,
    MixedStrategy,
    NoClosedFormError,
    PowerSet,
    RateProfile,
    Side,
    Solution,
    SubsetFamily,
    UniformStartArc,
    arc_symmetric_difference,
    complement_strategy,
    from_mask,
    mixed_payoff,
    subset_payoff,
    to_mask,
)
from .continuous import solve_continuous
from .discrete import solve_finite
from .oracle import (
    OracleLimitError,
    PayoffMatrix,
    VerificationReport,
    best_response,
    build_payoff_matrix,
    discretize_continuous,
    oracle_solution,
    solve_matrix_game,
    verify_solution,
)
from .simulate import SimulationResult, estimate_payoff


def solve(spec: GameSpec) -> Solution:
    """Closed-form solution of ``spec``; raises :class:`NoClosedFormError` if none applies."""
    if spec.is_continuous:
        return solve_continuous(spec)
    return solve_finite(spec)


__all__ = [
    "Arc", "CostProfile", "Domain", "FixedCardinality", "FixedLength", "FreeLength",
    "GameSpec", "IndependentSubsets", "MixedStrategy", "NoClosedFormError", "PowerSet",
    "RateProfile", "Side", "Solution", "SubsetFamily", "UniformStartArc",
    "arc_symmetric_difference", "complement_strategy", "from_mask", "mixed_payoff",
    "subset_payoff", "to_mask", "solve_continuous", "solve_finite", "OracleLimitError",
    "PayoffMatrix", "VerificationReport", "best_response", "build_payoff_matrix",
    "discretize_continuous", "oracle_solution", "solve_matrix_game", "verify_solution",
    "SimulationResult", "estimate_payoff", "solve",
]
