"""Equilibrium revenue-sharing contracts between content providers and an ISP.

Closed-form non-cooperative equilibria in neutral and non-neutral regimes,
Nash Bargaining solutions, regime-comparison thresholds and neutralizing
taxes, each cross-checked by independent brute-force oracles.
"""

from .bargaining import (
    BargainingOutcome,
    BargainingProblem,
    nash_product,
    nbs_closed_form,
    nbs_numeric,
    ne_disagreement,
)
from .equilibria import (
    ComparisonRow,
    EquilibriumReport,
    ScalingRow,
    ThresholdBracketError,
    compare_regimes,
    neutral_equilibrium,
    nonneutral_equilibrium,
    scaling_report,
    threshold,
)
from .model import (
    NEUTRAL,
    NONNEUTRAL,
    Contract,
    EffortProfile,
    MarketParams,
    NoiseModel,
    Utilities,
    best_effort,
    cara_isp_utility,
    expected_utilities,
    ir_holds,
)
from .numerics import Bracket, BracketError, ConvergenceError, find_root, lambert_w0
from .oracle import (
    VerificationReport,
    grid_best_response,
    grid_nbs,
    mc_cara,
    verify_equilibrium,
)
from .regulator import (
    EQUAL_EFFECTIVE_RATE,
    PAPER_CONDITION,
    NeutralizingTax,
    TaxPolicy,
    neutralizing_tax,
    taxed_equilibrium,
)

__version__ = "0.1.0"

__all__ = [
    "Bracket",
    "BracketError",
    "ConvergenceError",
    "lambert_w0",
    "find_root",
    "NEUTRAL",
    "NONNEUTRAL",
    "MarketParams",
    "Contract",
    "EffortProfile",
    "Utilities",
    "NoiseModel",
    "best_effort",
    "expected_utilities",
    "cara_isp_utility",
    "ir_holds",
    "EquilibriumReport",
    "ComparisonRow",
    "ScalingRow",
    "ThresholdBracketError",
    "nonneutral_equilibrium",
    "neutral_equilibrium",
    "threshold",
    "compare_regimes",
    "scaling_report",
    "BargainingProblem",
    "BargainingOutcome",
    "nbs_closed_form",
    "nbs_numeric",
    "nash_product",
    "ne_disagreement",
    "TaxPolicy",
    "NeutralizingTax",
    "EQUAL_EFFECTIVE_RATE",
    "PAPER_CONDITION",
    "taxed_equilibrium",
    "neutralizing_tax",
    "VerificationReport",
    "grid_best_response",
    "verify_equilibrium",
    "grid_nbs",
    "mc_cara",
    "__version__",
]
