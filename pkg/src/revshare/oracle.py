"""Brute-force verification of the closed-form solvers.

Nothing here calls the equilibrium, bargaining or taxation solvers: best
responses come from exhaustive scans through the primitive effort/utility
formulas, bargaining solutions from an exhaustive Nash-product scan, and the
CARA closed form is checked against plain Monte Carlo sampling of the demand
noise.  These are the independent second routes the closed forms are tested
against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bargaining import (
    CORNER_CP2_ZERO,
    DISAGREEMENT_RETURNED,
    INTERIOR,
    BargainingOutcome,
    BargainingProblem,
)
from .model import (
    NEUTRAL,
    Contract,
    EffortProfile,
    MarketParams,
    NoiseModel,
    Utilities,
    best_effort,
    expected_utilities,
)

__all__ = [
    "VerificationReport",
    "grid_best_response",
    "verify_equilibrium",
    "grid_nbs",
    "mc_cara",
]

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class VerificationReport:
    """Result of a unilateral-deviation scan over a contract.

    passed holds exactly when no CP's grid best response improves on its
    contract utility by more than the tolerance used in the scan.
    """

    max_unilateral_gain: float
    per_cp_best_response: tuple[float, ...]
    grid_step: float
    passed: bool


def _check_step(step: float) -> None:
    if not (0.0 < step <= 0.01):
        raise ValueError(f"step must lie in (0, 0.01], got {step!r}")


def _share_grid(step: float) -> list[float]:
    count = round(1.0 / step)
    grid = [min(1.0, k * step) for k in range(count + 1)]
    grid[-1] = 1.0
    return grid


def _cp_utility(
    params: MarketParams, shares: Sequence[float], regime: str, cp_index: int
) -> float:
    contract = Contract(shares=tuple(shares))
    efforts = best_effort(params, contract, regime)
    return expected_utilities(params, contract, efforts).cp[cp_index]


def grid_best_response(
    params: MarketParams,
    regime: str,
    cp_index: int,
    others: Sequence[float],
    step: float,
) -> float:
    """Best share for one CP by exhaustive scan, everybody else held fixed.

    others lists the remaining CPs' shares in index order with cp_index
    removed.  Every candidate utility is computed through best_effort and
    expected_utilities; ties go to the smaller share.
    """
    _check_step(step)
    if not 0 <= cp_index < params.n:
        raise ValueError(f"cp_index must lie in [0, {params.n}), got {cp_index}")
    if len(others) != params.n - 1:
        raise ValueError(f"expected {params.n - 1} other shares, got {len(others)}")

    shares = list(others)
    shares.insert(cp_index, 0.0)
    best_share, best_utility = 0.0, -math.inf
    for b in _share_grid(step):
        shares[cp_index] = b
        utility = _cp_utility(params, shares, regime, cp_index)
        if utility > best_utility:
            best_share, best_utility = b, utility
    return best_share


def verify_equilibrium(
    params: MarketParams,
    regime: str,
    contract: Contract,
    step: float,
    tol: float,
) -> VerificationReport:
    """Certify a contract by scanning every CP's unilateral deviations.

    For each CP the grid best response is computed with the others pinned at
    the contract; the report passes when the largest utility improvement
    found is at most tol.
    """
    if len(contract.shares) != params.n:
        raise ValueError(
            f"contract has {len(contract.shares)} shares for {params.n} CPs"
        )
    best_responses = []
    max_gain = -math.inf
    for i in range(params.n):
        others = [b for j, b in enumerate(contract.shares) if j != i]
        response = grid_best_response(params, regime, i, others, step)
        here = _cp_utility(params, contract.shares, regime, i)
        deviated = list(contract.shares)
        deviated[i] = response
        gain = _cp_utility(params, deviated, regime, i) - here
        best_responses.append(response)
        max_gain = max(max_gain, gain)
    return VerificationReport(
        max_unilateral_gain=max_gain,
        per_cp_best_response=tuple(best_responses),
        grid_step=step,
        passed=max_gain <= tol,
    )


def _golden_max(g, lo: float, hi: float, tol: float) -> float:
    a, b = lo, hi
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    g1, g2 = g(x1), g(x2)
    while b - a > tol:
        if g1 >= g2:
            b, x2, g2 = x2, x1, g1
            x1 = b - _GOLDEN * (b - a)
            g1 = g(x1)
        else:
            a, x1, g1 = x1, x2, g2
            x2 = a + _GOLDEN * (b - a)
            g2 = g(x2)
    return 0.5 * (a + b)


def grid_nbs(problem: BargainingProblem, step: float) -> BargainingOutcome:
    """Bargaining solution by exhaustive Nash-product maximization.

    Scans the whole share square at the given step (first maximizer in
    lexicographic order wins ties), refines coordinate-wise by golden
    section, and reports the disagreement point when no grid point strictly
    dominates it.  Shares no code with the closed-form bargaining solver.
    """
    _check_step(step)
    params = problem.params
    r1, r2 = params.rates
    c = params.cost
    d1, d2 = problem.disagreement

    count = round(1.0 / step)
    grid = np.minimum(np.arange(count + 1) * step, 1.0)
    grid[-1] = 1.0
    bb1, bb2 = np.meshgrid(grid, grid, indexing="ij")
    gain = np.log(np.maximum((bb1 * r1 + bb2 * r2) / (2.0 * c), 1.0))
    uu1 = (1.0 - bb1) * r1 * gain
    uu2 = (1.0 - bb2) * r2 * gain
    feasible = (uu1 >= d1) & (uu2 >= d2)
    if not bool(np.any((uu1 > d1) & (uu2 > d2))):
        zero_utils = expected_utilities(
            params,
            Contract(shares=(0.0, 0.0)),
            EffortProfile(efforts=(0.0, 0.0), regime=NEUTRAL),
        )
        return BargainingOutcome(
            contract=Contract(shares=(0.0, 0.0)),
            utilities=Utilities(
                cp=(d1, d2),
                isp_net=zero_utils.isp_net,
                social=d1 + d2 + zero_utils.isp_net,
            ),
            nash_product=0.0,
            case_tag=DISAGREEMENT_RETURNED,
        )

    product = np.where(feasible, (uu1 - d1) * (uu2 - d2), -np.inf)
    flat = int(np.argmax(product))
    b1 = float(grid[flat // (count + 1)])
    b2 = float(grid[flat % (count + 1)])

    def objective(x1: float, x2: float) -> float:
        grown = max((x1 * r1 + x2 * r2) / (2.0 * c), 1.0)
        log_gain = math.log(grown)
        u1 = (1.0 - x1) * r1 * log_gain
        u2 = (1.0 - x2) * r2 * log_gain
        if u1 < d1 or u2 < d2:
            return -math.inf
        return (u1 - d1) * (u2 - d2)

    window = 2.0 * step
    for _ in range(20):
        b1 = _golden_max(
            lambda x: objective(x, b2), max(0.0, b1 - window), min(1.0, b1 + window), 1e-7
        )
        b2 = _golden_max(
            lambda y: objective(b1, y), max(0.0, b2 - window), min(1.0, b2 + window), 1e-7
        )

    weak = 0 if r1 < r2 else 1
    shares = [b1, b2]
    tag = INTERIOR
    if shares[weak] <= 1e-9:
        shares[weak] = 0.0
        tag = CORNER_CP2_ZERO
    contract = Contract(shares=(shares[0], shares[1]))
    utilities = expected_utilities(
        params, contract, best_effort(params, contract, NEUTRAL)
    )
    return BargainingOutcome(
        contract=contract,
        utilities=utilities,
        nash_product=(utilities.cp[0] - d1) * (utilities.cp[1] - d2),
        case_tag=tag,
    )


def mc_cara(
    params: MarketParams,
    noise: NoiseModel,
    contract: Contract,
    efforts: EffortProfile,
    samples: int,
    seed: int,
) -> tuple[float, float]:
    """Monte Carlo estimate of the ISP's expected CARA utility.

    Draws (eps1, eps2) from the correlated Gaussian demand noise using
    numpy's PCG64 generator seeded with seed (identical seeds give identical
    streams), forms the realized wealth
    sum_i(beta_i*r_i*(log(a_i+1) + eps_i) - c*a_i) per sample, and averages
    -exp(-z*wealth).  Returns the sample mean and its standard error.
    """
    if params.n != 2:
        raise ValueError("the noise model covers exactly two CPs")
    if samples < 10_000:
        raise ValueError(f"samples must be at least 10000, got {samples}")
    if len(contract.shares) != 2 or len(efforts.efforts) != 2:
        raise ValueError("contract and efforts must cover both CPs")

    b1, b2 = contract.shares
    r1, r2 = params.rates
    a1, a2 = efforts.efforts
    s1, s2 = noise.sigma
    rho = noise.rho
    c = params.cost

    base = (
        b1 * r1 * math.log(a1 + 1.0)
        + b2 * r2 * math.log(a2 + 1.0)
        - c * (a1 + a2)
    )
    if b1 * r1 * s1 == 0.0 and b2 * r2 * s2 == 0.0:
        # wealth is the same in every sample; the average is exact
        return -math.exp(-noise.z * base), 0.0

    # explicit Cholesky-style factor of the covariance; valid for any
    # sigma >= 0 and |rho| <= 1, including the degenerate cases
    rng = np.random.Generator(np.random.PCG64(seed))
    z1 = rng.standard_normal(samples)
    z2 = rng.standard_normal(samples)
    eps1 = s1 * z1
    eps2 = s2 * (rho * z1 + math.sqrt(1.0 - rho * rho) * z2)
    wealth = base + b1 * r1 * eps1 + b2 * r2 * eps2
    values = -np.exp(-noise.z * wealth)
    estimate = float(np.mean(values))
    spread = float(np.std(values, ddof=1))
    return estimate, spread / math.sqrt(samples)
