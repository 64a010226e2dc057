"""Nash Bargaining over two CPs' contracts in the neutral regime.

The CPs jointly pick shares maximizing the product of their utility gains
over a disagreement point, with utilities induced by the ISP's common
best-response effort.  Zero disagreement admits closed forms (symmetric
share 1/W(r/c*e); asymmetric interior shares with equalized margins, or a
corner handing the weak CP a zero share).  Arbitrary disagreement points,
including the non-cooperative equilibrium, are handled numerically by a
coarse grid scan plus golden-section refinement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .equilibria import neutral_equilibrium
from .model import (
    NEUTRAL,
    Contract,
    MarketParams,
    Utilities,
    best_effort,
    expected_utilities,
)
from .numerics import lambert_w0

__all__ = [
    "INTERIOR",
    "CORNER_CP2_ZERO",
    "DISAGREEMENT_RETURNED",
    "BargainingProblem",
    "BargainingOutcome",
    "nbs_closed_form",
    "nbs_numeric",
    "nash_product",
    "ne_disagreement",
]

INTERIOR = "interior"
CORNER_CP2_ZERO = "corner_cp2_zero"
DISAGREEMENT_RETURNED = "disagreement_returned"

FLAG_DEGENERATE_ZERO_SURPLUS = "degenerate_zero_surplus"

_E = math.e

_COARSE_STEP = 2e-3
_REFINE_TOL = 1e-7
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class BargainingProblem:
    """Two-CP bargaining instance: market parameters plus disagreement utilities.

    The default disagreement point is (0, 0): with no agreement nothing is
    shared, the ISP invests nothing and both CPs earn nothing.
    """

    params: MarketParams
    disagreement: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self) -> None:
        if self.params.n != 2:
            raise ValueError("bargaining is defined for exactly two CPs")
        if len(self.disagreement) != 2:
            raise ValueError("disagreement must have exactly two entries")
        for d in self.disagreement:
            if not (math.isfinite(d) and d >= 0.0):
                raise ValueError(f"disagreement utilities must be >= 0, got {d!r}")


@dataclass(frozen=True)
class BargainingOutcome:
    """Bargained contract with neutral-regime utilities and the attained Nash product.

    case_tag is interior, corner_cp2_zero (the weaker CP's share is zero;
    with caller order r1 >= r2 that is literally share 2), or
    disagreement_returned when nothing in the feasible set dominates the
    disagreement point.
    """

    contract: Contract
    utilities: Utilities
    nash_product: float
    case_tag: str
    flags: tuple[str, ...] = ()


def _neutral_utilities(params: MarketParams, shares: tuple[float, float]) -> Utilities:
    contract = Contract(shares=shares)
    return expected_utilities(params, contract, best_effort(params, contract, NEUTRAL))


def nash_product(problem: BargainingProblem, contract: Contract) -> float:
    """(U1 - d1)*(U2 - d2) at the given contract under neutral efforts.

    Negative values flag contracts leaving some CP below its disagreement
    utility; useful for probing feasibility.
    """
    utilities = expected_utilities(
        problem.params,
        contract,
        best_effort(problem.params, contract, NEUTRAL),
    )
    d1, d2 = problem.disagreement
    return (utilities.cp[0] - d1) * (utilities.cp[1] - d2)


def ne_disagreement(params: MarketParams) -> tuple[float, float]:
    """Disagreement utilities when failed bargaining falls back to the
    non-cooperative neutral equilibrium."""
    cp = neutral_equilibrium(params).utilities.cp
    return (cp[0], cp[1])


def _outcome(
    problem: BargainingProblem,
    shares: tuple[float, float],
    case_tag: str,
    flags: tuple[str, ...] = (),
) -> BargainingOutcome:
    contract = Contract(shares=shares)
    utilities = _neutral_utilities(problem.params, shares)
    d1, d2 = problem.disagreement
    return BargainingOutcome(
        contract=contract,
        utilities=utilities,
        nash_product=(utilities.cp[0] - d1) * (utilities.cp[1] - d2),
        case_tag=case_tag,
        flags=flags,
    )


def nbs_closed_form(problem: BargainingProblem) -> BargainingOutcome:
    """Closed-form bargaining solution for zero disagreement.

    Equal rates: both CPs share 1/W(r/c*e) (requires r/c > 1).  Unequal
    rates, dominant first: the interior shares equalize margins whenever
    (r1+r2)/(r1-r2) > W((r1+r2)*e/(2c)); otherwise the weak CP is out and
    the dominant share is 2/W(r1/c*e^2).  Rates too small to generate any
    surplus (r1+r2 <= 2c, or a corner with r1 < 2c) yield the zero contract,
    flagged degenerate.  Nonzero disagreement points are rejected; use
    nbs_numeric for those.
    """
    if problem.disagreement != (0.0, 0.0):
        raise ValueError(
            "closed forms assume zero disagreement; use nbs_numeric instead"
        )
    params = problem.params
    c = params.cost

    if params.rates[0] == params.rates[1]:
        r = params.rates[0]
        if r / c <= 1.0:
            raise ValueError(
                f"symmetric bargaining needs r/c > 1, got r={r!r}, c={c!r}"
            )
        share = 1.0 / lambert_w0(r / c * _E)
        return _outcome(problem, (share, share), INTERIOR)

    order = sorted(range(2), key=lambda i: -params.rates[i])
    r1, r2 = (params.rates[i] for i in order)

    flags: tuple[str, ...] = ()
    if (r1 + r2) / (r1 - r2) > lambert_w0((r1 + r2) * _E / (2.0 * c)):
        if r1 + r2 <= 2.0 * c:
            sorted_shares, tag = (0.0, 0.0), INTERIOR
            flags = (FLAG_DEGENERATE_ZERO_SURPLUS,)
        else:
            w = lambert_w0((r1 + r2) * _E / (2.0 * c))
            b1 = (r1 + r2) / (2.0 * r1 * w) - (r2 - r1) / (2.0 * r1)
            b2 = (r1 + r2) / (2.0 * r2 * w) - (r1 - r2) / (2.0 * r2)
            sorted_shares, tag = (b1, max(b2, 0.0)), INTERIOR
    else:
        if r1 < 2.0 * c:
            sorted_shares, tag = (0.0, 0.0), CORNER_CP2_ZERO
            flags = (FLAG_DEGENERATE_ZERO_SURPLUS,)
        else:
            sorted_shares, tag = (2.0 / lambert_w0(r1 / c * _E**2), 0.0), CORNER_CP2_ZERO

    shares = [0.0, 0.0]
    for pos, i in enumerate(order):
        shares[i] = sorted_shares[pos]
    return _outcome(problem, (shares[0], shares[1]), tag, flags)


def _golden_max(
    g: Callable[[float], float], lo: float, hi: float, tol: float
) -> tuple[float, float]:
    """Golden-section maximization of g on [lo, hi] to interval width tol.

    Deterministic: exact ties move the right edge, biasing toward smaller
    arguments.
    """
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
    mid = 0.5 * (a + b)
    return mid, g(mid)


def nbs_numeric(problem: BargainingProblem) -> BargainingOutcome:
    """Grid-plus-refinement bargaining solver for arbitrary disagreement points.

    Scans the share square on a 2e-3 grid, keeps points where both CPs reach
    their disagreement utilities, then refines the best cell coordinate-wise
    by golden section to 1e-7.  When no grid point strictly dominates the
    disagreement point the disagreement utilities themselves are returned
    (case disagreement_returned, not an error).
    """
    params = problem.params
    d1, d2 = problem.disagreement
    r1, r2 = params.rates
    c = params.cost

    def utils(b1: float, b2: float) -> tuple[float, float]:
        grown = max((b1 * r1 + b2 * r2) / (2.0 * c), 1.0)
        gain = math.log(grown)
        return (1.0 - b1) * r1 * gain, (1.0 - b2) * r2 * gain

    def objective(b1: float, b2: float) -> float:
        u1, u2 = utils(b1, b2)
        if u1 < d1 or u2 < d2:
            return -math.inf
        return (u1 - d1) * (u2 - d2)

    steps = round(1.0 / _COARSE_STEP)
    grid = np.minimum(np.arange(steps + 1) * _COARSE_STEP, 1.0)
    bb1, bb2 = np.meshgrid(grid, grid, indexing="ij")
    gain = np.log(np.maximum((bb1 * r1 + bb2 * r2) / (2.0 * c), 1.0))
    uu1 = (1.0 - bb1) * r1 * gain
    uu2 = (1.0 - bb2) * r2 * gain
    feasible = (uu1 >= d1) & (uu2 >= d2)
    dominates = bool(np.any((uu1 > d1) & (uu2 > d2)))
    product = np.where(feasible, (uu1 - d1) * (uu2 - d2), -np.inf)
    # flat argmax takes the first maximizer in C order, i.e. the
    # lexicographically smallest (b1, b2) on ties
    flat = int(np.argmax(product))
    best = (float(grid[flat // (steps + 1)]), float(grid[flat % (steps + 1)]))

    if not dominates:
        zero = _neutral_utilities(params, (0.0, 0.0))
        return BargainingOutcome(
            contract=Contract(shares=(0.0, 0.0)),
            utilities=Utilities(
                cp=(d1, d2), isp_net=zero.isp_net, social=d1 + d2 + zero.isp_net
            ),
            nash_product=0.0,
            case_tag=DISAGREEMENT_RETURNED,
        )

    b1, b2 = best
    window = 2.0 * _COARSE_STEP
    for _ in range(20):
        b1, _val = _golden_max(
            lambda x: objective(x, b2),
            max(0.0, b1 - window),
            min(1.0, b1 + window),
            _REFINE_TOL,
        )
        b2, _val = _golden_max(
            lambda y: objective(b1, y),
            max(0.0, b2 - window),
            min(1.0, b2 + window),
            _REFINE_TOL,
        )

    weak = 0 if r1 < r2 else 1
    shares = [b1, b2]
    if shares[weak] <= 1e-9:
        shares[weak] = 0.0
        tag = CORNER_CP2_ZERO
    else:
        tag = INTERIOR
    return _outcome(problem, (shares[0], shares[1]), tag)
