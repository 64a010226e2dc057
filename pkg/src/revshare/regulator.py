"""Authority-level taxation of two competing CPs.

A regulator taxes CP i's revenue at rate t_i, shrinking its effective
monetization rate to r_i*(1-t_i).  Contracts, efforts and utilities then
follow the untaxed non-neutral machinery evaluated at effective rates.  The
neutralizing tax is chosen so the ISP's equilibrium efforts stop favouring
the dominant CP; two variants are provided because the literal
exponential-ratio condition and exact effort equality disagree whenever the
rates differ (the literal condition equalizes effort per unit rate instead,
and its root is a subsidy on the dominant CP).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .equilibria import EquilibriumReport, nonneutral_equilibrium
from .model import MarketParams
from .numerics import Bracket, BracketError, find_root, lambert_w0

__all__ = [
    "EQUAL_EFFECTIVE_RATE",
    "PAPER_CONDITION",
    "TAX_MODES",
    "TaxPolicy",
    "NeutralizingTax",
    "taxed_equilibrium",
    "neutralizing_tax",
]

EQUAL_EFFECTIVE_RATE = "equal_effective_rate"
PAPER_CONDITION = "paper_condition"
TAX_MODES = (EQUAL_EFFECTIVE_RATE, PAPER_CONDITION)

FLAG_SUBSIDY = "subsidy"

_E = math.e


@dataclass(frozen=True)
class TaxPolicy:
    """Per-CP revenue tax rates, each strictly below 1.

    Negative entries are subsidies; only the literal neutralizing-tax
    condition produces them.
    """

    taxes: tuple[float, ...]

    def __post_init__(self) -> None:
        for t in self.taxes:
            if not (math.isfinite(t) and t < 1.0):
                raise ValueError(f"tax rates must be finite and < 1, got {t!r}")


@dataclass(frozen=True)
class NeutralizingTax:
    """Solved neutralizing tax with the resulting equilibrium effort gap."""

    mode: str
    taxes: TaxPolicy
    effort_gap: float
    flags: tuple[str, ...] = ()


def _effective(params: MarketParams, taxes: TaxPolicy) -> MarketParams:
    if params.n != 2:
        raise ValueError("taxation is defined for exactly two CPs")
    if len(taxes.taxes) != params.n:
        raise ValueError(
            f"policy has {len(taxes.taxes)} rates for {params.n} CPs"
        )
    effective = tuple(
        r * (1.0 - t) for r, t in zip(params.rates, taxes.taxes)
    )
    return MarketParams.of(effective, params.cost)


def taxed_equilibrium(params: MarketParams, taxes: TaxPolicy) -> EquilibriumReport:
    """Post-tax non-neutral equilibrium.

    CP i behaves exactly like an untaxed CP with rate r_i*(1-t_i): its share
    is 1/W(r_i*(1-t_i)/c*e) when the effective rate exceeds c and zero
    otherwise, and all reported efforts and utilities are those of the
    effective-rate market.  A zero policy reproduces nonneutral_equilibrium
    bit for bit.
    """
    return nonneutral_equilibrium(_effective(params, taxes))


def neutralizing_tax(params: MarketParams, mode: str) -> NeutralizingTax:
    """Tax making the ISP treat both CPs alike, leaving the weak CP untaxed.

    equal_effective_rate taxes the dominant CP down to the weak CP's rate
    (t = 1 - r2/r1), which makes the taxed efforts exactly equal.
    paper_condition instead solves exp(W(r2*e/c) - W(r1*(1-t1)*e/c)) = r2/r1
    by bisection; for r1 > r2 its root is negative (a subsidy, flagged), the
    taxed efforts satisfy (a1+1)/(a2+1) = r1/r2, and the resulting gap
    |a1 - a2| is reported rather than assumed zero.
    """
    if mode not in TAX_MODES:
        raise ValueError(f"mode must be one of {TAX_MODES}, got {mode!r}")
    if params.n != 2:
        raise ValueError("taxation is defined for exactly two CPs")

    order = sorted(range(2), key=lambda i: -params.rates[i])
    r1, r2 = (params.rates[i] for i in order)
    c = params.cost

    if r1 == r2:
        t1 = 0.0
    elif mode == EQUAL_EFFECTIVE_RATE:
        t1 = 1.0 - r2 / r1
    else:
        target = math.log(r2 / r1)
        w2 = lambert_w0(r2 * _E / c)

        def relation(t1: float) -> float:
            return w2 - lambert_w0(r1 * (1.0 - t1) * _E / c) - target

        hi = 1.0 - c / r1
        lo = 0.0
        if (relation(lo) > 0.0) == (relation(hi) > 0.0):
            # the dominant CP needs a subsidy; extend the bracket downward
            lo = -1.0
            for _ in range(60):
                if (relation(lo) > 0.0) != (relation(hi) > 0.0):
                    break
                lo *= 2.0
            else:
                raise BracketError(
                    f"no sign change for t1 in [{lo}, {hi}] at rates="
                    f"{params.rates}, c={c}"
                )
        t1 = find_root(relation, Bracket(lo, hi), tol=1e-13)

    taxes_sorted = (t1, 0.0)
    taxes = [0.0, 0.0]
    for pos, i in enumerate(order):
        taxes[i] = taxes_sorted[pos]
    policy = TaxPolicy(taxes=tuple(taxes))

    report = taxed_equilibrium(params, policy)
    a = report.efforts.efforts
    flags = (FLAG_SUBSIDY,) if t1 < 0.0 else ()
    return NeutralizingTax(
        mode=mode,
        taxes=policy,
        effort_gap=abs(a[0] - a[1]),
        flags=flags,
    )
