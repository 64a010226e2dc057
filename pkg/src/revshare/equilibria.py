"""Closed-form non-cooperative equilibria, regime comparison, and thresholds.

Non-neutral contracts decouple across CPs and each active share is
1/W(r_i*e/c).  Neutral contracts couple the CPs through the common effort:
symmetric markets share 1/(n*W(r/(n*c)*e^(1/n))), while asymmetric markets
split into an interior solution with equalized margins
(1-beta_i)*r_i = const and corner solutions where weak CPs contribute
nothing.  The threshold r1_star marks where the two-CP neutral interior
collapses to the corner; r1_a and r1_b mark where neutral total effort and
non-neutral ISP revenue take over.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .model import (
    NEUTRAL,
    NONNEUTRAL,
    Contract,
    EffortProfile,
    MarketParams,
    Utilities,
    best_effort,
    expected_utilities,
)
from .numerics import Bracket, BracketError, find_root, lambert_w0

__all__ = [
    "UNIQUE",
    "ZERO_AND_NONZERO",
    "NOT_UNIQUELY_DEFINED",
    "THRESHOLD_KINDS",
    "EquilibriumReport",
    "ComparisonRow",
    "ScalingRow",
    "ThresholdBracketError",
    "nonneutral_equilibrium",
    "neutral_equilibrium",
    "threshold",
    "compare_regimes",
    "scaling_report",
]

UNIQUE = "unique"
ZERO_AND_NONZERO = "zero_and_nonzero"
NOT_UNIQUELY_DEFINED = "not_uniquely_defined"

FLAG_ASYMMETRIC_ZERO_SEAM = "asymmetric_zero_seam"
FLAG_BEYOND_CLOSED_FORMS = "beyond_closed_form_cases"
FLAG_CORNER_CHECK_FAILED = "corner_optimality_violated"

THRESHOLD_KINDS = ("r1_star", "r1_a", "r1_b")

_E = math.e


def _clip01(x: float, dust: float = 1e-12) -> float:
    """Snap float dust just outside [0, 1] back onto the boundary."""
    if -dust < x < 0.0:
        return 0.0
    if 1.0 < x < 1.0 + dust:
        return 1.0
    return x


class ThresholdBracketError(BracketError):
    """The threshold relation admits no sign change over the expanded bracket."""


@dataclass(frozen=True)
class EquilibriumReport:
    """One regime's equilibrium: contract, induced efforts and utilities.

    multiplicity records whether other equilibria coexist: a zero-share
    equilibrium alongside the reported one (zero_and_nonzero, neutral only),
    or a continuum of zero-surplus contracts (not_uniquely_defined).
    contributing_set holds the indices of CPs with a strictly positive share.
    """

    regime: str
    contract: Contract
    efforts: EffortProfile
    utilities: Utilities
    total_effort: float
    multiplicity: str
    contributing_set: frozenset[int]
    flags: tuple[str, ...] = ()


@dataclass(frozen=True)
class ComparisonRow:
    """Both regime reports plus non-neutral minus neutral deltas."""

    nonneutral: EquilibriumReport
    neutral: EquilibriumReport
    delta_shares: tuple[float, ...]
    delta_efforts: tuple[float, ...]
    delta_cp: tuple[float, ...]
    delta_isp: float
    delta_social: float
    delta_total_effort: float


@dataclass(frozen=True)
class ScalingRow:
    """Symmetric neutral equilibrium quantities at one market size."""

    n: int
    share: float
    effort: float
    total_effort: float
    cp_utility: float
    isp_utility: float


def _report(
    params: MarketParams,
    shares: tuple[float, ...],
    regime: str,
    multiplicity: str,
    flags: tuple[str, ...] = (),
) -> EquilibriumReport:
    contract = Contract(shares=shares)
    efforts = best_effort(params, contract, regime)
    utilities = expected_utilities(params, contract, efforts)
    return EquilibriumReport(
        regime=regime,
        contract=contract,
        efforts=efforts,
        utilities=utilities,
        total_effort=sum(efforts.efforts),
        multiplicity=multiplicity,
        contributing_set=frozenset(i for i, b in enumerate(shares) if b > 0.0),
        flags=flags,
    )


def nonneutral_equilibrium(params: MarketParams) -> EquilibriumReport:
    """Equilibrium contract when the ISP may differentiate effort per CP.

    CP i shares 1/W(r_i*e/c) when r_i/c > 1 and nothing otherwise.  A CP at
    or below the activation ratio earns zero at any share, so its contract
    is indeterminate and the report is flagged not_uniquely_defined.
    """
    c = params.cost
    shares = []
    degenerate = False
    for r in params.rates:
        if r / c > 1.0:
            shares.append(1.0 / lambert_w0(r / c * _E))
        else:
            shares.append(0.0)
            degenerate = True
    multiplicity = NOT_UNIQUELY_DEFINED if degenerate else UNIQUE
    return _report(params, tuple(shares), NONNEUTRAL, multiplicity)


def _symmetric_neutral(params: MarketParams) -> EquilibriumReport:
    n, c = params.n, params.cost
    r = params.rates[0]
    ratio = r / c
    if ratio <= 1.0:
        return _report(params, (0.0,) * n, NEUTRAL, NOT_UNIQUELY_DEFINED)
    share = 1.0 / (n * lambert_w0(r / (n * c) * math.exp(1.0 / n)))
    multiplicity = ZERO_AND_NONZERO if ratio <= n else UNIQUE
    return _report(params, (share,) * n, NEUTRAL, multiplicity)


def _neutral_two_asymmetric(params: MarketParams) -> EquilibriumReport:
    # dominant CP first, results mapped back to caller order
    c = params.cost
    order = sorted(range(2), key=lambda i: -params.rates[i])
    r1, r2 = (params.rates[i] for i in order)

    if r1 / c <= 2.0:
        flags = (FLAG_ASYMMETRIC_ZERO_SEAM,) if r1 / c > 1.0 else ()
        return _report(params, (0.0, 0.0), NEUTRAL, NOT_UNIQUELY_DEFINED, flags)

    w = lambert_w0((r1 + r2) * math.sqrt(_E) / (4.0 * c))
    if (r1 + r2) / (r1 - r2) > 2.0 * w:
        b1 = _clip01((r1 + r2) / (4.0 * r1 * w) - (r2 - r1) / (2.0 * r1))
        b2 = _clip01((r1 + r2) / (4.0 * r2 * w) - (r1 - r2) / (2.0 * r2))
    else:
        b1 = 1.0 / lambert_w0(r1 * _E / (2.0 * c))
        b2 = 0.0
    sorted_shares = (b1, b2)
    shares = [0.0, 0.0]
    for pos, i in enumerate(order):
        shares[i] = sorted_shares[pos]
    # the all-zero profile is also an equilibrium when no single CP can fund
    # positive effort alone (max r_i <= n*c); here r1 > 2c rules that out
    return _report(params, tuple(shares), NEUTRAL, UNIQUE)


def _neutral_general(params: MarketParams) -> EquilibriumReport:
    """Iterative elimination for n >= 3 neutral markets with unequal rates.

    Solves the equal-margin interior system on the current contributor set,
    drops the weakest CP whenever its implied share goes negative, and
    re-solves.  Excluded CPs are then checked for corner optimality (their
    marginal utility at zero share must not be positive).
    """
    n, c = params.n, params.cost
    rates = params.rates
    active = sorted(range(n), key=lambda i: (-rates[i], i))
    zero_eq_coexists = max(rates) <= n * c

    shares = [0.0] * n
    pooled = 0.0
    while active:
        k = len(active)
        total_rate = sum(rates[i] for i in active)
        if total_rate <= n * c:
            active = []
            break
        w = lambert_w0(total_rate * math.exp(1.0 / k) / (k * n * c))
        pooled = total_rate / (k * w)
        margin = (total_rate - pooled) / k
        if rates[active[-1]] < margin:
            # weakest contributor would need a negative share
            active.pop()
            continue
        for i in active:
            shares[i] = 1.0 - margin / rates[i]
        break

    if not active:
        return _report(params, (0.0,) * n, NEUTRAL, NOT_UNIQUELY_DEFINED)

    flags: list[str] = []
    if len(active) not in (n, 1):
        flags.append(FLAG_BEYOND_CLOSED_FORMS)
    log_term = math.log(pooled / (n * c))
    for i in range(n):
        if i in active:
            continue
        slope = rates[i] / pooled - log_term
        if slope > 1e-9:
            flags.append(f"{FLAG_CORNER_CHECK_FAILED}:{i}")

    multiplicity = ZERO_AND_NONZERO if zero_eq_coexists else UNIQUE
    return _report(params, tuple(shares), NEUTRAL, multiplicity, tuple(flags))


def neutral_equilibrium(params: MarketParams) -> EquilibriumReport:
    """Equilibrium contract when the ISP must exert one common effort.

    Equal rates take the symmetric closed form (reporting the non-zero
    equilibrium whenever it exists); two unequal rates take the interior or
    corner closed form; three or more unequal rates use the elimination
    procedure, which coincides with the closed forms in the all-interior and
    single-contributor cases and is flagged in between.
    """
    if len(set(params.rates)) == 1:
        return _symmetric_neutral(params)
    if params.n == 2:
        return _neutral_two_asymmetric(params)
    return _neutral_general(params)


def _threshold_relation(kind: str, r2: float, c: float):
    if kind == "r1_star":

        def f(r1: float) -> float:
            return (r1 + r2) / (r1 - r2) - 2.0 * lambert_w0(
                (r1 + r2) * math.sqrt(_E) / (4.0 * c)
            )

    elif kind == "r1_a":
        rhs = r2 / lambert_w0(r2 * _E / c)

        def f(r1: float) -> float:
            gap = 1.0 / lambert_w0(r1 * _E / (2.0 * c)) - 1.0 / lambert_w0(r1 * _E / c)
            return r1 * gap - rhs

    elif kind == "r1_b":
        rhs = (2.0 / lambert_w0(r2 * _E / c) - 1.0) * r2

        def f(r1: float) -> float:
            gap = 1.0 / lambert_w0(r1 * _E / (2.0 * c)) - 1.0 / lambert_w0(r1 * _E / c)
            return 2.0 * r1 * gap - rhs

    else:
        raise ValueError(f"kind must be one of {THRESHOLD_KINDS}, got {kind!r}")
    return f


def threshold(kind: str, r2: float, c: float) -> float:
    """Dominant-rate threshold of the given kind for a fixed weak rate r2.

    r1_star: the interior neutral solution meets the corner.
    r1_a:    neutral total effort overtakes non-neutral total effort.
    r1_b:    non-neutral ISP revenue provably exceeds neutral ISP revenue.

    The root is bracketed in (r2, inf) with a doubling upper bound and then
    bisected.  Raises ThresholdBracketError with endpoint diagnostics when
    the relation never changes sign over the expanded bracket (the relation
    then holds or fails on all of (r2, inf)).
    """
    if not (math.isfinite(r2) and r2 > 0.0):
        raise ValueError(f"r2 must be positive, got {r2!r}")
    if not (math.isfinite(c) and c > 0.0):
        raise ValueError(f"c must be positive, got {c!r}")
    f = _threshold_relation(kind, r2, c)

    lo = r2 + 1e-6 * c
    hi = max(4.0 * r2, 8.0 * c)
    flo = f(lo)
    if flo == 0.0:
        return lo
    for _ in range(60):
        if (f(hi) > 0.0) != (flo > 0.0):
            break
        hi *= 2.0
    else:
        raise ThresholdBracketError(
            f"{kind}: no sign change for r1 in ({lo}, {hi}] at r2={r2}, c={c}; "
            f"f(lo)={flo!r}, f(hi)={f(hi)!r}"
        )
    return find_root(f, Bracket(lo, hi), tol=1e-9 * max(1.0, r2, c))


def compare_regimes(params: MarketParams) -> ComparisonRow:
    """Both equilibrium reports with non-neutral minus neutral deltas."""
    nn = nonneutral_equilibrium(params)
    nt = neutral_equilibrium(params)
    return ComparisonRow(
        nonneutral=nn,
        neutral=nt,
        delta_shares=tuple(
            a - b for a, b in zip(nn.contract.shares, nt.contract.shares)
        ),
        delta_efforts=tuple(
            a - b for a, b in zip(nn.efforts.efforts, nt.efforts.efforts)
        ),
        delta_cp=tuple(a - b for a, b in zip(nn.utilities.cp, nt.utilities.cp)),
        delta_isp=nn.utilities.isp_net - nt.utilities.isp_net,
        delta_social=nn.utilities.social - nt.utilities.social,
        delta_total_effort=nn.total_effort - nt.total_effort,
    )


def scaling_report(r: float, c: float, n_range: Iterable[int]) -> list[ScalingRow]:
    """Symmetric neutral equilibrium values across market sizes.

    Requires r/c > 1 so the non-zero equilibrium exists at every n.  Each row
    evaluates share = 1/(n*W(r/(n*c)*e^(1/n))), effort per CP, total effort,
    CP utility (1-share)^2*r/(n*share) and ISP utility r + n*c - (n+1)*share*r.
    """
    if not r / c > 1.0:
        raise ValueError(f"scaling requires r/c > 1, got r={r!r}, c={c!r}")
    sizes = [int(n) for n in n_range]
    if any(n < 1 or n > 10_000 for n in sizes):
        raise ValueError("market sizes must lie in [1, 10000]")
    rows = []
    for n in sizes:
        share = 1.0 / (n * lambert_w0(r / (n * c) * math.exp(1.0 / n)))
        effort = share * r / c - 1.0
        rows.append(
            ScalingRow(
                n=n,
                share=share,
                effort=effort,
                total_effort=n * effort,
                cp_utility=(1.0 - share) ** 2 * r / (n * share),
                isp_utility=r + n * c - (n + 1) * share * r,
            )
        )
    return rows
