"""Domain types and primitive formulas of the revenue-sharing economy.

A market is a set of content providers (CPs), each monetizing demand at a
rate r_i, facing a single ISP with marginal effort cost c.  A contract hands
the ISP a fraction beta_i of CP i's revenue.  Demand grows logarithmically in
ISP effort, so expected CP revenue is r_i*log(a_i+1).  Under the neutral
regime the ISP must exert one common effort for all CPs; under the
non-neutral regime it may differentiate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "NEUTRAL",
    "NONNEUTRAL",
    "REGIMES",
    "MarketParams",
    "Contract",
    "EffortProfile",
    "Utilities",
    "NoiseModel",
    "best_effort",
    "expected_utilities",
    "cara_isp_utility",
    "ir_holds",
]

NEUTRAL = "neutral"
NONNEUTRAL = "nonneutral"
REGIMES = (NEUTRAL, NONNEUTRAL)


def _check_regime(regime: str) -> None:
    if regime not in REGIMES:
        raise ValueError(f"regime must be one of {REGIMES}, got {regime!r}")


@dataclass(frozen=True)
class MarketParams:
    """Deterministic economy: n CPs with monetization rates r_i > 0, ISP cost c > 0.

    Rates are kept in caller order; nothing downstream assumes sortedness.
    """

    n: int
    rates: tuple[float, ...]
    cost: float

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"n must be at least 1, got {self.n}")
        if len(self.rates) != self.n:
            raise ValueError(f"expected {self.n} rates, got {len(self.rates)}")
        for r in self.rates:
            if not (math.isfinite(r) and r > 0.0):
                raise ValueError(f"rates must be positive and finite, got {r!r}")
        if not (math.isfinite(self.cost) and self.cost > 0.0):
            raise ValueError(f"cost must be positive and finite, got {self.cost!r}")

    @classmethod
    def of(cls, rates: tuple[float, ...] | list[float], cost: float) -> "MarketParams":
        rates = tuple(float(r) for r in rates)
        return cls(n=len(rates), rates=rates, cost=float(cost))


@dataclass(frozen=True)
class Contract:
    """Linear revenue-sharing contract: fraction beta_i of CP i's revenue goes to the ISP."""

    shares: tuple[float, ...]

    def __post_init__(self) -> None:
        for b in self.shares:
            if not (math.isfinite(b) and 0.0 <= b <= 1.0):
                raise ValueError(f"shares must lie in [0, 1], got {b!r}")


@dataclass(frozen=True)
class EffortProfile:
    """ISP effort per CP.  Neutral profiles carry one common value replicated n times."""

    efforts: tuple[float, ...]
    regime: str

    def __post_init__(self) -> None:
        _check_regime(self.regime)
        for a in self.efforts:
            if not (math.isfinite(a) and a >= 0.0):
                raise ValueError(f"efforts must be non-negative, got {a!r}")
        if self.regime == NEUTRAL and len(set(self.efforts)) > 1:
            raise ValueError("neutral profiles must have identical efforts")


@dataclass(frozen=True)
class Utilities:
    """Expected utilities: per-CP net revenue, ISP net revenue, and their sum."""

    cp: tuple[float, ...]
    isp_net: float
    social: float


@dataclass(frozen=True)
class NoiseModel:
    """CARA risk parameters of the two-CP demand noise.

    z is the ISP's absolute risk aversion, sigma the per-CP demand noise
    levels, rho their correlation, and reserve the ISP's outside utility.
    All equilibrium machinery works at reserve = -1, where participation is
    implied by the ISP's own effort optimization.
    """

    z: float
    sigma: tuple[float, float]
    rho: float
    reserve: float = -1.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.z) and self.z > 0.0):
            raise ValueError(f"z must be positive, got {self.z!r}")
        if len(self.sigma) != 2:
            raise ValueError("sigma must have exactly two entries")
        for s in self.sigma:
            if not (math.isfinite(s) and s >= 0.0):
                raise ValueError(f"sigma entries must be >= 0, got {s!r}")
        if not (math.isfinite(self.rho) and -1.0 <= self.rho <= 1.0):
            raise ValueError(f"rho must lie in [-1, 1], got {self.rho!r}")
        if not (-1.0 <= self.reserve <= 0.0):
            raise ValueError(f"reserve must lie in [-1, 0], got {self.reserve!r}")


def _check_lengths(params: MarketParams, contract: Contract) -> None:
    if len(contract.shares) != params.n:
        raise ValueError(
            f"contract has {len(contract.shares)} shares for {params.n} CPs"
        )


def best_effort(params: MarketParams, contract: Contract, regime: str) -> EffortProfile:
    """ISP's optimal effort given the contract.

    Non-neutral: a_i = max(beta_i*r_i/c - 1, 0) per CP.  Neutral: the common
    effort a = max(sum(beta_i*r_i)/(n*c) - 1, 0), replicated.
    """
    _check_regime(regime)
    _check_lengths(params, contract)
    c = params.cost
    if regime == NONNEUTRAL:
        efforts = tuple(
            max(b * r / c - 1.0, 0.0) for b, r in zip(contract.shares, params.rates)
        )
    else:
        pooled = sum(b * r for b, r in zip(contract.shares, params.rates))
        a = max(pooled / (params.n * c) - 1.0, 0.0)
        efforts = (a,) * params.n
    return EffortProfile(efforts=efforts, regime=regime)


def expected_utilities(
    params: MarketParams, contract: Contract, efforts: EffortProfile
) -> Utilities:
    """Expected utilities at the given efforts.

    CP i earns (1-beta_i)*r_i*log(a_i+1); the ISP nets
    sum(beta_i*r_i*log(a_i+1)) - c*sum(a_i); social utility is their sum.
    """
    _check_lengths(params, contract)
    if len(efforts.efforts) != params.n:
        raise ValueError(
            f"effort profile has {len(efforts.efforts)} entries for {params.n} CPs"
        )
    c = params.cost
    cp = []
    isp_net = 0.0
    for b, r, a in zip(contract.shares, params.rates, efforts.efforts):
        gain = r * math.log(a + 1.0)
        cp.append((1.0 - b) * gain)
        isp_net += b * gain - c * a
    return Utilities(cp=tuple(cp), isp_net=isp_net, social=sum(cp) + isp_net)


def cara_isp_utility(
    params: MarketParams,
    noise: NoiseModel,
    contract: Contract,
    efforts: EffortProfile,
) -> float:
    """Closed-form expected CARA utility of the ISP under correlated Gaussian demand noise.

    For two CPs the noise vector has covariance
    [[sigma1^2, rho*sigma1*sigma2], [rho*sigma1*sigma2, sigma2^2]], and the
    expectation of -exp(-z*wealth) evaluates to

        -exp(-z*isp_net + (z^2/2)*((b1*r1*s1)^2 + (b2*r2*s2)^2
                                   + 2*rho*b1*b2*r1*r2*s1*s2)).

    Always negative; equals -exp(-z*isp_net) when both sigmas vanish.
    """
    if params.n != 2:
        raise ValueError("the CARA closed form is defined for exactly two CPs")
    _check_lengths(params, contract)
    mean = expected_utilities(params, contract, efforts).isp_net
    b1, b2 = contract.shares
    r1, r2 = params.rates
    s1, s2 = noise.sigma
    variance = (
        (b1 * r1 * s1) ** 2
        + (b2 * r2 * s2) ** 2
        + 2.0 * noise.rho * b1 * b2 * r1 * r2 * s1 * s2
    )
    return -math.exp(-noise.z * mean + 0.5 * noise.z**2 * variance)


def ir_holds(
    params: MarketParams,
    noise: NoiseModel,
    contract: Contract,
    efforts: EffortProfile,
) -> bool:
    """Read-only participation check: expected ISP utility >= reserve.

    Not enforced by any solver (at reserve = -1 it follows from the ISP's own
    optimization); exposed for tests and diagnostics.
    """
    return cara_isp_utility(params, noise, contract, efforts) >= noise.reserve
