"""Scalar numerical kernels: principal-branch LambertW and bisection root finding.

Every closed-form contract in this package is expressed through the LambertW
function (the inverse of w -> w*exp(w) on [-1, inf)), and every threshold is
located by bracketed bisection, so these two kernels are kept dependency-free
and deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

__all__ = [
    "Bracket",
    "BracketError",
    "ConvergenceError",
    "lambert_w0",
    "find_root",
]

_INV_E = math.exp(-1.0)


class BracketError(ValueError):
    """The supplied interval does not bracket a sign change."""


class ConvergenceError(RuntimeError):
    """An iteration failed to converge within its budget."""


@dataclass(frozen=True)
class Bracket:
    """Closed interval [lo, hi] with lo < hi."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError("bracket endpoints must be finite")
        if not self.lo < self.hi:
            raise ValueError(f"bracket requires lo < hi, got [{self.lo}, {self.hi}]")

    @classmethod
    def ordered(cls, a: float, b: float) -> "Bracket":
        """Build a bracket from two endpoints in either order."""
        return cls(min(a, b), max(a, b))


def lambert_w0(x: float) -> float:
    """Principal branch of the LambertW function.

    Returns the w >= -1 solving w*exp(w) = x, for x >= -1/e.  The initial
    guess is log(x) - log(log(x)) for x > e, x/(1+x) near zero, and a
    square-root expansion around the branch point for x close to -1/e;
    Halley's iteration then polishes to machine precision (relative step
    below 1e-15, at most 50 iterations).
    """
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"lambert_w0 requires a finite argument, got {x!r}")
    if x < -_INV_E:
        raise ValueError(f"lambert_w0 domain is x >= -1/e, got {x!r}")
    if x == 0.0:
        return 0.0
    if x <= -_INV_E * (1.0 - 1e-15):
        return -1.0

    if x > math.e:
        log_x = math.log(x)
        w = log_x - math.log(log_x)
    elif x > -0.2:
        w = x / (1.0 + x)
    else:
        # near the branch point -1/e the square-root expansion is accurate
        w = math.sqrt(2.0 * (math.e * x + 1.0)) - 1.0

    for _ in range(50):
        ew = math.exp(w)
        f = w * ew - x
        wp1 = w + 1.0
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
        step = f / denom
        w -= step
        if abs(step) <= 1e-15 * max(1.0, abs(w)):
            return w
    raise ConvergenceError(f"lambert_w0 failed to converge for x={x!r}")


def find_root(
    f: Callable[[float], float],
    bracket: Bracket | tuple[float, float],
    tol: float,
) -> float:
    """Bisection root of f on a sign-changing bracket.

    Returns the bracket midpoint once the width is at most tol.  The
    endpoints may be given in either order; identical inputs always produce
    the identical root.  Raises BracketError when f has the same sign at
    both endpoints and ConvergenceError if 200 halvings do not reach tol
    (only possible when tol underflows the local float spacing).
    """
    if not (math.isfinite(tol) and tol > 0.0):
        raise ValueError(f"tol must be positive and finite, got {tol!r}")
    if not isinstance(bracket, Bracket):
        bracket = Bracket.ordered(*bracket)
    lo, hi = bracket.lo, bracket.hi

    flo = f(lo)
    fhi = f(hi)
    if not (math.isfinite(flo) and math.isfinite(fhi)):
        raise ValueError("f must be finite at the bracket endpoints")
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0.0) == (fhi > 0.0):
        raise BracketError(
            f"no sign change on [{lo}, {hi}]: f(lo)={flo!r}, f(hi)={fhi!r}"
        )

    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol:
            return mid
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0.0) == (flo > 0.0):
            lo, flo = mid, fm
        else:
            hi = mid
    raise ConvergenceError(
        f"bisection did not reach width {tol!r} in 200 iterations (final [{lo}, {hi}])"
    )
