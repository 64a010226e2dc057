"""Shared test helpers: independent scalar oracles.

The oracles here deliberately avoid the package's own kernels so the tests
have a second route to every expected value: w_oracle inverts w*exp(w) by
plain interval halving, and root_oracle bisects arbitrary relations.
"""

from __future__ import annotations

import math


def w_oracle(x: float) -> float:
    """Invert w*exp(w) = x for x >= 0 by bisection; independent of the
    package's LambertW kernel."""
    if x == 0.0:
        return 0.0
    lo, hi = 0.0, 1.0
    while hi * math.exp(hi) < x:
        hi *= 2.0
    for _ in range(300):
        mid = 0.5 * (lo + hi)
        if mid * math.exp(mid) < x:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def root_oracle(f, lo: float, hi: float, iterations: int = 300) -> float:
    """Plain bisection for tests; f(lo) and f(hi) must differ in sign."""
    flo = f(lo)
    assert flo == 0.0 or (flo > 0.0) != (f(hi) > 0.0), "oracle bracket invalid"
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0.0) == (flo > 0.0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)
