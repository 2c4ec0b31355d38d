"""Windows of fixed length that carry the most h_n mass.

For n >= 1 the best window [a, a + L] balances the kernel at both ends,
h_n(a) = h_n(a + L), i.e. n log(1 + L/a) = L.  The left side decreases
strictly in a, tends to infinity as a -> 0 and is below L at a = n, so
the root always lies in (0, n) and the window straddles the peak.  For
n = 0 the kernel is decreasing and the window starts at 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import gamma_kernel as gk
from .reports import LemmaReport, REARRANGEMENT, enforce_slack
from .symbols import StepSymbol, weighted_kernel_integral


@dataclass(frozen=True)
class ExtremalInterval:
    n: int
    length: float
    a: float
    b: float
    mass: float

    def to_dict(self) -> dict:
        return {"n": self.n, "length": self.length, "a": self.a, "b": self.b, "mass": self.mass}


def galbis_bound(length: float) -> float:
    """1 - exp(-length): the largest h_n mass any density of L1 norm ``length`` can carry."""
    length = float(length)
    if not length >= 0:
        raise ValueError(f"length must be >= 0, got {length!r}")
    return -math.expm1(-length)


def stationarity_residual(n: int, length: float, a: float) -> float:
    """n log(1 + L/a) - L, which equals log h_n(a) - log h_n(a + L) up to sign."""
    return n * math.log1p(length / a) - length


def _balance_point(n: int, length: float) -> float:
    hi = float(n)
    lo = 0.5 * hi
    while stationarity_residual(n, length, lo) <= 0:
        hi = lo
        lo *= 0.5
        if lo == 0.0:
            return 0.0
    # residual(lo) > 0 >= residual(hi); bisect down to adjacent doubles
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if stationarity_residual(n, length, mid) > 0:
            lo = mid
        else:
            hi = mid
    r_lo = abs(stationarity_residual(n, length, lo))
    r_hi = abs(stationarity_residual(n, length, hi))
    return lo if r_lo <= r_hi else hi


def best_interval(n: int, length: float) -> ExtremalInterval:
    """The window [a, a + length] maximizing the h_n mass."""
    n = int(n)
    if n < 0:
        raise ValueError(f"kernel order must be >= 0, got {n}")
    length = float(length)
    if not length > 0 or math.isinf(length):
        raise ValueError(f"length must be positive and finite, got {length!r}")
    a = 0.0 if n == 0 else _balance_point(n, length)
    b = a + length
    return ExtremalInterval(n, length, a, b, gk.interval_mass(n, a, b).mass)


def verify_rearrangement(symbol: StepSymbol, n: int, check: bool = True) -> LemmaReport:
    """Compare the h_n integral of ``symbol`` with its best single window.

    Among densities with 0 <= g <= 1 and the same L1 norm, the indicator
    of the best window carries the most mass, so slack = rhs - lhs >= 0.
    """
    lhs = weighted_kernel_integral(symbol, n)
    norm = symbol.l1_norm()
    rhs = best_interval(n, norm).mass if norm > 0 else 0.0
    report = LemmaReport(REARRANGEMENT, lhs, rhs, rhs - lhs, n, n, 0.0)
    if check:
        enforce_slack(report, symbol)
    return report
