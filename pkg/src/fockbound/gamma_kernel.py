"""Poisson-type kernel h_n(s) = s^n e^{-s} / n! and its interval masses.

Everything is evaluated in log domain. The kernel uses the saddle-point
form

    log h_n(s) = -stirlerr(n) - bd0(n, s) - log(2 pi n) / 2

where ``bd0(n, s) = n log(n/s) + s - n`` is computed without cancellation
near s = n.  This keeps full relative accuracy for orders up to 10**6 and
beyond, where forming s**n or n! directly would overflow.

The regularized lower incomplete gamma at integer shape n + 1 is

    P(n+1, x) = (1/n!) int_0^x s^n e^{-s} ds = 1 - e^{-x} sum_{j<=n} x^j/j!

and both tails are returned with relative accuracy so that tiny masses
and masses close to one survive subtraction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

N_SWITCH = 64
TAIL_SPLIT = 0.5

_LOG_2PI = math.log(2.0 * math.pi)
_EPS = 2.0**-53
_MAX_ITER = 10_000_000

_LOG_FACTORIALS = tuple(math.log(math.factorial(k)) for k in range(21))

# stirlerr(k) = log k! - (k + 1/2) log k + k - log(2 pi)/2, tabulated where
# the asymptotic series is not yet accurate to double precision.
_STIRLERR_TABLE = (0.0,) + tuple(
    _LOG_FACTORIALS[k] - (k + 0.5) * math.log(k) + k - 0.5 * _LOG_2PI for k in range(1, 16)
)
_STIRLERR_ARRAY = np.array(_STIRLERR_TABLE)

_S0 = 1.0 / 12.0
_S1 = 1.0 / 360.0
_S2 = 1.0 / 1260.0
_S3 = 1.0 / 1680.0
_S4 = 1.0 / 1188.0


def _check_order(n) -> int:
    if isinstance(n, bool) or int(n) != n or n < 0:
        raise ValueError(f"kernel order must be a nonnegative integer, got {n!r}")
    return int(n)


def log_factorial(n: int) -> float:
    """Return ln(n!); exact-integer table for n <= 20, lgamma above."""
    n = _check_order(n)
    if n <= 20:
        return _LOG_FACTORIALS[n]
    return math.lgamma(n + 1.0)


def stirlerr(n: int) -> float:
    """Error of Stirling's formula for ln(n!), for n >= 1."""
    if n <= 15:
        return _STIRLERR_TABLE[n]
    nn = float(n) * n
    return (_S0 - (_S1 - (_S2 - (_S3 - _S4 / nn) / nn) / nn) / nn) / n


def bd0(n: float, s: float) -> float:
    """Deviance term n log(n/s) + s - n, accurate when s is close to n."""
    if abs(n - s) < 0.1 * (n + s):
        v = (n - s) / (n + s)
        total = (n - s) * v
        ej = 2.0 * n * v
        v *= v
        j = 1
        while True:
            ej *= v
            nxt = total + ej / (2 * j + 1)
            if nxt == total:
                return nxt
            total = nxt
            j += 1
    return n * math.log(n / s) + s - n


def log_kernel(n: int, s: float) -> float:
    """ln h_n(s); ``-inf`` where the kernel vanishes (s = 0, n >= 1)."""
    n = _check_order(n)
    if s < 0:
        raise ValueError(f"kernel argument must be >= 0, got {s!r}")
    if n == 0:
        return -float(s)
    if s == 0:
        return -math.inf
    if math.isinf(s):
        return -math.inf
    return -stirlerr(n) - bd0(n, s) - 0.5 * (_LOG_2PI + math.log(n))


def kernel(n: int, s: float) -> float:
    """h_n(s) = s^n e^{-s} / n!, with h_0(0) = 1.

    The kernel is unimodal with its peak h_n(n) <= 1 at s = n.

    >>> kernel(0, 0.0)
    1.0
    >>> round(kernel(1, 1.0), 7)
    0.3678794
    """
    return math.exp(log_kernel(n, s))


# numpy versions, used by the quadrature and order-sweep paths


def _stirlerr_array(n: np.ndarray) -> np.ndarray:
    n = np.asarray(n, dtype=float)
    small = n <= 15
    out = np.empty_like(n)
    out[small] = _STIRLERR_ARRAY[n[small].astype(int)]
    big = n[~small]
    nn = big * big
    out[~small] = (_S0 - (_S1 - (_S2 - (_S3 - _S4 / nn) / nn) / nn) / nn) / big
    return out


def _bd0_array(n: np.ndarray, s: np.ndarray) -> np.ndarray:
    n, s = np.broadcast_arrays(np.asarray(n, dtype=float), np.asarray(s, dtype=float))
    near = np.abs(n - s) < 0.1 * (n + s)
    out = np.empty(n.shape)
    # subnormal s overflows n/s to inf, which correctly sends h_n to 0
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        far = ~near
        out[far] = n[far] * np.log(n[far] / s[far]) + s[far] - n[far]
    nn, ss = n[near], s[near]
    if nn.size:
        v = (nn - ss) / (nn + ss)
        total = (nn - ss) * v
        ej = 2.0 * nn * v
        v2 = v * v
        # |v| < 0.1, so 20 terms reach far below double precision
        for j in range(1, 21):
            ej = ej * v2
            total = total + ej / (2 * j + 1)
        out[near] = total
    return out


def log_kernel_array(n, s) -> np.ndarray:
    """Broadcasting ln h_n(s) for integer array ``n`` and real array ``s``."""
    n, s = np.broadcast_arrays(np.asarray(n), np.asarray(s, dtype=float))
    if np.any(s < 0):
        raise ValueError("kernel argument must be >= 0")
    n = n.astype(float)
    out = np.full(n.shape, -np.inf)
    zero_order = n == 0
    out[zero_order] = -s[zero_order]
    regular = ~zero_order & (s > 0) & np.isfinite(s)
    if np.any(regular):
        nr, sr = n[regular], s[regular]
        out[regular] = -_stirlerr_array(nr) - _bd0_array(nr, sr) - 0.5 * (_LOG_2PI + np.log(nr))
    return out


def kernel_array(n, s) -> np.ndarray:
    return np.exp(log_kernel_array(n, s))


# incomplete gamma


def _log_lower_series(n: int, x: float) -> float:
    """ln P(n+1, x) from the power series; converges fast for x < n + 1."""
    a = n + 1.0
    term = 1.0
    total = 1.0
    k = 1
    while k < _MAX_ITER:
        term *= x / (a + k)
        total += term
        if term < total * _EPS:
            break
        k += 1
    # P(n+1, x) = h_{n+1}(x) * total
    return log_kernel(n + 1, x) + math.log(total)


def _log_upper_finite(n: int, x: float) -> float:
    """ln Q(n+1, x) = ln(e^{-x} sum_{j<=n} x^j/j!), largest term first."""
    # for x >= n + 1 the largest term is j = n; walk down with ratio j/x
    term = 1.0
    total = 1.0
    for j in range(n, 0, -1):
        term *= j / x
        total += term
        if term < total * _EPS:
            break
    return log_kernel(n, x) + math.log(total)


def _log_upper_cf(n: int, x: float) -> float:
    """ln Q(n+1, x) by the Legendre continued fraction (modified Lentz)."""
    a = n + 1.0
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    i = 1
    while i < _MAX_ITER:
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
        i += 1
    # Q(n+1, x) = x^{n+1} e^{-x} / n! * h = x * h_n(x) * h
    return math.log(x) + log_kernel(n, x) + math.log(h)


def _log_tails(n: int, x: float) -> tuple[float, float]:
    """(ln P(n+1, x), ln Q(n+1, x)), each relatively accurate."""
    if x == 0:
        return -math.inf, 0.0
    if math.isinf(x):
        return 0.0, -math.inf
    if x < n + 1.0:
        log_p = _log_lower_series(n, x)
        p = math.exp(log_p)
        return log_p, math.log1p(-p)
    if n <= N_SWITCH:
        log_q = _log_upper_finite(n, x)
    else:
        log_q = _log_upper_cf(n, x)
    q = math.exp(log_q)
    return math.log1p(-q), log_q


def _check_x(x: float) -> float:
    x = float(x)
    if not x >= 0:
        raise ValueError(f"incomplete gamma argument must be >= 0, got {x!r}")
    return x


def gamma_tails(n: int, x: float) -> tuple[float, float]:
    """Return (P(n+1, x), Q(n+1, x)) with P + Q = 1."""
    n = _check_order(n)
    log_p, log_q = _log_tails(n, _check_x(x))
    return math.exp(log_p), math.exp(log_q)


def reg_lower_gamma(n: int, x: float) -> float:
    """P(n+1, x), the h_n mass of [0, x]; also P(Poisson(x) > n).

    >>> reg_lower_gamma(0, math.log(2.0))
    0.5
    """
    return gamma_tails(n, x)[0]


def reg_upper_gamma(n: int, x: float) -> float:
    """Q(n+1, x) = e^{-x} sum_{j<=n} x^j / j! = P(Poisson(x) <= n)."""
    return gamma_tails(n, x)[1]


def log_reg_lower_gamma(n: int, x: float) -> float:
    """ln P(n+1, x), finite far below the double underflow threshold."""
    n = _check_order(n)
    return _log_tails(n, _check_x(x))[0]


def log_reg_upper_gamma(n: int, x: float) -> float:
    n = _check_order(n)
    return _log_tails(n, _check_x(x))[1]


@dataclass(frozen=True)
class IntervalMass:
    n: int
    a: float
    b: float
    mass: float

    def __float__(self) -> float:
        return self.mass


def _mass_from_tails(pa: float, qa: float, pb: float, qb: float) -> float:
    if pa > TAIL_SPLIT:
        mass = qa - qb
    else:
        mass = pb - pa
    return min(max(mass, 0.0), 1.0)


def interval_mass(n: int, a: float, b: float) -> IntervalMass:
    """The h_n mass of [a, b].

    Lower-tail differences are used unless both endpoints sit in the upper
    half of the distribution, where survival differences lose less.
    """
    n = _check_order(n)
    a, b = float(a), float(b)
    if not 0 <= a <= b:
        raise ValueError(f"interval_mass needs 0 <= a <= b, got a={a!r}, b={b!r}")
    if a == b:
        return IntervalMass(n, a, b, 0.0)
    pa, qa = gamma_tails(n, a)
    pb, qb = gamma_tails(n, b)
    return IntervalMass(n, a, b, _mass_from_tails(pa, qa, pb, qb))


def gamma_tails_orders(x, n_max: int) -> tuple[np.ndarray, np.ndarray]:
    """Arrays (P(n+1, x), Q(n+1, x)) for n = 0..n_max.

    ``x`` may be a scalar or a 1-d array; the order runs along the last
    axis.  Q is accumulated forward from the Poisson terms h_j(x); P is
    anchored at n_max by the scalar evaluation and accumulated backward.
    Both are sums of positive terms, so each tail keeps its relative
    accuracy.
    """
    n_max = _check_order(n_max)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(~(xs >= 0)):
        raise ValueError("incomplete gamma argument must be >= 0")
    orders = np.arange(n_max + 1)
    terms = kernel_array(orders[None, :], xs[:, None])
    terms[xs == 0] = 0.0
    q_fwd = np.cumsum(terms, axis=1)
    p_top = np.array([reg_lower_gamma(n_max, float(v)) for v in xs])
    # P(n+1, x) = P(n_max+1, x) + sum_{j=n+1}^{n_max} h_j(x)
    rev = np.cumsum(terms[:, ::-1], axis=1)[:, ::-1]
    p_bwd = np.empty_like(terms)
    p_bwd[:, :-1] = p_top[:, None] + rev[:, 1:]
    p_bwd[:, -1] = p_top
    use_p = p_bwd <= TAIL_SPLIT
    p = np.clip(np.where(use_p, p_bwd, 1.0 - q_fwd), 0.0, 1.0)
    q = np.clip(np.where(use_p, 1.0 - p_bwd, q_fwd), 0.0, 1.0)
    if np.ndim(x) == 0:
        return p[0], q[0]
    return p, q


def interval_mass_orders(a: float, b: float, n_max: int, tails=None) -> np.ndarray:
    """h_n masses of [a, b] for n = 0..n_max (same split rule as interval_mass).

    ``tails`` optionally maps endpoints to precomputed gamma_tails_orders.
    """
    a, b = float(a), float(b)
    if not 0 <= a <= b:
        raise ValueError(f"interval_mass needs 0 <= a <= b, got a={a!r}, b={b!r}")
    if a == b:
        return np.zeros(n_max + 1)
    tails = tails if tails is not None else {}
    missing = [v for v in (a, b) if v not in tails]
    if missing:
        p, q = gamma_tails_orders(np.array(missing), n_max)
        for v, pv, qv in zip(missing, p, q):
            tails[v] = (pv, qv)
    pa, qa = tails[a]
    pb, qb = tails[b]
    mass = np.where(pa > TAIL_SPLIT, qa - qb, pb - pa)
    return np.clip(mass, 0.0, 1.0)


def truncation_order(x: float, tol: float) -> int:
    """Least n with P(n+1, x) <= tol.

    P(n+1, x) is strictly decreasing in n, so every order at or past the
    returned one carries at most ``tol`` of the kernel mass on [0, x].
    """
    x = _check_x(x)
    if not tol > 0:
        raise ValueError(f"tolerance must be positive, got {tol!r}")
    if math.isinf(x):
        raise ValueError("truncation needs a finite support end")
    log_tol = math.log(tol)
    if log_reg_lower_gamma(0, x) <= log_tol:
        return 0
    lo = 0
    hi = max(1, int(x) + 1)
    while log_reg_lower_gamma(hi, x) > log_tol:
        lo = hi
        hi *= 2
    # invariant: P(lo+1) > tol >= P(hi+1)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if log_reg_lower_gamma(mid, x) > log_tol:
            lo = mid
        else:
            hi = mid
    return hi
