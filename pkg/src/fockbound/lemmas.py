"""Executable versions of the three integration lemmas.

Each check returns a LemmaReport with both sides and their slack
(rhs - lhs).  The right side is always 1 - exp(-||g||_1).  For the
supremum over all orders n, the scan stops at the least n* with
P(n*+1, B) <= tol, where B is the support end: for n >= n*,

    (1/n!) int_0^B s^n e^{-s} g(s) ds <= P(n+1, B) <= P(n*+1, B) <= tol,

because 0 <= g <= 1 and P(n+1, B) decreases in n.
"""

from __future__ import annotations

import math

import numpy as np

from . import gamma_kernel as gk
from .extremal import galbis_bound
from .reports import L1_1, L1_2, L1_3, LemmaReport, enforce_slack
from .symbols import (
    DEFAULT_QUAD_TOL,
    StepSymbol,
    SymbolError,
    kernel_integrals,
    validate,
    weighted_kernel_integral,
)

DEFAULT_TRUNCATION_TOL = 1e-12


class UnboundedSupportError(SymbolError):
    pass


def check_lemma_1_1(symbol: StepSymbol, n: int, check: bool = True) -> LemmaReport:
    """Indicator of a finite union I of intervals: mass_n(I) <= 1 - e^{-|I|}."""
    if not isinstance(symbol, StepSymbol):
        raise SymbolError("lemma 1.1 takes a step symbol (finite union of intervals)")
    if not symbol.is_indicator():
        raise SymbolError("lemma 1.1 needs every height equal to 1 (an indicator of a set)")
    return _single_order(L1_1, symbol, n, check)


def check_lemma_1_2(symbol: StepSymbol, p: int, check: bool = True) -> LemmaReport:
    """Weighted disjoint family: sum_k eps_k mass_p(I_k) <= 1 - exp(-sum_k eps_k |I_k|)."""
    if not isinstance(symbol, StepSymbol):
        raise SymbolError("lemma 1.2 takes a step symbol")
    return _single_order(L1_2, symbol, p, check)


def _single_order(lemma_id: str, symbol: StepSymbol, n: int, check: bool) -> LemmaReport:
    validate(symbol)
    lhs = weighted_kernel_integral(symbol, n)
    rhs = galbis_bound(symbol.l1_norm())
    report = LemmaReport(lemma_id, lhs, rhs, rhs - lhs, int(n), int(n), 0.0)
    if check:
        enforce_slack(report, symbol)
    return report


def support_end(symbol) -> float:
    end = float(symbol.support_end)
    if not math.isfinite(end):
        raise UnboundedSupportError(
            "symbol has unbounded support; truncate it first (symbols.truncate, or --truncate-quantile on the CLI)"
        )
    return end


def sweep(symbol, n_max: int, abs_tol: float = DEFAULT_QUAD_TOL, rel_tol: float = 0.0,
          workers: int | None = None) -> list[tuple[int, float]]:
    """(n, integral) pairs for n = 0..n_max."""
    validate(symbol)
    values = kernel_integrals(symbol, int(n_max), abs_tol=abs_tol, rel_tol=rel_tol, workers=workers)
    return [(n, float(v)) for n, v in enumerate(values)]


def check_lemma_1_3(symbol, tol: float = DEFAULT_TRUNCATION_TOL, abs_tol: float = DEFAULT_QUAD_TOL,
                    check: bool = True, workers: int | None = None) -> LemmaReport:
    """sup_n (1/n!) int s^n e^{-s} g(s) ds <= 1 - exp(-||g||_1), with a certified scan."""
    validate(symbol)
    end = support_end(symbol)
    n_star = gk.truncation_order(end, tol)
    values = kernel_integrals(symbol, n_star, abs_tol=abs_tol, workers=workers)
    witness = int(np.argmax(values))
    lhs = float(values[witness])
    rhs = galbis_bound(symbol.l1_norm())
    report = LemmaReport(L1_3, lhs, rhs, rhs - lhs, witness, n_star, gk.reg_lower_gamma(n_star, end))
    if check:
        enforce_slack(report, symbol)
    return report
