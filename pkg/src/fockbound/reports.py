"""Inequality reports and the negative-slack sentinel."""

from __future__ import annotations

import json
from dataclasses import dataclass

L1_1 = "L1_1"
L1_2 = "L1_2"
L1_3 = "L1_3"
REARRANGEMENT = "rearrangement"
LEMMA_IDS = (L1_1, L1_2, L1_3, REARRANGEMENT)

SLACK_TOL = 1e-10

FIELDS = ("lemma_id", "lhs", "rhs", "slack", "witness_n", "n_searched", "truncation_bound")


@dataclass(frozen=True)
class LemmaReport:
    """Both sides of one inequality instance; slack = rhs - lhs."""

    lemma_id: str
    lhs: float
    rhs: float
    slack: float
    witness_n: int
    n_searched: int
    truncation_bound: float

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in FIELDS}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @property
    def holds(self) -> bool:
        return self.slack >= -SLACK_TOL


class SlackViolation(ArithmeticError):
    """An inequality came out violated beyond tolerance.

    The inequalities are theorems, so this always signals a numerical
    defect.  ``diagnostics`` carries the offending data and an independent
    re-evaluation of the left side.
    """

    def __init__(self, report: LemmaReport, diagnostics: dict):
        self.report = report
        self.diagnostics = diagnostics
        super().__init__(
            f"{report.lemma_id}: slack {report.slack:.3e} below -{SLACK_TOL:g} "
            f"(lhs={report.lhs!r}, rhs={report.rhs!r}, n={report.witness_n})"
        )


def enforce_slack(report: LemmaReport, symbol) -> LemmaReport:
    if report.holds:
        return report
    from .symbols import dumps, quadrature_kernel_integral

    try:
        lhs_fine = quadrature_kernel_integral(symbol, report.witness_n, abs_tol=1e-14, rel_tol=1e-13)
    except Exception as exc:  # diagnostics must not mask the violation
        lhs_fine = f"unavailable: {exc}"
    try:
        dumped = dumps(symbol)
    except Exception:
        dumped = repr(symbol)
    raise SlackViolation(report, {
        "symbol": dumped,
        "n": report.witness_n,
        "lhs": report.lhs,
        "rhs": report.rhs,
        "lhs_fine_quadrature": lhs_fine,
    })
