"""Field check: identity, sharpness and seeded inequality suites."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import gamma_kernel as gk
from .extremal import best_interval, galbis_bound, verify_rearrangement
from .lemmas import check_lemma_1_1, check_lemma_1_2, check_lemma_1_3
from .reports import SLACK_TOL
from .symbols import StepSymbol, random_step_symbol
from .toeplitz import RadialSymbol, norm_estimate, spectrum


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def __post_init__(self):
        object.__setattr__(self, "passed", bool(self.passed))

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


def _poisson_survival(k: int, x: float) -> float:
    # 1 - e^{-x} sum_{j<=k} x^j / j!, summed directly
    term, total = 1.0, 1.0
    for j in range(1, k + 1):
        term *= x / j
        total += term
    return 1.0 - math.exp(-x) * total


def identity() -> CheckResult:
    worst = 0.0
    for k in range(65):
        for x in (0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0):
            worst = max(worst, abs(gk.reg_lower_gamma(k, x) - _poisson_survival(k, x)))
    return CheckResult("identity", worst <= 1e-12, f"max deviation {worst:.3e}")


def sharpness() -> CheckResult:
    worst, witnesses = 0.0, set()
    for L in np.linspace(0.3, 30.0, 100):
        rep = check_lemma_1_3(StepSymbol.indicator(0.0, float(L)))
        worst = max(worst, abs(rep.slack))
        witnesses.add(rep.witness_n)
    ok = worst <= 1e-12 and witnesses == {0}
    return CheckResult("sharpness", ok, f"max |slack| {worst:.3e}, witnesses {sorted(witnesses)}")


def monotone_in_order() -> CheckResult:
    ok = True
    for x in (1.0, 5.0, 20.0):
        logs = [gk.log_reg_lower_gamma(n, x) for n in range(501)]
        ok &= all(b < a for a, b in zip(logs, logs[1:]))
    return CheckResult("monotone_in_order", ok, "ln P(n+1, L) strictly decreasing for L in {1, 5, 20}, n <= 500")


def toeplitz_sharpness() -> CheckResult:
    worst = 0.0
    for R in (0.5, 1.0, 2.0):
        disk = RadialSymbol.disk(R)
        gamma0 = spectrum(disk).gammas[0]
        est = norm_estimate(disk)
        worst = max(worst, abs(gamma0 - galbis_bound(math.pi * R * R)), abs(est.norm_lb - est.bound))
    return CheckResult("toeplitz_sharpness", worst <= 1e-12, f"max deviation {worst:.3e}")


def theorem_property(seed: int, count: int = 200) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = math.inf
    for _ in range(count):
        sym = random_step_symbol(rng, max_pieces=10, support=100.0)
        n = int(rng.integers(0, 151))
        ones = StepSymbol(tuple((a, b, 1.0) for a, b, _ in sym.pieces))
        for rep in (check_lemma_1_1(ones, n, check=False), check_lemma_1_2(sym, n, check=False),
                    check_lemma_1_3(sym, check=False)):
            worst = min(worst, rep.slack)
    return CheckResult("theorem_property", worst >= -SLACK_TOL, f"{count} symbols, min slack {worst:.3e}")


def rearrangement(seed: int, count: int = 30, n_max: int = 30) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = math.inf
    contained = True
    for _ in range(count):
        sym = random_step_symbol(rng, max_pieces=8, support=50.0)
        for n in range(n_max + 1):
            worst = min(worst, verify_rearrangement(sym, n, check=False).slack)
            if sym.l1_norm() > 0:
                ext = best_interval(n, sym.l1_norm())
                contained &= ext.a == 0 if n == 0 else ext.a <= n <= ext.b
    ok = worst >= -SLACK_TOL and contained
    return CheckResult("rearrangement", ok, f"min slack {worst:.3e}, containment {contained}")


def run_all(seed: int = 0) -> list[CheckResult]:
    return [
        identity(),
        sharpness(),
        monotone_in_order(),
        toeplitz_sharpness(),
        theorem_property(seed),
        rearrangement(seed),
    ]
