"""Radial Toeplitz operators on the Fock space over C.

For a symbol F with |F(z)| = g(|z|) the Toeplitz operator is diagonal in
the orthonormal basis e_p(z) = (pi^p / p!)^{1/2} z^p, with entries

    gamma_p = int_0^inf g(sqrt(t/pi)) t^p e^{-t} / p! dt,

obtained from the substitution t = pi r^2.  The pulled-back density
t -> g(sqrt(t/pi)) has L1 norm ||F||_{L1(C)}, so every gamma_p, every
quadratic form <T_F b, b> with ||b|| = 1, and hence the operator norm are
at most 1 - exp(-||F||_{L1(C)}).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import gamma_kernel as gk
from .extremal import galbis_bound
from .lemmas import DEFAULT_TRUNCATION_TOL, support_end
from .reports import L1_3, LemmaReport, enforce_slack
from .symbols import (
    CONSTANT,
    DEFAULT_QUAD_TOL,
    StepSymbol,
    SymbolParseError,
    TabulatedSymbol,
    kernel_integrals,
    validate,
    weighted_kernel_integral,
)

NORMALIZATION_TOL = 1e-12


@dataclass(frozen=True)
class RadialSymbol:
    """|F(z)| = g_radial(|z|), with g_radial a validated symbol in r."""

    g_radial: StepSymbol | TabulatedSymbol

    def __post_init__(self):
        validate(self.g_radial)

    @classmethod
    def disk(cls, radius: float) -> "RadialSymbol":
        return cls(StepSymbol.indicator(0.0, radius))

    @classmethod
    def annulus(cls, inner: float, outer: float, height: float = 1.0) -> "RadialSymbol":
        return cls(StepSymbol(((inner, outer, height),)))

    def l1_on_plane(self) -> float:
        return to_t_variable(self).l1_norm()


def as_radial(symbol) -> RadialSymbol:
    return symbol if isinstance(symbol, RadialSymbol) else RadialSymbol(symbol)


@dataclass(frozen=True, eq=False)
class PulledBackSymbol:
    """t -> g(sqrt(t/pi)) for a tabulated radial profile g."""

    base: TabulatedSymbol

    @property
    def support_end(self) -> float:
        return math.pi * self.base.support_end**2

    def breakpoints(self) -> list[float]:
        return sorted({math.pi * r * r for r in self.base.breakpoints()})

    def evaluate(self, t) -> np.ndarray:
        return self.base.evaluate(np.sqrt(np.asarray(t, dtype=float) / math.pi))

    def l1_norm(self) -> float:
        # 2 pi int g(r) r dr, exact under the base interpolation rule
        r, v = self.base.grid, self.base.values
        r0, r1 = r[:-1], r[1:]
        v0, v1 = v[:-1], v[1:]
        ring = 0.5 * (r1 * r1 - r0 * r0)
        if self.base.interpolation == CONSTANT:
            body = v0 * ring
        else:
            slope = (v1 - v0) / (r1 - r0)
            # int_{r0}^{r1} (r - r0) r dr
            moment = (r1**3 - r0**3) / 3.0 - r0 * ring
            body = v0 * ring + slope * moment
        end = self.base.support_end
        tail = float(v[-1]) * 0.5 * (end * end - float(r[-1]) ** 2)
        return 2.0 * math.pi * math.fsum(body.tolist() + [tail])


def to_t_variable(symbol):
    """Pull the radial profile back to t = pi r^2.

    Step pieces (a, b, eps) map exactly to (pi a^2, pi b^2, eps).
    """
    g = as_radial(symbol).g_radial
    if isinstance(g, StepSymbol):
        return StepSymbol(tuple((math.pi * a * a, math.pi * b * b, eps) for a, b, eps in g.pieces))
    return PulledBackSymbol(g)


def eigenvalue(symbol, p: int, abs_tol: float = DEFAULT_QUAD_TOL, rel_tol: float = 0.0,
               method: str = "auto") -> float:
    """gamma_p = <T_F e_p, e_p>."""
    return weighted_kernel_integral(to_t_variable(symbol), p, abs_tol=abs_tol, rel_tol=rel_tol, method=method)


@dataclass(frozen=True, eq=False)
class EigenvalueSequence:
    gammas: np.ndarray
    P: int
    tail_bound: float
    l1_plane: float

    def to_csv(self) -> str:
        lines = ["p,gamma"]
        lines += [f"{p},{float(g)!r}" for p, g in enumerate(self.gammas)]
        lines.append(f"# tail_bound={self.tail_bound!r} l1_plane={self.l1_plane!r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str) -> "EigenvalueSequence":
        rows, meta = [], {}
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or lines[0].strip() != "p,gamma":
            raise SymbolParseError("expected header 'p,gamma'", line=1)
        for lineno, line in enumerate(lines[1:], start=2):
            if line.startswith("#"):
                for token in line.lstrip("#").split():
                    key, _, value = token.partition("=")
                    meta[key] = float(value)
                continue
            p, g = line.split(",")
            if int(p) != len(rows):
                raise SymbolParseError(f"expected p={len(rows)}, got {p}", line=lineno)
            rows.append(float(g))
        return cls(np.array(rows), len(rows) - 1, meta.get("tail_bound", math.nan), meta.get("l1_plane", math.nan))


def spectrum(symbol, tol: float = DEFAULT_TRUNCATION_TOL, p_max: int | None = None,
             abs_tol: float = DEFAULT_QUAD_TOL, workers: int | None = None) -> EigenvalueSequence:
    """gamma_0..gamma_P, with P the certified truncation point (or ``p_max`` if larger)."""
    t_symbol = to_t_variable(symbol)
    end = support_end(t_symbol)
    P = gk.truncation_order(end, tol)
    if p_max is not None:
        P = max(P, int(p_max))
    gammas = kernel_integrals(t_symbol, P, abs_tol=abs_tol, workers=workers)
    return EigenvalueSequence(gammas, P, gk.reg_lower_gamma(P, end), t_symbol.l1_norm())


@dataclass(frozen=True)
class NormEstimate:
    norm_lb: float
    bound: float
    report: LemmaReport

    @property
    def strict(self) -> bool:
        return self.norm_lb < self.bound - NORMALIZATION_TOL

    def to_dict(self) -> dict:
        return {
            "norm_lb": self.norm_lb,
            "bound": self.bound,
            "strict": self.strict,
            "report": self.report.to_dict(),
        }


def norm_estimate(symbol, tol: float = DEFAULT_TRUNCATION_TOL, abs_tol: float = DEFAULT_QUAD_TOL,
                  workers: int | None = None, check: bool = True) -> NormEstimate:
    """Largest computed gamma_p against 1 - exp(-||F||_1).

    Past the certified range every gamma_p is at most the reported
    truncation bound, so norm_lb is the operator norm up to that tail.
    """
    seq = spectrum(symbol, tol=tol, abs_tol=abs_tol, workers=workers)
    witness = int(np.argmax(seq.gammas))
    norm_lb = float(seq.gammas[witness])
    bound = galbis_bound(seq.l1_plane)
    report = LemmaReport(L1_3, norm_lb, bound, bound - norm_lb, witness, seq.P, seq.tail_bound)
    if check:
        enforce_slack(report, to_t_variable(symbol))
    return NormEstimate(norm_lb, bound, report)


@dataclass(frozen=True, eq=False)
class FockCoefficients:
    """Coefficients b_p of f = sum_p b_p e_p."""

    b: np.ndarray

    def __post_init__(self):
        b = np.array(self.b, dtype=complex).ravel()
        b.setflags(write=False)
        object.__setattr__(self, "b", b)

    def __len__(self) -> int:
        return self.b.size

    def norm_squared(self) -> float:
        return math.fsum((np.abs(self.b) ** 2).tolist())

    def is_normalized(self, tol: float = NORMALIZATION_TOL) -> bool:
        return abs(self.norm_squared() - 1.0) <= tol

    def normalized(self) -> "FockCoefficients":
        return FockCoefficients(self.b / math.sqrt(self.norm_squared()))

    @classmethod
    def basis(cls, p: int, size: int | None = None) -> "FockCoefficients":
        b = np.zeros(max(size or 0, p + 1), dtype=complex)
        b[p] = 1.0
        return cls(b)

    @classmethod
    def random(cls, rng: np.random.Generator, size: int) -> "FockCoefficients":
        z = rng.standard_normal(size) + 1j * rng.standard_normal(size)
        return cls(z).normalized()

    def to_csv(self) -> str:
        lines = ["p,re,im"]
        lines += [f"{p},{float(z.real)!r},{float(z.imag)!r}" for p, z in enumerate(self.b)]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str) -> "FockCoefficients":
        entries = {}
        lines = text.splitlines()
        body = [(i, ln) for i, ln in enumerate(lines, start=1) if ln.strip() and not ln.lstrip().startswith("#")]
        if not body or body[0][1].replace(" ", "") != "p,re,im":
            raise SymbolParseError("expected header 'p,re,im'", line=body[0][0] if body else None)
        for lineno, line in body[1:]:
            cells = line.split(",")
            if len(cells) != 3:
                raise SymbolParseError(f"expected 3 columns, got {len(cells)}", line=lineno)
            try:
                p = int(cells[0])
            except ValueError:
                raise SymbolParseError(f"bad index {cells[0].strip()!r}", line=lineno, field="p") from None
            if p < 0 or p in entries:
                raise SymbolParseError(f"negative or repeated index {p}", line=lineno, field="p")
            try:
                re_, im_ = float(cells[1]), float(cells[2])
            except ValueError:
                raise SymbolParseError("coefficient is not a number", line=lineno) from None
            if not (math.isfinite(re_) and math.isfinite(im_)):
                raise SymbolParseError("coefficient is not finite", line=lineno)
            entries[p] = complex(re_, im_)
        b = np.zeros(max(entries) + 1 if entries else 0, dtype=complex)
        for p, z in entries.items():
            b[p] = z
        return cls(b)


def _gammas_for(symbol, size: int, tol: float, abs_tol: float, workers) -> np.ndarray:
    return spectrum(symbol, tol=tol, p_max=size - 1, abs_tol=abs_tol, workers=workers).gammas[:size]


def quadratic_form(symbol, coeffs: FockCoefficients, tol: float = DEFAULT_TRUNCATION_TOL,
                   abs_tol: float = DEFAULT_QUAD_TOL, workers: int | None = None) -> float:
    """<T_F f, f> = sum_p |b_p|^2 gamma_p for a unit vector f."""
    if not coeffs.is_normalized():
        raise ValueError(f"coefficients must satisfy sum |b_p|^2 = 1 (got {coeffs.norm_squared()!r})")
    if len(coeffs) == 0:
        raise ValueError("empty coefficient vector")
    gammas = _gammas_for(symbol, len(coeffs), tol, abs_tol, workers)
    return math.fsum((np.abs(coeffs.b) ** 2 * gammas).tolist())


def apply_diagonal(symbol, coeffs: FockCoefficients, tol: float = DEFAULT_TRUNCATION_TOL,
                   abs_tol: float = DEFAULT_QUAD_TOL, workers: int | None = None) -> FockCoefficients:
    """T_F f for radial F: multiply b_p by gamma_p."""
    if len(coeffs) == 0:
        return FockCoefficients(np.zeros(0, dtype=complex))
    gammas = _gammas_for(symbol, len(coeffs), tol, abs_tol, workers)
    return FockCoefficients(gammas * coeffs.b)
