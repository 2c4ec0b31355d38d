"""Densities g on [0, inf) with 0 <= g <= 1: step and tabulated symbols.

Step symbols are finite families of disjoint intervals with heights in
[0, 1]; every kernel integral against them is an exact combination of
incomplete-gamma masses.  Tabulated symbols are grid samples with an
explicit interpolation rule and go through adaptive quadrature.

File formats
------------
Step symbols are JSON::

    {"type": "step", "pieces": [{"a": 0.0, "b": 1.0, "eps": 1.0}]}

Tabulated symbols are CSV with header ``s,g`` and an optional trailing
metadata line ``# interpolation=linear support_end=40``.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass, field
from typing import NamedTuple, Union

import numpy as np

from . import gamma_kernel as gk
from .quadrature import integrate

LINEAR = "linear"
CONSTANT = "constant"
INTERPOLATIONS = (LINEAR, CONSTANT)

DEFAULT_QUAD_TOL = 1e-10


class SymbolError(ValueError):
    """A symbol violates 0 <= g <= 1, disjointness or grid ordering."""


class SymbolParseError(SymbolError):
    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        prefix = ", ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class Piece(NamedTuple):
    a: float
    b: float
    eps: float


def _finite(value, what: str) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise SymbolError(f"{what} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class StepSymbol:
    """g = sum_k eps_k 1_{[a_k, b_k)} with sorted disjoint intervals."""

    pieces: tuple[Piece, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "pieces", tuple(Piece(*map(float, p)) for p in self.pieces))
        validate(self)

    @classmethod
    def from_triples(cls, triples) -> "StepSymbol":
        return cls(tuple(Piece(*t) for t in triples))

    @classmethod
    def indicator(cls, a: float, b: float) -> "StepSymbol":
        return cls(((a, b, 1.0),))

    @property
    def support_end(self) -> float:
        return self.pieces[-1].b if self.pieces else 0.0

    def l1_norm(self) -> float:
        return math.fsum(p.eps * (p.b - p.a) for p in self.pieces)

    def is_indicator(self) -> bool:
        return all(p.eps == 1.0 for p in self.pieces)

    def breakpoints(self) -> list[float]:
        pts = [0.0]
        for p in self.pieces:
            pts += [p.a, p.b]
        return sorted(set(pts))

    def evaluate(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        out = np.zeros(s.shape)
        for p in self.pieces:
            out[(s >= p.a) & (s < p.b)] = p.eps
        return out


@dataclass(frozen=True)
class TabulatedSymbol:
    """Grid samples of g.

    ``linear`` interpolates between samples, ``constant`` holds each
    sample until the next grid point.  Under either rule g keeps the last
    sample on [grid[-1], support_end] and vanishes outside
    [grid[0], support_end].
    """

    grid: np.ndarray
    values: np.ndarray
    interpolation: str = LINEAR
    support_end: float = field(default=math.nan)

    def __post_init__(self):
        grid = np.array(self.grid, dtype=float)
        values = np.array(self.values, dtype=float)
        grid.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        end = float(self.support_end)
        if grid.size and (math.isnan(end) or (math.isinf(end) and values.size and values[-1] == 0)):
            # a zero tail out to infinity is the same symbol as no tail
            end = float(grid[-1])
        object.__setattr__(self, "support_end", end)
        validate(self)

    def l1_norm(self) -> float:
        s, v = self.grid, self.values
        tail = float(v[-1]) * (self.support_end - float(s[-1]))
        dx = np.diff(s)
        if self.interpolation == LINEAR:
            body = 0.5 * dx * (v[:-1] + v[1:])
        else:
            body = dx * v[:-1]
        return math.fsum(body.tolist() + [tail])

    def breakpoints(self) -> list[float]:
        pts = set(self.grid.tolist())
        pts.update((0.0, self.support_end))
        return sorted(pts)

    def evaluate(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        grid, values = self.grid, self.values
        if self.interpolation == LINEAR:
            out = np.interp(s, grid, values)
        else:
            idx = np.clip(np.searchsorted(grid, s, side="right") - 1, 0, grid.size - 1)
            out = values[idx]
        inside = (s >= grid[0]) & (s <= self.support_end)
        return np.where(inside, out, 0.0)

    def __eq__(self, other):
        if not isinstance(other, TabulatedSymbol):
            return NotImplemented
        return (
            np.array_equal(self.grid, other.grid)
            and np.array_equal(self.values, other.values)
            and self.interpolation == other.interpolation
            and self.support_end == other.support_end
        )

    __hash__ = None


Symbol = Union[StepSymbol, TabulatedSymbol]


def validate(symbol):
    """Return ``symbol`` unchanged if it satisfies its invariants.

    Raises SymbolError naming the first violated condition.  Heights
    outside [0, 1] are never clamped.
    """
    if isinstance(symbol, StepSymbol):
        prev_b = -math.inf
        for k, (a, b, eps) in enumerate(symbol.pieces):
            a = _finite(a, f"piece {k} a")
            b = _finite(b, f"piece {k} b")
            eps = _finite(eps, f"piece {k} eps")
            if a < 0:
                raise SymbolError(f"piece {k}: left end {a} is negative")
            if not b > a:
                raise SymbolError(f"piece {k}: empty or reversed interval [{a}, {b}]")
            if a < prev_b:
                raise SymbolError(
                    f"piece {k}: overlapping or unsorted intervals (previous ends at {prev_b}, this starts at {a})"
                )
            if eps < 0:
                raise SymbolError(f"piece {k}: negative height {eps}")
            if eps > 1:
                raise SymbolError(f"piece {k}: height {eps} exceeds 1")
            prev_b = b
        return symbol
    if isinstance(symbol, TabulatedSymbol):
        grid, values = symbol.grid, symbol.values
        if grid.ndim != 1 or grid.shape != values.shape:
            raise SymbolError("grid and values must be 1-d arrays of equal length")
        if grid.size < 1:
            raise SymbolError("tabulated symbol needs at least one grid point")
        if symbol.interpolation not in INTERPOLATIONS:
            raise SymbolError(f"unknown interpolation {symbol.interpolation!r}")
        if not (np.all(np.isfinite(grid)) and np.all(np.isfinite(values))):
            raise SymbolError("grid and values must be finite")
        if grid[0] < 0:
            raise SymbolError(f"grid starts at negative s = {grid[0]}")
        bad = np.nonzero(np.diff(grid) <= 0)[0]
        if bad.size:
            raise SymbolError(f"grid not strictly increasing at index {bad[0] + 1}")
        low = np.nonzero(values < 0)[0]
        if low.size:
            raise SymbolError(f"negative height {values[low[0]]} at s = {grid[low[0]]}")
        high = np.nonzero(values > 1)[0]
        if high.size:
            raise SymbolError(f"height {values[high[0]]} exceeds 1 at s = {grid[high[0]]}")
        if math.isnan(symbol.support_end) or symbol.support_end < grid[-1]:
            raise SymbolError(f"support_end {symbol.support_end} lies before the last grid point {grid[-1]}")
        if math.isinf(symbol.support_end) and values[-1] > 0:
            raise SymbolError("symbol is not integrable: nonzero height on an unbounded tail")
        return symbol
    if hasattr(symbol, "evaluate") and hasattr(symbol, "l1_norm"):
        return symbol
    raise SymbolError(f"not a symbol: {type(symbol).__name__}")


def l1_norm(symbol) -> float:
    return symbol.l1_norm()


def _quadrature_breakpoints(symbol, n: int) -> list[float]:
    end = symbol.support_end
    pts = set(symbol.breakpoints())
    root = math.sqrt(n)
    for c in (n - 3.0 * root, float(n), n + 3.0 * root):
        if 0.0 < c < end:
            pts.add(c)
    return sorted(p for p in pts if 0.0 <= p <= end)


def quadrature_kernel_integral(symbol, n: int, abs_tol: float = DEFAULT_QUAD_TOL,
                               rel_tol: float = 0.0) -> float:
    """Adaptive quadrature of h_n * g over the support of g."""
    end = symbol.support_end
    if math.isinf(end):
        raise SymbolError("quadrature needs a bounded support")

    def integrand(s):
        return gk.kernel_array(n, s) * symbol.evaluate(s)

    value, _ = integrate(integrand, _quadrature_breakpoints(symbol, n), abs_tol=abs_tol, rel_tol=rel_tol)
    return value


def weighted_kernel_integral(symbol, n: int, abs_tol: float = DEFAULT_QUAD_TOL,
                             rel_tol: float = 0.0, method: str = "auto") -> float:
    """(1/n!) int_0^inf s^n e^{-s} g(s) ds.

    Step symbols take the exact path sum_k eps_k * mass_n([a_k, b_k])
    unless ``method="quadrature"`` forces the adaptive rule; all other
    symbols are integrated numerically to ``abs_tol``/``rel_tol``.
    """
    if method not in ("auto", "exact", "quadrature"):
        raise ValueError(f"unknown method {method!r}")
    if isinstance(symbol, StepSymbol) and method != "quadrature":
        return math.fsum(p.eps * gk.interval_mass(n, p.a, p.b).mass for p in symbol.pieces)
    if method == "exact":
        raise ValueError("exact path is only available for step symbols")
    return quadrature_kernel_integral(symbol, n, abs_tol=abs_tol, rel_tol=rel_tol)


def kernel_integrals(symbol, n_max: int, abs_tol: float = DEFAULT_QUAD_TOL,
                     rel_tol: float = 0.0, workers: int | None = None) -> np.ndarray:
    """weighted_kernel_integral for every order n = 0..n_max."""
    if isinstance(symbol, StepSymbol):
        total = np.zeros(n_max + 1)
        ends = sorted({v for p in symbol.pieces for v in (p.a, p.b)})
        tails: dict = {}
        if ends:
            p_all, q_all = gk.gamma_tails_orders(np.array(ends), n_max)
            tails = {v: (pv, qv) for v, pv, qv in zip(ends, p_all, q_all)}
        for p in symbol.pieces:
            total += p.eps * gk.interval_mass_orders(p.a, p.b, n_max, tails)
        return total

    def one(n):
        return quadrature_kernel_integral(symbol, n, abs_tol=abs_tol, rel_tol=rel_tol)

    if workers is not None and workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            return np.array(list(pool.map(one, range(n_max + 1))))
    return np.array([one(n) for n in range(n_max + 1)])


def truncate(symbol, quantile: float):
    """Cut ``symbol`` where its cumulative L1 mass first reaches ``quantile``.

    Returns ``(truncated_symbol, discarded_mass)``.  The cut is placed at a
    grid point (or piece end) so the kept part is represented exactly.
    """
    if not 0 < quantile <= 1:
        raise ValueError(f"quantile must be in (0, 1], got {quantile!r}")
    total = symbol.l1_norm()
    target = quantile * total
    if isinstance(symbol, StepSymbol):
        kept, acc = [], 0.0
        for p in symbol.pieces:
            kept.append(p)
            acc += p.eps * (p.b - p.a)
            if acc >= target:
                break
        cut = StepSymbol(tuple(kept))
    elif isinstance(symbol, TabulatedSymbol):
        s, v = symbol.grid, symbol.values
        for m in range(1, s.size + 1):
            head = TabulatedSymbol(s[:m], v[:m], symbol.interpolation, float(s[m - 1]))
            if head.l1_norm() >= target:
                break
        else:
            head = symbol
        cut = head
    else:
        raise SymbolError(f"cannot truncate {type(symbol).__name__}")
    return cut, max(total - cut.l1_norm(), 0.0)


def random_step_symbol(rng: np.random.Generator, max_pieces: int = 10, support: float = 100.0,
                       heights: str = "uniform") -> StepSymbol:
    """Random step symbol with 0..max_pieces pieces inside [0, support]."""
    k = int(rng.integers(0, max_pieces + 1))
    ends = np.sort(rng.uniform(0.0, support, size=2 * k))
    pieces = []
    for j in range(k):
        a, b = float(ends[2 * j]), float(ends[2 * j + 1])
        if b <= a:
            continue
        eps = 1.0 if heights == "ones" else float(rng.uniform(0.0, 1.0))
        pieces.append((a, b, eps))
    return StepSymbol.from_triples(pieces)


# serialization


def _num(x: float) -> str:
    return repr(float(x))


def dumps_step(symbol: StepSymbol) -> str:
    body = ",".join(
        '{"a":%s,"b":%s,"eps":%s}' % (_num(p.a), _num(p.b), _num(p.eps)) for p in symbol.pieces
    )
    return '{"type":"step","pieces":[%s]}\n' % body


def dumps_tabulated(symbol: TabulatedSymbol) -> str:
    lines = ["s,g"]
    lines += [f"{_num(s)},{_num(g)}" for s, g in zip(symbol.grid, symbol.values)]
    lines.append(f"# interpolation={symbol.interpolation} support_end={_num(symbol.support_end)}")
    return "\n".join(lines) + "\n"


def dumps(symbol) -> str:
    if isinstance(symbol, StepSymbol):
        return dumps_step(symbol)
    if isinstance(symbol, TabulatedSymbol):
        return dumps_tabulated(symbol)
    raise SymbolError(f"cannot serialize {type(symbol).__name__}")


def save_symbol(symbol, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(dumps(symbol))


def loads_step(text: str) -> StepSymbol:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SymbolParseError(exc.msg, line=exc.lineno) from None
    if not isinstance(doc, dict):
        raise SymbolParseError("top level must be an object")
    if doc.get("type") != "step":
        raise SymbolParseError(f"expected type 'step', got {doc.get('type')!r}", field="type")
    pieces = doc.get("pieces")
    if not isinstance(pieces, list):
        raise SymbolParseError("'pieces' must be a list", field="pieces")
    triples = []
    for k, item in enumerate(pieces):
        if not isinstance(item, dict):
            raise SymbolParseError(f"piece {k} must be an object", field=f"pieces[{k}]")
        row = []
        for key in ("a", "b", "eps"):
            if key not in item:
                raise SymbolParseError(f"piece {k} is missing {key!r}", field=f"pieces[{k}].{key}")
            value = item[key]
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise SymbolParseError(f"piece {k}: {key} must be a number", field=f"pieces[{k}].{key}")
            row.append(float(value))
        triples.append(tuple(row))
    return StepSymbol.from_triples(triples)


def _parse_metadata(text: str, lineno: int) -> dict:
    meta = {}
    for token in text.lstrip("#").split():
        key, sep, value = token.partition("=")
        if not sep:
            raise SymbolParseError(f"malformed metadata token {token!r}", line=lineno)
        meta[key] = value
    unknown = set(meta) - {"interpolation", "support_end"}
    if unknown:
        raise SymbolParseError(f"unknown metadata key {sorted(unknown)[0]!r}", line=lineno)
    return meta


def loads_tabulated(text: str) -> TabulatedSymbol:
    grid, values, meta = [], [], {}
    reader = csv.reader(io.StringIO(text))
    header_seen = False
    for lineno, row in enumerate(reader, start=1):
        if not row or all(not c.strip() for c in row):
            continue
        if row[0].lstrip().startswith("#"):
            meta = _parse_metadata(",".join(row), lineno)
            continue
        if not header_seen:
            if [c.strip() for c in row] != ["s", "g"]:
                raise SymbolParseError(f"expected header 's,g', got {','.join(row)!r}", line=lineno)
            header_seen = True
            continue
        if meta:
            raise SymbolParseError("data row after the metadata line", line=lineno)
        if len(row) != 2:
            raise SymbolParseError(f"expected 2 columns, got {len(row)}", line=lineno)
        parsed = []
        for name, cell in zip("sg", row):
            try:
                value = float(cell)
            except ValueError:
                raise SymbolParseError(f"not a number: {cell.strip()!r}", line=lineno, field=name) from None
            if not math.isfinite(value):
                raise SymbolParseError(f"not finite: {cell.strip()!r}", line=lineno, field=name)
            parsed.append(value)
        s, g = parsed
        if not 0.0 <= g <= 1.0:
            raise SymbolParseError(f"height {g} out of [0, 1]", line=lineno, field="g")
        grid.append(s)
        values.append(g)
    if not header_seen:
        raise SymbolParseError("missing header 's,g'")
    if not grid:
        raise SymbolParseError("no data rows")
    interpolation = meta.get("interpolation", LINEAR)
    try:
        support_end = float(meta["support_end"]) if "support_end" in meta else math.nan
    except ValueError:
        raise SymbolParseError(f"bad support_end {meta['support_end']!r}", field="support_end") from None
    return TabulatedSymbol(np.array(grid), np.array(values), interpolation, support_end)


def load_symbol(source, format: str | None = None):
    """Read a symbol from a path or a text stream.

    ``format`` is ``"json"`` (step) or ``"csv"`` (tabulated); when omitted
    it is taken from the file extension.
    """
    if isinstance(source, (str, os.PathLike)):
        if format is None:
            ext = os.path.splitext(os.fspath(source))[1].lower()
            format = {".json": "json", ".csv": "csv"}.get(ext)
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = source.read()
    if format == "json":
        return loads_step(text)
    if format == "csv":
        return loads_tabulated(text)
    raise SymbolParseError(f"unknown symbol format {format!r} (use json or csv)")
