"""Command-line front end.

Exit codes: 0 success, 2 bad input (parse or validation), 3 an inequality
violated beyond tolerance (a numerical defect) or a failed self-check.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from .extremal import best_interval, galbis_bound
from .lemmas import (
    DEFAULT_TRUNCATION_TOL,
    check_lemma_1_1,
    check_lemma_1_2,
    check_lemma_1_3,
    sweep,
)
from .reports import FIELDS, SlackViolation
from .symbols import DEFAULT_QUAD_TOL, SymbolError, load_symbol, truncate
from .toeplitz import (
    FockCoefficients,
    RadialSymbol,
    norm_estimate,
    quadratic_form,
    spectrum,
)

SUBCOMMANDS = ("verify-lemma", "extremal", "sweep", "spectrum", "norm", "qform")
THREADS_ENV = "FOCK_RADIAL_THREADS"

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_SLACK = 3


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    subcommand: str | None
    input_path: str | None = None
    tolerance: float = DEFAULT_TRUNCATION_TOL
    quad_tolerance: float = DEFAULT_QUAD_TOL
    output_format: str = "json"
    n: int | None = None
    length: float | None = None
    lemma: str | None = None
    n_max: int | None = None
    p_max: int | None = None
    coeffs_path: str | None = None
    random_coeffs: int | None = None
    seed: int | None = None
    truncate_quantile: float | None = None
    self_check: bool = False

    def __post_init__(self):
        if not self.tolerance > 0 or not self.quad_tolerance > 0:
            raise UsageError("tolerances must be positive")


def worker_count() -> int | None:
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw == "":
        return None
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return value


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _report_csv(record: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(record.keys())
    writer.writerow([repr(v) if isinstance(v, float) else v for v in record.values()])
    return buf.getvalue()


def _need(value, flag: str):
    if value is None:
        raise UsageError(f"{flag} is required")
    return value


def _load(config: RunConfig, flag: str):
    path = _need(config.input_path, flag)
    symbol = load_symbol(path)
    discarded = None
    if config.truncate_quantile is not None:
        symbol, discarded = truncate(symbol, config.truncate_quantile)
    return symbol, discarded


def _verify_lemma(config: RunConfig, workers) -> str:
    symbol, discarded = _load(config, "--symbol")
    lemma = _need(config.lemma, "--lemma")
    if lemma == "1.1":
        report = check_lemma_1_1(symbol, _need(config.n, "--n"))
    elif lemma == "1.2":
        report = check_lemma_1_2(symbol, _need(config.n, "--n"))
    else:
        report = check_lemma_1_3(symbol, tol=config.tolerance, abs_tol=config.quad_tolerance, workers=workers)
    record = report.to_dict()
    if discarded is not None:
        record["truncated"] = True
        record["discarded_mass"] = discarded
    if config.output_format == "csv":
        return _report_csv(record)
    return _dump_json(record)


def _extremal(config: RunConfig, workers) -> str:
    ext = best_interval(_need(config.n, "--n"), _need(config.length, "--length"))
    record = ext.to_dict()
    record["galbis_bound"] = galbis_bound(ext.length)
    if config.output_format == "csv":
        return _report_csv(record)
    return _dump_json(record)


def _sweep(config: RunConfig, workers) -> str:
    symbol, _ = _load(config, "--symbol")
    rows = sweep(symbol, _need(config.n_max, "--n-max"), abs_tol=config.quad_tolerance, workers=workers)
    if config.output_format == "json":
        return _dump_json([{"n": n, "integral": v} for n, v in rows])
    return "n,integral\n" + "".join(f"{n},{v!r}\n" for n, v in rows)


def _radial(config: RunConfig) -> RadialSymbol:
    symbol, _ = _load(config, "--radial")
    return RadialSymbol(symbol)


def _spectrum(config: RunConfig, workers) -> str:
    seq = spectrum(_radial(config), tol=config.tolerance, p_max=config.p_max,
                   abs_tol=config.quad_tolerance, workers=workers)
    if config.output_format == "csv":
        return seq.to_csv()
    return _dump_json({
        "P": seq.P,
        "tail_bound": seq.tail_bound,
        "l1_plane": seq.l1_plane,
        "gammas": [float(g) for g in seq.gammas],
    })


def _norm(config: RunConfig, workers) -> str:
    est = norm_estimate(_radial(config), tol=config.tolerance, abs_tol=config.quad_tolerance, workers=workers)
    record = est.to_dict()
    if config.output_format == "csv":
        flat = {k: v for k, v in record.items() if k != "report"}
        flat.update({f"report_{k}": v for k, v in record["report"].items()})
        return _report_csv(flat)
    return _dump_json(record)


def _qform(config: RunConfig, workers) -> str:
    radial = _radial(config)
    if config.coeffs_path is not None:
        with open(config.coeffs_path, encoding="utf-8") as fh:
            coeffs = FockCoefficients.from_csv(fh.read())
    elif config.random_coeffs is not None:
        rng = np.random.default_rng(config.seed if config.seed is not None else 0)
        coeffs = FockCoefficients.random(rng, config.random_coeffs)
    else:
        raise UsageError("qform needs --coeffs or --random")
    value = quadratic_form(radial, coeffs, tol=config.tolerance, abs_tol=config.quad_tolerance, workers=workers)
    est = norm_estimate(radial, tol=config.tolerance, abs_tol=config.quad_tolerance, workers=workers)
    record = {"quadratic_form": value, "norm_lb": est.norm_lb, "bound": est.bound,
              "tail_bound": est.report.truncation_bound, "size": len(coeffs)}
    if config.output_format == "csv":
        return _report_csv(record)
    return _dump_json(record)


_HANDLERS = {
    "verify-lemma": _verify_lemma,
    "extremal": _extremal,
    "sweep": _sweep,
    "spectrum": _spectrum,
    "norm": _norm,
    "qform": _qform,
}


def _self_check(config: RunConfig, out) -> int:
    from .selfcheck import run_all

    results = run_all(seed=config.seed if config.seed is not None else 0)
    passed = all(r.passed for r in results)
    out.write(_dump_json({"passed": passed, "checks": [r.to_dict() for r in results]}))
    return EXIT_OK if passed else EXIT_SLACK


def run(config: RunConfig, out=None, err=None) -> int:
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    try:
        workers = worker_count()
        if config.self_check:
            return _self_check(config, out)
        if config.subcommand not in _HANDLERS:
            raise UsageError(f"choose a subcommand: {', '.join(SUBCOMMANDS)}")
        text = _HANDLERS[config.subcommand](config, workers)
    except SlackViolation as exc:
        err.write(f"error: {exc}\n")
        err.write(_dump_json(exc.diagnostics))
        return EXIT_SLACK
    except (UsageError, SymbolError, ValueError, OSError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INPUT
    out.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fockbound",
        description="Integration lemmas and norm bounds for radial Toeplitz operators on the Fock space.",
    )
    parser.add_argument("--self-check", action="store_true", help="run the identity and sharpness suites")
    parser.add_argument("--seed", type=int, default=None, help="seed for randomized runs")
    sub = parser.add_subparsers(dest="subcommand")

    def common(p, fmt="json"):
        p.add_argument("--tol", type=float, default=DEFAULT_TRUNCATION_TOL, help="truncation tolerance")
        p.add_argument("--quad-tol", type=float, default=DEFAULT_QUAD_TOL, help="quadrature tolerance")
        p.add_argument("--format", choices=("json", "csv"), default=fmt, dest="output_format")
        p.add_argument("--seed", type=int, default=argparse.SUPPRESS)

    p = sub.add_parser("verify-lemma", help="check one of the integration lemmas")
    p.add_argument("--lemma", choices=("1.1", "1.2", "1.3"), required=True)
    p.add_argument("--symbol", required=True, dest="input_path")
    p.add_argument("--n", type=int)
    p.add_argument("--truncate-quantile", type=float)
    common(p)

    p = sub.add_parser("extremal", help="best window of given length for kernel order n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--length", type=float, required=True)
    common(p)

    p = sub.add_parser("sweep", help="kernel integrals for n = 0..n_max")
    p.add_argument("--symbol", required=True, dest="input_path")
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--truncate-quantile", type=float)
    common(p, fmt="csv")

    for name, helptext, fmt in (
        ("spectrum", "eigenvalue sequence of a radial Toeplitz operator", "csv"),
        ("norm", "operator norm against 1 - exp(-||F||_1)", "json"),
        ("qform", "quadratic form for unit coefficient vectors", "json"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--radial", required=True, dest="input_path")
        p.add_argument("--truncate-quantile", type=float)
        if name == "spectrum":
            p.add_argument("--p-max", type=int)
        if name == "qform":
            group = p.add_mutually_exclusive_group(required=True)
            group.add_argument("--coeffs", dest="coeffs_path")
            group.add_argument("--random", type=int, dest="random_coeffs", metavar="SIZE")
        common(p, fmt=fmt)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    ns = vars(args)
    return RunConfig(
        subcommand=ns.get("subcommand"),
        input_path=ns.get("input_path"),
        tolerance=ns.get("tol", DEFAULT_TRUNCATION_TOL),
        quad_tolerance=ns.get("quad_tol", DEFAULT_QUAD_TOL),
        output_format=ns.get("output_format", "json"),
        n=ns.get("n"),
        length=ns.get("length"),
        lemma=ns.get("lemma"),
        n_max=ns.get("n_max"),
        p_max=ns.get("p_max"),
        coeffs_path=ns.get("coeffs_path"),
        random_coeffs=ns.get("random_coeffs"),
        seed=ns.get("seed"),
        truncate_quantile=ns.get("truncate_quantile"),
        self_check=ns.get("self_check", False),
    )


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = config_from_args(args)
    except UsageError as exc:
        parser.error(str(exc))
    if config.subcommand is None and not config.self_check:
        parser.error("a subcommand or --self-check is required")
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
