"""Command-line checks with deterministic JSON reports.

Every command prints one JSON document (sorted keys, two-space indent, ASCII)
so that a fixed configuration and seed produce byte-identical output.  Exit
codes: 0 when every verdict passes, 1 when any check fails, 2 on usage or
input errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from itertools import product
from pathlib import Path
from typing import Sequence

from .euler import (
    certificate_to_json_dict,
    coset_four_term_check,
    make_certificate,
    vanishing_check,
)
from .exact import INFINITY, format_rational, is_prime, padic_valuation
from .measures import (
    Coset,
    LevelMeasure,
    four_term,
    four_term_is_zero,
    lambda_coefficient,
    lambda_table_from_measure,
    measure_from_json_dict,
    measure_from_lambda_table,
    measure_to_json_dict,
    moment,
)
from .paths import rhombus_product
from .series import NCSeries, exp, from_lambda_table, log
from .synth import (
    DEFAULT_CELL_CAP,
    four_term_kernel,
    random_kernel_measure,
    random_lambda_table,
)

__all__ = ["main"]

DEGREE_CAP = 8
DEFAULT_EXPONENT_CAP = 7
MAX_SEED = 2**64 - 1


def size_cap() -> int:
    """Cell-count guard, overridable through the MZV_CAP environment variable."""
    raw = os.environ.get("MZV_CAP")
    if raw is None:
        return DEFAULT_CELL_CAP
    cap = int(raw)
    if cap < 1:
        raise ValueError("MZV_CAP must be a positive integer")
    return cap


def _check_config(p: int, n: int, r: int) -> None:
    if not is_prime(p):
        raise ValueError(f"--p must be prime, got {p}")
    if n < 0:
        raise ValueError("--level must be non-negative")
    if r < 1:
        raise ValueError("--depth must be at least 1")
    cells = p ** (n * r)
    cap = size_cap()
    if cells > cap:
        raise ValueError(f"configuration needs {cells} cells, above the cap {cap}")


def _exponent_words(r: int, cap: int, odd_only: bool) -> list[tuple[int, ...]]:
    words = []
    for word in product(range(cap + 1), repeat=r):
        total = sum(word)
        if total > cap:
            continue
        if odd_only and total % 2 == 0:
            continue
        words.append(word)
    return words


def _valuation_json(value: int | float) -> int | str:
    return "inf" if value == INFINITY else int(value)


def _emit(report: dict, out: str | None) -> int:
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    sys.stdout.write(text)
    if out:
        Path(out).write_text(text, encoding="ascii")
    return 0


def _load_measure(args: argparse.Namespace) -> tuple[LevelMeasure, dict]:
    """Measure from --in, or a seeded kernel measure from the config flags."""
    if args.infile is not None:
        data = json.loads(Path(args.infile).read_text(encoding="ascii"))
        mu = measure_from_json_dict(data)
        for flag, got, expected in (
            ("--p", args.p, mu.p),
            ("--level", args.level, mu.n),
            ("--depth", args.depth, mu.r),
        ):
            if got is not None and got != expected:
                raise ValueError(f"{flag} {got} does not match the input file's {expected}")
        _check_config(mu.p, mu.n, mu.r)
        return mu, {"file": args.infile}
    for flag, got in (("--p", args.p), ("--level", args.level), ("--depth", args.depth)):
        if got is None:
            raise ValueError(f"{flag} is required when no input file is given")
    _check_config(args.p, args.level, args.depth)
    mu = random_kernel_measure(args.p, args.level, args.depth, seed=args.seed)
    return mu, {"seed": args.seed}


def _require_kernel_hypotheses(mu: LevelMeasure) -> None:
    if not four_term_is_zero(mu):
        raise ValueError("input measure is not in the four-term kernel")
    if not mu.is_integer_valued():
        raise ValueError("input measure must be integer-valued")


def cmd_kernel(args: argparse.Namespace) -> int:
    _check_config(args.p, args.level, args.depth)
    basis = four_term_kernel(args.p, args.level, args.depth, cell_cap=size_cap())
    report = {
        "command": "kernel",
        "p": basis.p,
        "n": basis.n,
        "r": basis.r,
        "dimension": basis.dimension,
        "basis": [measure_to_json_dict(vector) for vector in basis.vectors],
    }
    return _emit(report, args.out)


def cmd_vanish(args: argparse.Namespace) -> int:
    mu, source = _load_measure(args)
    _require_kernel_hypotheses(mu)
    checks = []
    all_pass = True
    for word in _exponent_words(mu.r, args.exp_cap, odd_only=True):
        verdict = vanishing_check(mu, word, validate=False)
        all_pass = all_pass and verdict.passed
        checks.append({"exponents": list(word), **verdict.to_json_dict()})
    report = {
        "command": "vanish",
        "p": mu.p,
        "n": mu.n,
        "r": mu.r,
        "source": source,
        "exponent_cap": args.exp_cap,
        "checks": checks,
        "all_pass": all_pass,
    }
    _emit(report, args.out)
    return 0 if all_pass else 1


def cmd_certificate(args: argparse.Namespace) -> int:
    if not is_prime(args.p):
        raise ValueError(f"--p must be prime, got {args.p}")
    cert = make_certificate(args.exponents)
    report = {"command": "certificate", "p": args.p, **certificate_to_json_dict(cert, args.p)}
    return _emit(report, args.out)


def cmd_check_rhombus(args: argparse.Namespace) -> int:
    _check_config(args.p, args.level, args.depth)
    table = random_lambda_table(args.p, args.level, args.depth, seed=args.seed)
    produced = rhombus_product(table)
    combination = lambda_table_from_measure(four_term(measure_from_lambda_table(table)))
    expected = from_lambda_table(combination, degree_cap=table.r)
    matched = produced == expected
    report = {
        "command": "check-rhombus",
        "p": args.p,
        "n": args.level,
        "r": args.depth,
        "seed": args.seed,
        "pass": matched,
    }
    _emit(report, args.out)
    return 0 if matched else 1


def cmd_check_cosets(args: argparse.Namespace) -> int:
    mu, source = _load_measure(args)
    if args.perturb:
        # one-cell edit at the all-ones point: for modulus > 2 this leaves the
        # four-term kernel, so the identity must fail
        mu = mu + LevelMeasure.point_mass(mu.p, mu.n, mu.r, (1,) * mu.r)
    else:
        _require_kernel_hypotheses(mu)
    words = _exponent_words(mu.r, args.exp_cap, odd_only=False)
    moduli = sorted({1, mu.n}) if mu.n >= 1 else [0]
    total = 0
    failures = []
    worst: int | float = INFINITY
    for modulus_exponent in moduli:
        for base in product(range(mu.p**modulus_exponent), repeat=mu.r):
            coset = Coset(base, modulus_exponent)
            for word in words:
                verdict = coset_four_term_check(mu, coset, word, validate=False)
                total += 1
                worst = min(worst, verdict.valuation)
                if not verdict.passed:
                    failures.append(
                        {
                            "modulus_exponent": modulus_exponent,
                            "base": list(base),
                            "exponents": list(word),
                            **verdict.to_json_dict(),
                        }
                    )
    all_pass = not failures
    report = {
        "command": "check-cosets",
        "p": mu.p,
        "n": mu.n,
        "r": mu.r,
        "source": source,
        "exponent_cap": args.exp_cap,
        "perturbed": args.perturb,
        "total_checks": total,
        "worst_valuation": _valuation_json(worst),
        "failures": failures,
        "all_pass": all_pass,
    }
    _emit(report, args.out)
    return 0 if all_pass else 1


def cmd_moments(args: argparse.Namespace) -> int:
    mu, source = _load_measure(args)
    rows = []
    for word in _exponent_words(mu.r + 1, args.exp_cap, odd_only=False):
        value = moment(mu, word)
        rows.append(
            {
                "exponents": list(word),
                "moment": format_rational(value),
                "lambda": format_rational(lambda_coefficient(mu, word)),
                "valuation": _valuation_json(padic_valuation(value, mu.p)),
            }
        )
    report = {
        "command": "moments",
        "p": mu.p,
        "n": mu.n,
        "r": mu.r,
        "source": source,
        "exponent_cap": args.exp_cap,
        "moments": rows,
    }
    return _emit(report, args.out)


def cmd_report(args: argparse.Namespace) -> int:
    _check_config(args.p, args.level, args.depth)
    if args.degree > DEGREE_CAP:
        raise ValueError(f"--degree is capped at {DEGREE_CAP}")
    p, n, r, seed = args.p, args.level, args.depth, args.seed

    table = random_lambda_table(p, n, r, seed=seed)
    series = from_lambda_table(table, degree_cap=args.degree)
    one = NCSeries.one(series.alphabet, args.degree)
    series_ok = exp(log(series)) == series and log(exp(series - one)) == series - one

    produced = rhombus_product(table)
    combination = lambda_table_from_measure(four_term(measure_from_lambda_table(table)))
    rhombus_ok = produced == from_lambda_table(combination, degree_cap=r)

    basis = four_term_kernel(p, n, r, cell_cap=size_cap())
    mu = random_kernel_measure(p, n, r, seed=seed)

    vanish_failures = 0
    odd_words = _exponent_words(r, args.exp_cap, odd_only=True)
    for word in odd_words:
        if not vanishing_check(mu, word, validate=False).passed:
            vanish_failures += 1

    coset_failures = 0
    coset_total = 0
    all_words = _exponent_words(r, args.exp_cap, odd_only=False)
    for modulus_exponent in sorted({1, n}) if n >= 1 else [0]:
        for base in product(range(p**modulus_exponent), repeat=r):
            for word in all_words:
                coset_total += 1
                verdict = coset_four_term_check(mu, Coset(base, modulus_exponent), word, validate=False)
                coset_failures += not verdict.passed

    all_pass = series_ok and rhombus_ok and vanish_failures == 0 and coset_failures == 0
    report = {
        "command": "report",
        "config": {
            "p": p,
            "n": n,
            "r": r,
            "degree": args.degree,
            "exponent_cap": args.exp_cap,
            "seed": seed,
        },
        "checks": {
            "series_round_trip": {"pass": series_ok},
            "rhombus_four_term": {"pass": rhombus_ok},
            "kernel": {"dimension": basis.dimension},
            "vanishing": {
                "total": len(odd_words),
                "failures": vanish_failures,
                "pass": vanish_failures == 0,
            },
            "cosets": {
                "total": coset_total,
                "failures": coset_failures,
                "pass": coset_failures == 0,
            },
        },
        "all_pass": all_pass,
    }
    _emit(report, args.out)
    return 0 if all_pass else 1


def _seed(raw: str) -> int:
    value = int(raw)
    if not 0 <= value <= MAX_SEED:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _exponent_list(raw: str) -> tuple[int, ...]:
    try:
        word = tuple(int(part) for part in raw.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad exponent list {raw!r}") from exc
    if not word or any(e < 0 for e in word):
        raise argparse.ArgumentTypeError("exponents must be non-negative integers")
    return word


def _add_config_flags(parser: argparse.ArgumentParser, required: bool) -> None:
    parser.add_argument("--p", type=int, required=required, help="prime base")
    parser.add_argument("--level", type=int, required=required, help="tower level n")
    parser.add_argument("--depth", type=int, required=required, help="depth r")


def _add_output_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", metavar="FILE", help="also write the report to FILE")
    parser.add_argument("--format", choices=["json"], default="json", help="report format")


def _add_measure_source(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--in", dest="infile", metavar="FILE", help="measure JSON file")
    source.add_argument("--seed", type=_seed, help="seeded kernel measure")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mzvkit",
        description="exact checks for depth-graded measures, kernels, and congruences",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    kernel = sub.add_parser("kernel", help="four-term kernel basis and dimension")
    _add_config_flags(kernel, required=True)
    _add_output_flags(kernel)
    kernel.set_defaults(func=cmd_kernel)

    vanish = sub.add_parser("vanish", help="odd-moment vanishing congruences")
    _add_config_flags(vanish, required=False)
    _add_measure_source(vanish)
    vanish.add_argument("--exp-cap", type=int, default=DEFAULT_EXPONENT_CAP,
                        help="largest exponent sum to sweep")
    _add_output_flags(vanish)
    vanish.set_defaults(func=cmd_vanish)

    certificate = sub.add_parser("certificate", help="four-term combination for a target")
    certificate.add_argument("exponents", type=_exponent_list,
                             help="comma-separated exponent word, e.g. 1,2,4")
    certificate.add_argument("--p", type=int, required=True, help="prime for the slack")
    _add_output_flags(certificate)
    certificate.set_defaults(func=cmd_certificate)

    rhombus = sub.add_parser("check-rhombus", help="rhombus product against the four-term table")
    _add_config_flags(rhombus, required=True)
    rhombus.add_argument("--seed", type=_seed, default=0, help="seed for the random table")
    _add_output_flags(rhombus)
    rhombus.set_defaults(func=cmd_check_rhombus)

    cosets = sub.add_parser("check-cosets", help="signed coset moment identities")
    _add_config_flags(cosets, required=False)
    _add_measure_source(cosets)
    cosets.add_argument("--exp-cap", type=int, default=DEFAULT_EXPONENT_CAP,
                        help="largest exponent sum to sweep")
    cosets.add_argument("--perturb", action="store_true",
                        help="apply a one-cell edit first (the identity must then fail)")
    _add_output_flags(cosets)
    cosets.set_defaults(func=cmd_check_cosets)

    moments = sub.add_parser("moments", help="moment and normalized-coefficient table")
    _add_config_flags(moments, required=False)
    _add_measure_source(moments)
    moments.add_argument("--exp-cap", type=int, default=DEFAULT_EXPONENT_CAP,
                         help="largest exponent sum to tabulate")
    _add_output_flags(moments)
    moments.set_defaults(func=cmd_moments)

    report = sub.add_parser("report", help="aggregate of every check at one configuration")
    _add_config_flags(report, required=True)
    report.add_argument("--seed", type=_seed, default=0, help="seed for tables and measures")
    report.add_argument("--degree", type=int, default=DEGREE_CAP,
                        help="series truncation degree for the round-trip check")
    report.add_argument("--exp-cap", type=int, default=DEFAULT_EXPONENT_CAP,
                        help="largest exponent sum to sweep")
    _add_output_flags(report)
    report.set_defaults(func=cmd_report)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, TypeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
