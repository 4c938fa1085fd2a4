"""Command-line front-end: profile, classify, expand, verify, reduce, find-eta.

Every command produces a JSON report (printed with --json) and a text
rendering (the default).  Exit codes: 0 success, 1 a mathematical check
failed (congruence counterexample, Weierstrass gap, residual), 2 usage or
input error, 3 internal inconsistency (a bug, never bad input).

All numbers in JSON output that can exceed 53 bits (series and
representation coefficients, scales) are emitted as strings.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from math import lcm

from .curves import curve_profile
from .errors import (
    CatalogError,
    CuspLedgerError,
    GapError,
    InternalInconsistencyError,
    ReductionError,
)
from .eta import (
    EtaQuotient,
    cusp_order_vector,
    expand_at_infinity,
    expand_at_zero,
    order_at_cusp,
    parse_constraints,
    search_eta_quotients,
)
from .families import (
    Catalog,
    catalog_load,
    certified_identity_chart,
    classify,
    coefficient_series,
    shipped_catalog_path,
    verify_congruence,
)
from .reduction import localize_reduce, reduce_module, valuation_table
from .series import QSeries

SCHEMA_VERSION = 1
CATALOG_ENV = "CUSP_LEDGER_CATALOG"

EXIT_OK = 0
EXIT_MATH_FAIL = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3


def _load_catalog(args) -> Catalog:
    path = args.catalog or os.environ.get(CATALOG_ENV) or shipped_catalog_path()
    return catalog_load(path)


def _parse_eta_spec(text: str) -> EtaQuotient:
    """Parse "5:6,1:-6" into an eta quotient; the level is the lcm of the keys."""
    exponents = {}
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            d, r = chunk.split(":")
            exponents[int(d)] = int(r)
        except ValueError:
            raise CatalogError(
                f"bad eta spec component {chunk!r}: want delta:exponent"
            ) from None
    level = lcm(*exponents.keys()) if exponents else 1
    return EtaQuotient(level, exponents)


def _emit(args, report: dict, text: str) -> None:
    if args.json:
        report = {"schema_version": SCHEMA_VERSION, **report}
        print(json.dumps(report, indent=2))
    else:
        print(text)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_profile(args) -> int:
    profile = curve_profile(args.level)
    lines = [
        f"X_0({profile.level}): index {profile.index}, "
        f"cusp count {profile.cusp_count}, nu2 {profile.nu2}, "
        f"nu3 {profile.nu3}, genus {profile.genus}"
    ]
    for c in profile.cusp_classes:
        lines.append(
            f"  class c={c.denominator}: count {c.count}, width {c.width}")
    if profile.cusp_count % 2 == 1:
        lines.append("  note: odd cusp count (sporadic level)")
    _emit(args, {"command": "profile", **profile.to_json_obj()},
          "\n".join(lines))
    return EXIT_OK


def cmd_classify(args) -> int:
    if args.family:
        catalog = _load_catalog(args)
        spec = catalog.family(args.family)
        level, prime = spec.level, spec.prime
    elif args.level:
        level, prime = args.level, args.prime
    else:
        raise CatalogError("classify needs --level or --family")
    report = classify(level, prime)
    flags = f" flags: {', '.join(report.sporadic_flags)}" \
        if report.sporadic_flags else ""
    text = (f"level {report.level}: cusp count {report.cusp_count}, genus "
            f"{report.genus} -> {report.difficulty_class} "
            f"(tedium {report.tedium_score}){flags}")
    _emit(args, {"command": "classify", **report.to_json_obj()}, text)
    return EXIT_OK


def cmd_expand(args) -> int:
    if args.terms < 1:
        raise CatalogError("--terms must be at least 1")
    if args.family:
        catalog = _load_catalog(args)
        quotient = catalog.family(args.family).generator
    else:
        quotient = _parse_eta_spec(args.eta)
    level = args.level or quotient.level
    if args.at_cusp == "zero":
        lead24 = 24 * order_at_cusp(quotient, level, 1)
        trunc24 = 24 * args.terms
        if lead24.denominator == 1:
            trunc24 += int(lead24)
        scale, series = expand_at_zero(quotient, level, trunc24)
        report = {"command": "expand", "cusp": "zero",
                  "quotient": quotient.to_json_obj(), "level": level,
                  "scale": str(scale), "series": series.to_json_obj()}
        text = f"scale {scale}\n{series.format(max_terms=args.terms)}"
    else:
        trunc24 = quotient.degree24 + 24 * args.terms
        series = expand_at_infinity(quotient, trunc24)
        report = {"command": "expand", "cusp": "infinity",
                  "quotient": quotient.to_json_obj(),
                  "series": series.to_json_obj()}
        text = series.format(max_terms=args.terms)
    _emit(args, report, text)
    return EXIT_OK


def _verify_chunk(prime: int, pairs: list[tuple[int, int]]) -> tuple:
    count = 0
    min_val = None
    witness = None
    for n, c in pairs:
        count += 1
        if c == 0:
            continue
        v = 0
        while c % prime == 0:
            c //= prime
            v += 1
        if min_val is None or v < min_val:
            min_val = v
            witness = n
    return count, min_val, witness


def cmd_verify(args) -> int:
    catalog = _load_catalog(args)
    spec = catalog.family(args.family)
    if args.jobs > 1:
        step = spec.schedule.get(args.alpha)
        if step is None:
            raise CatalogError(
                f"family {spec.name}: no schedule entry for depth {args.alpha}")
        beta = args.beta if args.beta is not None else step.beta
        mod = spec.prime ** step.modulus_exponent
        r = (pow(spec.lam, -1, mod) * spec.target_residue) % mod
        series = coefficient_series(spec, args.nmax)
        ns = list(range(r, args.nmax + 1, mod))
        pairs = [(n, series.coeff_q(n)) for n in ns]
        chunks = [pairs[i::args.jobs] for i in range(args.jobs)]
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            parts = list(pool.map(_verify_chunk, [spec.prime] * len(chunks),
                                  chunks))
        count = sum(p[0] for p in parts)
        mins = [(p[1], p[2]) for p in parts if p[1] is not None]
        min_val, witness = min(mins) if mins else (None, None)
        passed = min_val is None or min_val >= beta
        counterexample = None
        if not passed:
            counterexample = {"n": witness,
                              "coefficient": str(series.coeff_q(witness)),
                              "valuation": min_val}
        report_obj = {
            "family": spec.name, "alpha": args.alpha,
            "modulus_exponent": step.modulus_exponent, "beta": beta,
            "n_max": args.nmax, "qualifying_count": count,
            "min_valuation": min_val, "passed": passed,
            "counterexample": counterexample,
        }
    else:
        rep = verify_congruence(spec, args.alpha, args.nmax,
                                beta_override=args.beta)
        report_obj = rep.to_json_obj()
        passed = rep.passed
    min_s = report_obj["min_valuation"]
    min_s = "infinity" if min_s is None else str(min_s)
    text = (f"family {report_obj['family']}, depth {report_obj['alpha']} "
            f"(modulus {spec.prime}^{report_obj['modulus_exponent']}): "
            f"{report_obj['qualifying_count']} qualifying n <= "
            f"{report_obj['n_max']}, min {spec.prime}-adic valuation {min_s}, "
            f"demanded {report_obj['beta']}: "
            f"{'PASS' if passed else 'FAIL'}")
    if report_obj["counterexample"]:
        ce = report_obj["counterexample"]
        text += (f"\n  counterexample: a({ce['n']}) = {ce['coefficient']} "
                 f"has valuation {ce['valuation']}")
    _emit(args, {"command": "verify", **report_obj}, text)
    return EXIT_OK if passed else EXIT_MATH_FAIL


def _reduce_target(args, catalog, basis_entry, trunc24):
    """Build (chart series, cusp orders or None, prime or None) for --target."""
    target = args.target
    if target.startswith("family:"):
        try:
            _, name, label = target.split(":")
            if not label.startswith("L"):
                raise ValueError
            depth = int(label[1:])
        except ValueError:
            raise CatalogError(
                f"bad family target {target!r}: want family:NAME:L<depth>"
            ) from None
        spec = catalog.family(name)
        chart, orders = certified_identity_chart(spec, depth, trunc24 // 24)
        return chart, orders, spec.prime
    if target.startswith("eta:"):
        quotient = _parse_eta_spec(target[4:])
        level = basis_entry.level
        if level is None:
            raise CatalogError(
                "eta targets need a basis with a level (orders live on a curve)")
        scale, series = expand_at_zero(quotient, level, trunc24)
        return series.scaled(scale), cusp_order_vector(quotient, level), None
    if target.startswith("poly:"):
        try:
            coeffs = [Fraction(c) for c in target[5:].split(",")]
        except ValueError:
            raise CatalogError(
                f"bad poly target {target!r}: want poly:c0,c1,...") from None
        basis = basis_entry.build(trunc24)
        acc = QSeries.zero(trunc24)
        for m, c in enumerate(coeffs):
            if c:
                acc = acc + basis.monomial(0, m).scaled(c)
        return acc, None, None
    if target.startswith("pole:"):
        try:
            order = int(target[5:])
        except ValueError:
            raise CatalogError(f"bad pole target {target!r}") from None
        return QSeries.monomial(-24 * order, trunc24), None, None
    raise CatalogError(
        f"unknown target {target!r}: want family:NAME:L<d>, eta:SPEC, "
        f"poly:c0,c1,..., or pole:P")


def cmd_reduce(args) -> int:
    catalog = _load_catalog(args)
    basis_entry = catalog.basis(args.basis)
    trunc24 = 24 * args.terms
    chart, orders, prime = _reduce_target(args, catalog, basis_entry, trunc24)
    basis = basis_entry.build(trunc24)
    if args.localize or (orders is not None and basis.z is not None):
        if orders is None:
            raise CatalogError(
                "--localize needs a target with known cusp orders")
        rep = localize_reduce(chart, basis, orders, guard=args.guard)
    else:
        rep = reduce_module(chart, basis, guard=args.guard)
    report = {"command": "reduce", "basis": basis_entry.name,
              "target": args.target, **rep.to_json_obj()}
    lines = [f"target reduced over basis {basis_entry.name!r} "
             f"(localizer exponent {rep.localizer_exponent})"]
    for (k, m), c in sorted(rep.coeffs.items()):
        mon = f"x^{m}" if k == 0 else f"y_{k} x^{m}"
        lines.append(f"  {mon}: {c}")
    if not rep.coeffs:
        lines.append("  (zero)")
    prime = args.prime or prime
    if prime:
        tab = valuation_table(rep, prime)
        report["valuations"] = tab.to_json_obj()
        lines.append(f"min {prime}-adic valuation over coefficients: "
                     f"{tab.min_valuation()}")
    _emit(args, report, "\n".join(lines))
    return EXIT_OK


def _search_shard(packed) -> list:
    N, text, bound, first = packed
    cons = parse_constraints(text) if text else []
    return search_eta_quotients(N, cons, bound, fix_first=first)


def cmd_find_eta(args) -> int:
    constraints = parse_constraints(args.constraints) if args.constraints else []
    if args.jobs > 1:
        shards = [(args.level, args.constraints or "", args.bound, v)
                  for v in range(-args.bound, args.bound + 1)]
        found = []
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            for part in pool.map(_search_shard, shards):
                found.extend(part)
        found.sort(key=lambda f: (sum(abs(r) for _, r in f.exponents),
                                  f.exponents))
    else:
        found = search_eta_quotients(args.level, constraints, args.bound)
    entries = []
    lines = [f"{len(found)} quotient(s) on Gamma_0({args.level}) with "
             f"|r| <= {args.bound}"
             + (f" subject to {args.constraints}" if args.constraints else "")]
    for f in found:
        vec = cusp_order_vector(f, args.level)
        entries.append({"quotient": f.to_json_obj(),
                        "orders": vec.to_json_obj()["orders"]})
        orders = ", ".join(f"ord[c={c}]={o}" for c, o in vec.orders)
        lines.append(f"  {f}   {orders}")
    _emit(args, {"command": "find-eta", "level": args.level,
                 "bound": args.bound, "results": entries}, "\n".join(lines))
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing and dispatch
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CatalogError(message)


def build_parser() -> argparse.ArgumentParser:
    # global flags accepted both before and after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--catalog", default=argparse.SUPPRESS,
                        help=f"catalog path (or ${CATALOG_ENV})")
    common.add_argument("--json", action="store_true",
                        default=argparse.SUPPRESS,
                        help="emit the JSON report instead of text")
    common.add_argument("--jobs", type=int, default=argparse.SUPPRESS,
                        help="worker processes for verification and search")
    parser = _Parser(
        prog="cusp-ledger",
        parents=[common],
        description="Exact workbench for modular congruence families: "
                    "curve topology, eta quotients, tower slices, reductions.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_parser(name, **kwargs):
        return sub.add_parser(name, parents=[common], **kwargs)

    p = add_parser("profile", help="topological profile of X_0(N)")
    p.add_argument("level", type=int)
    p.set_defaults(func=cmd_profile)

    p = add_parser("classify", help="difficulty class from the cusp count")
    p.add_argument("--level", type=int)
    p.add_argument("--prime", type=int)
    p.add_argument("--family")
    p.set_defaults(func=cmd_classify)

    p = add_parser("expand", help="q-expansion of an eta quotient")
    p.add_argument("--eta", help='exponent list like "5:6,1:-6"')
    p.add_argument("--family", help="expand a catalog family's generator")
    p.add_argument("--terms", type=int, default=12)
    p.add_argument("--at-cusp", choices=("infinity", "zero"),
                   default="infinity")
    p.add_argument("--level", type=int,
                   help="curve level for cusp-zero expansions")
    p.set_defaults(func=cmd_expand)

    p = add_parser("verify", help="check a congruence family directly")
    p.add_argument("--family", required=True)
    p.add_argument("--alpha", type=int, required=True)
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--beta", type=int,
                   help="override the demanded divisibility exponent")
    p.set_defaults(func=cmd_verify)

    p = add_parser("reduce", help="express a target over a module basis")
    p.add_argument("--target", required=True,
                   help="family:NAME:L<d> | eta:SPEC | poly:c0,c1,... | pole:P")
    p.add_argument("--basis", required=True, help="catalog basis name")
    p.add_argument("--localize", action="store_true")
    p.add_argument("--terms", type=int, default=40,
                   help="working truncation in integer q-terms")
    p.add_argument("--guard", type=int, default=10)
    p.add_argument("--prime", type=int,
                   help="prime for the valuation table")
    p.set_defaults(func=cmd_reduce)

    p = add_parser("find-eta", help="search for eta quotients by orders")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--constraints", help='like "1==-1,5>=1"')
    p.add_argument("--bound", type=int, required=True)
    p.set_defaults(func=cmd_find_eta)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args.catalog = getattr(args, "catalog", None)
        args.json = getattr(args, "json", False)
        args.jobs = getattr(args, "jobs", 1)
        return args.func(args)
    except (GapError, ReductionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MATH_FAIL
    except InternalInconsistencyError as exc:
        print(f"internal inconsistency: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except CuspLedgerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
