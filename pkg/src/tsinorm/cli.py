"""Command-line front end.

One process, batch-friendly: every verb maps to one library operation,
reads inline literals or files, and prints deterministic plain text
(rationals as num/den) or JSON with ``--json``.  Exit codes: 0 success,
1 domain/config error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import analysis, families, norm_engine, ordinals
from .errors import ConfigError, DomainError, ParseError
from .norm_engine import SpaceSpec, Vector, format_rational

PROG = "tsinorm"


def _space_from_args(args) -> SpaceSpec:
    if getattr(args, "space", None):
        with open(args.space, "r", encoding="utf-8") as handle:
            return SpaceSpec.from_text(handle.read())
    if getattr(args, "space_text", None):
        return SpaceSpec.from_text(args.space_text)
    theta = getattr(args, "theta", None)
    if theta:
        family = getattr(args, "family_rule", None) or "schreier n"
        return SpaceSpec.from_text(f"theta = {theta}\nfamily = {family}\n")
    raise ConfigError("no space given; use --space, --space-text or --theta")


def _print_json(payload) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True))


def _contains_minus(family) -> bool:
    if isinstance(family, families.Minus):
        return True
    for attr in ("outer", "inner", "first", "second", "base", "removed",
                 "left", "right"):
        child = getattr(family, attr, None)
        if isinstance(child, families.Family) and _contains_minus(child):
            return True
    return False


def _maybe_fundamental_note(args, family, probe_bound=None) -> None:
    if args.json:
        return
    if families.has_limit_schreier(family):
        print(f"# {families.FUNDAMENTAL_SEQUENCE_NOTE}")
    if _contains_minus(family):
        bound = probe_bound if probe_bound is not None else "per-query default"
        print(f"# maximality probe bound: {bound}")


def _cmd_norm(args) -> int:
    sp = _space_from_args(args)
    x = Vector.from_text(args.vec)
    value, cert = norm_engine.norm(x, sp)
    with open(args.cert_out, "w", encoding="utf-8") as handle:
        handle.write(norm_engine.certificate_to_json(cert) + "\n")
    if args.json:
        _print_json({"value": format_rational(value), "certificate": args.cert_out})
    else:
        print(format_rational(value))
        print(f"certificate: {args.cert_out}")
    return 0


def _cmd_level_norm(args) -> int:
    sp = _space_from_args(args)
    value = norm_engine.level_norm(Vector.from_text(args.vec), sp, args.m)
    if args.json:
        _print_json({"value": format_rational(value), "m": args.m})
    else:
        print(format_rational(value))
    return 0


def _cmd_cert_verify(args) -> int:
    sp = _space_from_args(args)
    x = Vector.from_text(args.vec)
    with open(args.cert, "r", encoding="utf-8") as handle:
        cert = norm_engine.certificate_from_json(handle.read())
    valid, value = norm_engine.verify_certificate(cert, x, sp)
    if args.json:
        _print_json({"valid": valid, "value": format_rational(value)})
    else:
        print(f"{'valid' if valid else 'invalid'} value={format_rational(value)}")
    return 0 if valid else 1


def _cmd_distort(args) -> int:
    sp = _space_from_args(args)
    value = norm_engine.distortion_norm(Vector.from_text(args.vec), sp, args.n)
    if args.json:
        _print_json({"value": format_rational(value), "n": args.n})
    else:
        print(format_rational(value))
    return 0


def _cmd_member(args) -> int:
    family = families.parse_family(args.family)
    result = families.member(
        family, families.parse_set(args.set), probe_bound=args.probe_bound
    )
    _maybe_fundamental_note(
        args, family,
        args.probe_bound if args.probe_bound is not None
        else families.DEFAULT_PROBE_BOUND,
    )
    if args.json:
        _print_json({"member": result, "probe_bound": args.probe_bound})
    else:
        print("true" if result else "false")
    return 0


def _cmd_maximal(args) -> int:
    family = families.parse_family(args.family)
    result = families.is_maximal(
        family, families.parse_set(args.set), probe_bound=args.probe_bound
    )
    if not args.json and families.has_limit_schreier(family):
        print(f"# {families.FUNDAMENTAL_SEQUENCE_NOTE}")
    if args.json:
        _print_json({"maximal": result, "probe_bound": args.probe_bound})
    else:
        print("true" if result else "false")
        print(f"# probe bound: {args.probe_bound}")
    return 0


def _cmd_admissible(args) -> int:
    family = families.parse_family(args.family)
    sets = [families.parse_set(part) for part in args.sets.split(";")]
    result = families.is_admissible(family, sets)
    _maybe_fundamental_note(args, family)
    if args.json:
        _print_json({"admissible": result})
    else:
        print("true" if result else "false")
    return 0


def _cmd_enumerate(args) -> int:
    family = families.parse_family(args.family)
    members = families.enumerate_members(
        family, args.universe, probe_bound=args.probe_bound
    )
    _maybe_fundamental_note(
        args, family,
        args.probe_bound if args.probe_bound is not None else args.universe,
    )
    if args.json:
        _print_json({
            "count": len(members),
            "members": [list(s) for s in members],
        })
    else:
        for s in members:
            print(families.format_set(s))
        print(f"count {len(members)}")
    return 0


def _cmd_subset(args) -> int:
    family = families.parse_family(args.family)
    other = families.parse_family(args.inside)
    cex = families.subset_check(
        family, other, args.universe, probe_bound=args.probe_bound
    )
    _maybe_fundamental_note(
        args, family,
        args.probe_bound if args.probe_bound is not None else args.universe,
    )
    if args.json:
        _print_json({
            "holds": cex is None,
            "counterexample": None if cex is None else list(cex),
        })
    else:
        print("holds" if cex is None else f"counterexample {families.format_set(cex)}")
    return 0


def _cmd_index(args) -> int:
    family = families.parse_family(args.family)
    bound, exact = families.index_bound(family)
    _maybe_fundamental_note(args, family)
    if args.json:
        _print_json({
            "bound": ordinals.format_ordinal(bound),
            "exact": exact,
        })
    else:
        print(f"{ordinals.format_ordinal(bound)} ({'exact' if exact else 'bound'})")
    return 0


def _gamma_config(args) -> analysis.GammaConfig:
    return analysis.GammaConfig(
        theta_rule=norm_engine.parse_theta_rule(args.theta),
        seq_rule=analysis.parse_ordinal_rule(args.beta),
        horizon=args.horizon,
        mode=args.mode,
    )


def _cmd_gamma(args) -> int:
    result = analysis.gamma_ordinal(Fraction(args.eps), args.m, _gamma_config(args))
    if args.json:
        _print_json({
            "value": ordinals.format_ordinal(result.value),
            "certainty": result.certainty,
            "argmax": list(result.argmax) if result.argmax else None,
        })
    else:
        print(ordinals.format_ordinal(result.value))
        print(f"# certainty: {result.certainty}")
    return 0


def _cmd_dagger(args) -> int:
    betas = [ordinals.parse_ordinal(part) for part in args.betas.split(",")]
    report = analysis.dagger_probe(
        Fraction(args.eps), betas, args.horizon, _gamma_config(args),
        analysis.parse_ordinal_rule(args.ell),
    )
    if args.json:
        _print_json({
            "certainty": report.certainty,
            "rows": [
                {
                    "beta": ordinals.format_ordinal(row.beta),
                    "witness": row.witness,
                    "uncertified": list(row.uncertified),
                }
                for row in report.rows
            ],
        })
    else:
        for row in report.rows:
            witness = row.witness if row.witness is not None else "none"
            print(f"beta {ordinals.format_ordinal(row.beta)}: witness {witness}")
        print(f"# certainty: {report.certainty} (horizon {report.horizon})")
    return 0


def _cmd_diagnose(args) -> int:
    sp = _space_from_args(args)
    report = analysis.theta_diagnostics(sp, args.horizon)
    if args.json:
        _print_json({
            "certainty": report.certainty,
            "ratio_profile": [
                [m, format_rational(v)] for m, v in report.ratio_profile
            ],
            "ratio_verdict": report.ratio_verdict,
            "root_profile": [
                [n, format_rational(v)] for n, v in report.root_profile
            ],
            "root_width": format_rational(report.root_width),
            "submultiplicative": report.submultiplicative,
            "submultiplicative_equality": report.submultiplicative_equality,
            "violation": list(report.violation) if report.violation else None,
        })
    else:
        for m, v in report.ratio_profile:
            print(f"ratio m={m}: {format_rational(v)}")
        print(f"ratio verdict: {report.ratio_verdict} ({report.certainty})")
        last = report.root_profile[-1]
        print(f"root profile n={last[0]}: {format_rational(last[1])} "
              f"(width <= {format_rational(report.root_width)})")
        if report.submultiplicative:
            tail = " with equality" if report.submultiplicative_equality else ""
            print(f"submultiplicative: yes{tail}")
        else:
            m, n = report.violation
            print(f"submultiplicative: no, violated at (m,n)=({m},{n})")
    return 0


def _cmd_tame(args) -> int:
    rule = norm_engine.parse_family_rule(args.families)
    report = analysis.tame_check(rule, args.n0, args.n_max, args.universe)
    if args.json:
        _print_json({
            "passed": report.passed,
            "rows": [
                {
                    "clause": row.clause,
                    "n": row.n,
                    "passed": row.passed,
                    "counterexample":
                        None if row.counterexample is None
                        else list(row.counterexample),
                }
                for row in report.rows
            ],
        })
    else:
        if report.passed:
            print("pass")
        else:
            row = report.failure
            print(f"fail clause {row.clause} at n={row.n} "
                  f"counterexample {families.format_set(row.counterexample)}")
        for row in report.rows:
            status = "pass" if row.passed else (
                f"fail {families.format_set(row.counterexample)}")
            print(f"# clause {row.clause} n={row.n}: {status}")
    return 0


def _cmd_spread(args) -> int:
    sp = _space_from_args(args)
    family = families.parse_family(args.family)
    if args.blocks:
        blocks = [Vector.from_text(part) for part in args.blocks.split(";")]
    else:
        lo, hi = _parse_window(args.window)
        blocks = [Vector.basis(k) for k in range(1, hi + 1)]
    coeffs = (
        [Fraction(part) for part in args.coeffs.split(",")]
        if args.coeffs else [Fraction(1)] * len(blocks)
    )
    value = analysis.spreading_constant(
        blocks, family, _parse_window(args.window), coeffs, sp
    )
    if args.json:
        _print_json({"constant": format_rational(value)})
    else:
        print(format_rational(value))
    return 0


def _cmd_lemma1(args) -> int:
    sp = _space_from_args(args)
    coeffs = [Fraction(part) for part in args.coeffs.split(",")] if args.coeffs else []
    indices = [int(part) for part in args.indices.split(",")]
    if len(indices) != len(coeffs) + 1:
        raise DomainError("need exactly one more index than coefficients")
    y = Vector.from_pairs(zip(indices[:-1], coeffs))
    x = Vector.from_pairs(zip(indices[1:], coeffs))
    universe = _parse_window(args.universe) if args.universe else (
        (indices[0], indices[-1]) if indices else (1, 1)
    )
    witness = analysis.shift_witness(x, y, args.m, sp, universe)
    if args.json:
        _print_json({
            "witness": None if witness is None else [list(e) for e in witness],
        })
    else:
        if witness is None:
            print("none")
        else:
            print(" ".join(families.format_set(e) for e in witness))
    return 0


def _cmd_ssum(args) -> int:
    sp = _space_from_args(args)
    schedule = [int(part) for part in args.schedule.split(",")]
    report = analysis.schreier_sum_bound(Vector.from_text(args.vec), sp, schedule)
    if args.json:
        _print_json({
            "holds": report.holds,
            "norm": format_rational(report.norm_value),
            "bound": format_rational(report.bound),
            "pi": [format_rational(v) for v in report.pi],
            "rho": [format_rational(v) for v in report.rho],
        })
    else:
        print("holds" if report.holds else "VIOLATED")
        print(f"norm {format_rational(report.norm_value)} "
              f"<= bound {format_rational(report.bound)}")
        print("pi " + " ".join(format_rational(v) for v in report.pi))
        print("rho " + " ".join(format_rational(v) for v in report.rho))
    return 0


def _parse_window(text: str) -> tuple[int, int]:
    if ".." not in text:
        raise ParseError(f"bad interval {text!r}; expected lo..hi")
    lo, _, hi = text.partition("..")
    try:
        return int(lo), int(hi)
    except ValueError:
        raise ParseError(f"bad interval {text!r}") from None


def _add_space_options(sub, with_family_rule=False):
    sub.add_argument("--space", help="path to a space spec file")
    sub.add_argument("--space-text", help="inline space spec text")
    sub.add_argument("--theta", help="inline theta rule, e.g. 'geometric 1/2'")
    if with_family_rule:
        sub.add_argument("--family-rule", dest="family_rule",
                         help="inline family rule for --theta (default schreier n)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=PROG,
        description="Exact mixed-Tsirelson norms, regular families and "
                    "desk-scale analytic probes.",
    )
    parser.add_argument("--json", action="store_true", help="JSON output")
    commands = parser.add_subparsers(dest="verb", required=True)

    sub = commands.add_parser("norm", help="norm with certificate")
    _add_space_options(sub, with_family_rule=True)
    sub.add_argument("--vec", required=True, help="vector, e.g. '2:1 3:1 5:3/2'")
    sub.add_argument("--cert-out", default="certificate.json")
    sub.set_defaults(handler=_cmd_norm)

    sub = commands.add_parser("level-norm", help="m-th iterated norm")
    _add_space_options(sub, with_family_rule=True)
    sub.add_argument("--vec", required=True)
    sub.add_argument("--m", type=int, required=True)
    sub.set_defaults(handler=_cmd_level_norm)

    sub = commands.add_parser("cert-verify", help="verify a certificate")
    _add_space_options(sub, with_family_rule=True)
    sub.add_argument("--vec", required=True)
    sub.add_argument("--cert", required=True, help="certificate JSON path")
    sub.set_defaults(handler=_cmd_cert_verify)

    sub = commands.add_parser("distort", help="level-n distortion norm")
    _add_space_options(sub, with_family_rule=True)
    sub.add_argument("--vec", required=True)
    sub.add_argument("--n", type=int, required=True)
    sub.set_defaults(handler=_cmd_distort)

    sub = commands.add_parser("member", help="family membership")
    sub.add_argument("--family", required=True)
    sub.add_argument("--set", required=True, help="e.g. '3,5,9'")
    sub.add_argument("--probe-bound", type=int, default=None)
    sub.set_defaults(handler=_cmd_member)

    sub = commands.add_parser("maximal", help="maximality within a probe bound")
    sub.add_argument("--family", required=True)
    sub.add_argument("--set", required=True)
    sub.add_argument("--probe-bound", type=int,
                     default=families.DEFAULT_PROBE_BOUND)
    sub.set_defaults(handler=_cmd_maximal)

    sub = commands.add_parser("admissible", help="sequence admissibility")
    sub.add_argument("--family", required=True)
    sub.add_argument("--sets", required=True, help="e.g. '3,4;7'")
    sub.set_defaults(handler=_cmd_admissible)

    sub = commands.add_parser("enumerate", help="members within {1..N}")
    sub.add_argument("--family", required=True)
    sub.add_argument("--universe", type=int, required=True)
    sub.add_argument("--probe-bound", type=int, default=None)
    sub.set_defaults(handler=_cmd_enumerate)

    sub = commands.add_parser("subset", help="truncated inclusion check")
    sub.add_argument("--family", required=True)
    sub.add_argument("--inside", required=True, help="candidate superfamily")
    sub.add_argument("--universe", type=int, required=True)
    sub.add_argument("--probe-bound", type=int, default=None)
    sub.set_defaults(handler=_cmd_subset)

    sub = commands.add_parser("index", help="symbolic index bound")
    sub.add_argument("--family", required=True)
    sub.set_defaults(handler=_cmd_index)

    sub = commands.add_parser("gamma", help="gamma(eps, m) search")
    sub.add_argument("--eps", required=True)
    sub.add_argument("--m", type=int, required=True)
    sub.add_argument("--theta", required=True)
    sub.add_argument("--beta", required=True, help="ordinal sequence rule, e.g. n")
    sub.add_argument("--mode", choices=analysis.GAMMA_MODES,
                     default="ordinal_sum")
    sub.add_argument("--horizon", type=int, default=24)
    sub.set_defaults(handler=_cmd_gamma)

    sub = commands.add_parser("dagger", help="dagger-condition probe")
    sub.add_argument("--eps", required=True)
    sub.add_argument("--theta", required=True)
    sub.add_argument("--beta", required=True)
    sub.add_argument("--ell", required=True,
                     help="rule for the target head exponent, e.g. n")
    sub.add_argument("--betas", required=True,
                     help="comma-separated ordinals to probe")
    sub.add_argument("--mode", choices=analysis.GAMMA_MODES,
                     default="ordinal_sum")
    sub.add_argument("--horizon", type=int, default=30)
    sub.set_defaults(handler=_cmd_dagger)

    sub = commands.add_parser("diagnose", help="theta-sequence diagnostics")
    _add_space_options(sub, with_family_rule=True)
    sub.add_argument("--horizon", type=int, default=50)
    sub.set_defaults(handler=_cmd_diagnose)

    sub = commands.add_parser("tame", help="tameness check")
    sub.add_argument("--families", required=True,
                     help="family rule, e.g. 'schreier n'")
    sub.add_argument("--n0", type=int, required=True)
    sub.add_argument("--n-max", type=int, required=True)
    sub.add_argument("--universe", type=int, required=True)
    sub.set_defaults(handler=_cmd_tame)

    sub = commands.add_parser("spread", help="spreading-model constant")
    _add_space_options(sub, with_family_rule=True)
    sub.add_argument("--family", required=True)
    sub.add_argument("--window", required=True, help="e.g. 2..6")
    sub.add_argument("--blocks", help="semicolon-separated vectors")
    sub.add_argument("--coeffs", help="comma-separated rationals")
    sub.set_defaults(handler=_cmd_spread)

    sub = commands.add_parser("lemma1", help="shift-domination witness")
    _add_space_options(sub, with_family_rule=True)
    sub.add_argument("--coeffs", help="comma-separated rationals")
    sub.add_argument("--indices", required=True,
                     help="increasing index sequence, e.g. '2,3,4'")
    sub.add_argument("--m", type=int, required=True)
    sub.add_argument("--universe", help="e.g. 2..4")
    sub.set_defaults(handler=_cmd_lemma1)

    sub = commands.add_parser("ssum", help="layered Schreier-sum bound")
    _add_space_options(sub, with_family_rule=True)
    sub.add_argument("--vec", required=True)
    sub.add_argument("--schedule", required=True, help="e.g. '1,3,6,10'")
    sub.set_defaults(handler=_cmd_ssum)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.handler(args)
    except (ParseError, ConfigError, DomainError, OSError) as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
