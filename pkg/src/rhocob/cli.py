"""``rhocob`` command line.

Exit codes: 0 for a conclusive verdict or valid certificate, 2 for an
inconclusive verdict or a table with violations, 1 for input errors.
"""

from __future__ import annotations

import argparse
import re
import sys

from . import serialize
from .dfun import oracle_verify_proposition
from .errors import CapacityError, RhocobError
from .exact import format_rational
from .linking import (
    LinkingForm,
    diagonal_form,
    is_nondegenerate,
    linking_from_presentation,
    quadratic_refinement,
    rho_surgery,
)
from .metab import enumerate_metabolizers, metabolizer_report
from .obstruct import (
    check_independence,
    check_knot_family,
    check_knot_sum,
    check_surgery_infinite_order,
    square_order_test,
    validate_d_axioms,
)

EXIT_OK, EXIT_INPUT, EXIT_INCONCLUSIVE = 0, 1, 2

VERBS = (
    "rho-surgery",
    "analyze-presentation",
    "enumerate-metabolizers",
    "verify-proposition",
    "check-surgery",
    "check-independence",
    "check-knots",
    "validate-dtable",
)

_SUM_FORM = re.compile(r"^sum(\d+)-unit(-?\d+)$")
_DIAG_FORM = re.compile(r"^diag:(-?\d+(?:,-?\d+)*)$")


class InputError(RhocobError):
    pass


def parse_form_spec(spec: str, p: int, n: int) -> LinkingForm:
    """``sum4-unit1`` is ``⊕⁴ λ_1``; ``diag:1,26`` is ``λ_1 ⊕ λ_26``, all on ``Z/p^n``."""
    m = _SUM_FORM.match(spec)
    if m:
        units = [int(m.group(2))] * int(m.group(1))
    else:
        m = _DIAG_FORM.match(spec)
        if not m:
            raise InputError(f"--form: cannot parse {spec!r}; use sumK-unitU or diag:u1,u2,...")
        units = [int(u) for u in m.group(1).split(",")]
    return diagonal_form([(p, n, u) for u in units])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rhocob", description="Rational homology cobordism obstructions.")
    parser.add_argument("verb", choices=VERBS)
    parser.add_argument("--n", type=int)
    parser.add_argument("--p", type=int)
    parser.add_argument("--m", type=int)
    parser.add_argument("--form")
    parser.add_argument("--file")
    parser.add_argument("--format", choices=("text", "json"), default="text")
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--seed", type=int, help="accepted for uniformity; the library is deterministic")
    return parser


def _need(args, *names):
    missing = [f"--{name}" for name in names if getattr(args, name) is None]
    if missing:
        raise InputError(f"{args.verb} requires {', '.join(missing)}")


def _form_from_args(args) -> LinkingForm:
    if args.file:
        return serialize.form_from_json(serialize.load(args.file))
    _need(args, "p", "n", "form")
    return parse_form_spec(args.form, args.p, args.n)


def _verdict_text(v) -> list[str]:
    lines = [v.conclusion.replace("_", " ")]
    lines += [f"  {r}" for r in v.reasons]
    lines += [f"  [{'x' if ok else ' '}] {name}" for name, ok in v.checklist]
    return lines


def cmd_rho_surgery(args):
    _need(args, "n")
    rho = rho_surgery(args.n)
    values = {str(x): format_rational(rho(x).value) for x in range(abs(args.n))}
    report = {"n": args.n, "group": serialize.group_to_json(rho.group), "rho0": format_rational(rho.rho0.value), "rho": values}
    text = [f"rho on S3_{args.n}(K), H1 = {rho.group}"] + [f"  t_{x}: {v}" for x, v in values.items()]
    return EXIT_OK, report, text


def cmd_analyze_presentation(args):
    _need(args, "file")
    obj = serialize.load(args.file)
    matrix = obj.get("matrix") if isinstance(obj, dict) else obj
    G, form = linking_from_presentation(serialize.int_matrix(matrix, "matrix"))
    report = {
        "group": serialize.group_to_json(G),
        "order": G.order,
        "order_is_square": square_order_test(G),
        "form": serialize.form_to_json(form),
        "nondegenerate": is_nondegenerate(form),
    }
    if G.order % 2:
        q = quadratic_refinement(form)
        report["refinement"] = {serialize.element_label(x): format_rational(v.value) for x, v in sorted(q.values().items())}
    text = [f"H1 = {G} (order {G.order})", f"linking form: {form}"]
    if "refinement" in report:
        text.append("refinement: " + ", ".join(f"q({k}) = {v}" for k, v in report["refinement"].items()))
    return EXIT_OK, report, text


def cmd_enumerate_metabolizers(args):
    form = _form_from_args(args)
    G = form.group
    metabolizers = enumerate_metabolizers(form)
    report = {
        "group": serialize.group_to_json(G),
        "order_is_square": square_order_test(G),
        "metabolizers": [metabolizer_report(M) for M in metabolizers],
    }
    text = [f"{len(metabolizers)} metabolizer(s) of {form}"]
    if not square_order_test(G):
        text.append(f"  |G| = {G.order} is not a square")
    text += [f"  {M.subgroup}" for M in metabolizers]
    return EXIT_OK, report, text


def cmd_verify_proposition(args):
    _need(args, "p", "n", "m")
    if args.file:
        form = serialize.form_from_json(serialize.load(args.file))
    else:
        _need(args, "form")
        form = parse_form_spec(args.form, args.p, args.n)
    cert = oracle_verify_proposition(args.p, args.n, args.m, form, with_compatibility=True, jobs=args.jobs)
    report = {
        "p": cert.p,
        "n": cert.n,
        "m": cert.m,
        "unknowns": cert.unknowns,
        "conclusion_labels": cert.conclusion_labels,
        "holds": cert.holds,
        "vacuous": cert.vacuous,
        "compatibility_coset_empty": cert.compatibility_coset_empty,
        "metabolizers": [
            {
                "generators": e.generators,
                "constraint_rank": e.constraint_rank,
                "nullity": e.nullity,
                "forced_zero": e.forced_zero,
                "contained": e.contained,
                "compatible_solution_exists": e.compatible_solution_exists,
            }
            for e in cert.entries
        ],
    }
    text = [f"proposition {'holds' if cert.holds else 'FAILS'} for p={cert.p}, n={cert.n}, m={cert.m}"]
    if cert.vacuous:
        text.append("  no metabolizers: the statement holds vacuously")
    for e in cert.entries:
        text.append(
            f"  M = <{', '.join(map(str, e.generators))}>: rank {e.constraint_rank}, "
            f"forced zero {e.forced_zero}, contained {e.contained}"
        )
    return (EXIT_OK if cert.holds else EXIT_INCONCLUSIVE), report, text


def _verdict_exit(v):
    return EXIT_OK if v.conclusive else EXIT_INCONCLUSIVE


def cmd_check_surgery(args):
    _need(args, "n")
    v = check_surgery_infinite_order(args.n)
    rho0 = rho_surgery(args.n).rho0
    report = serialize.verdict_to_json(v) | {"n": args.n, "rho0": format_rational(rho0.value)}
    label = "infinite order" if v.conclusive else "inconclusive"
    text = [f"S3_{args.n}(K): {label}, ρ(t₀)={format_rational(rho0.value)}"] + _verdict_text(v)[1:]
    return _verdict_exit(v), report, text


def _certificate_output(cert):
    report = serialize.verdict_to_json(cert.verdict) | {
        "assignment": [{"manifold": name, "p": p, "n": n} for name, p, n in cert.assignment]
    }
    return _verdict_exit(cert.verdict), report, _verdict_text(cert.verdict)


def cmd_check_independence(args):
    _need(args, "file")
    family = serialize.family_from_json(serialize.load(args.file))
    return _certificate_output(check_independence(family))


def cmd_check_knots(args):
    """Independence of the family, or with ``--m`` the sum ``mK # J`` of exactly two knots."""
    _need(args, "file")
    knots = serialize.knots_from_json(serialize.load(args.file))
    if args.m is None:
        return _certificate_output(check_knot_family(knots))
    if len(knots) != 2:
        raise InputError("check-knots --m expects exactly two knots K and J")
    v = check_knot_sum(knots[0], knots[1], args.m, args.p)
    return _verdict_exit(v), serialize.verdict_to_json(v), _verdict_text(v)


def cmd_validate_dtable(args):
    _need(args, "file")
    Y = serialize.descriptor_from_json(serialize.load(args.file))
    report = validate_d_axioms(Y)
    out = {"name": Y.name, "valid": report.valid, "violations": list(report.violations)}
    text = [f"{Y.name}: d-table {'valid' if report.valid else 'INVALID'}"] + [f"  {v}" for v in report.violations]
    return (EXIT_OK if report.valid else EXIT_INCONCLUSIVE), out, text


COMMANDS = {
    "rho-surgery": cmd_rho_surgery,
    "analyze-presentation": cmd_analyze_presentation,
    "enumerate-metabolizers": cmd_enumerate_metabolizers,
    "verify-proposition": cmd_verify_proposition,
    "check-surgery": cmd_check_surgery,
    "check-independence": cmd_check_independence,
    "check-knots": cmd_check_knots,
    "validate-dtable": cmd_validate_dtable,
}


def run(argv) -> tuple[int, str]:
    """Execute one command; returns the exit code and the rendered report."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return (EXIT_INPUT if exc.code else EXIT_OK), ""
    try:
        code, report, text = COMMANDS[args.verb](args)
    except CapacityError as exc:
        return EXIT_INPUT, f"error: {exc}\n"
    except (RhocobError, ValueError) as exc:
        return EXIT_INPUT, f"error: {exc}\n"
    if args.format == "json":
        return code, serialize.dumps(report | {"command": args.verb})
    return code, "\n".join(text) + "\n"


def main(argv=None) -> int:
    code, out = run(sys.argv[1:] if argv is None else argv)
    stream = sys.stderr if code == EXIT_INPUT else sys.stdout
    stream.write(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
