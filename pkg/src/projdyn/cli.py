"""Command-line interface: ``projdyn <verb> [options]``.

Every verb prints one JSON report.  Exit codes: 0 success, 2 bad input,
3 budget exhausted, 4 failed scenario assertion.
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

import jsonschema

from . import __version__, builders, cohom, spectral
from .fiber import fiber_count_estimate
from .parser import PolySyntaxError, parse_poly
from .poly import BudgetExceeded, format_poly
from .projmap import (
    Budget,
    RationalMapPk,
    collapses_into_indeterminacy,
    compose,
    default_term_budget,
    is_one_stable_upto,
    iterate_degrees,
)
from .scenarios import Scenario, ScenarioError, resolve_scenario_path, run_scenario
from .schemas import validate

DEFAULT_SEED = 0

EXIT_OK, EXIT_INPUT, EXIT_BUDGET, EXIT_ASSERT = 0, 2, 3, 4
_STATUS = {EXIT_OK: "ok", EXIT_INPUT: "input_error", EXIT_BUDGET: "budget_exhausted", EXIT_ASSERT: "assertion_failed"}


class InputError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        super().__init__(message)
        self.line, self.column = line, column


# -- input helpers -----------------------------------------------------------------


def _load_json(path: str, what: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {what} file {path!r}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None


def _params(text: str) -> dict:
    out = {}
    for item in filter(None, text.split(",")):
        key, sep, value = item.partition("=")
        if not sep:
            raise InputError(f"builder parameter {item!r} must look like name=value")
        out[key.strip()] = Fraction(value.strip())
    return out


def load_map(ref: str) -> tuple[RationalMapPk, dict]:
    """A map from a JSON file, or a builtin ``name`` / ``name:key=value,...``."""
    if Path(ref).is_file():
        data = _load_json(ref, "map")
        if isinstance(data, dict) and "builder" in data:
            name, params = data["builder"], data.get("params", {})
            return _build(name, params), {"builder": name, "params": {k: str(v) for k, v in params.items()}}
        try:
            validate(data, "map")
        except jsonschema.ValidationError as exc:
            raise InputError(f"{ref}: {exc.message}") from None
        try:
            return RationalMapPk.from_json(data), {"file": ref, "map": data}
        except PolySyntaxError as exc:
            raise InputError(f"{ref}: {exc}", exc.line, exc.column) from None
    name, _, rest = ref.partition(":")
    stem = name[: -len(".json")] if name.endswith(".json") else name
    if stem not in builders.BUILDERS or stem == "monomial":
        raise InputError(f"{ref!r} is neither a map file nor a builtin map ({', '.join(sorted(builders.BUILDERS))})")
    params = _params(rest)
    return _build(stem, params), {"builder": stem, "params": {k: str(v) for k, v in params.items()}}


def _build(name: str, params: dict) -> RationalMapPk:
    try:
        if name == "identity":
            return builders.BUILDERS["identity"](int(params.get("k", 2)))
        return builders.build(name, **params)
    except TypeError as exc:
        raise InputError(f"bad parameters for {name}: {exc}") from None


def _matrix(text: str) -> list[list[int]]:
    data = _load_json(text, "matrix") if Path(text).is_file() else None
    if data is None:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"matrix: invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
    if isinstance(data, list):
        data = {"rows": data}
    try:
        validate(data, "matrix")
        return spectral.as_int_matrix(data["rows"])
    except (jsonschema.ValidationError, ValueError) as exc:
        raise InputError(f"matrix: {getattr(exc, 'message', exc)}") from None


def _dv(text: str) -> cohom.DegreeVector:
    try:
        return cohom.DegreeVector(tuple(int(x) for x in text.split(",")))
    except ValueError as exc:
        raise InputError(f"degree vector {text!r}: {exc}") from None


def _eps(text: str) -> Fraction:
    try:
        eps = Fraction(text)
    except ValueError:
        raise InputError(f"eps {text!r} is not a number") from None
    if eps <= 0:
        raise InputError("eps must be positive")
    return eps


# -- verbs ------------------------------------------------------------------------------
# each returns (exit code, inputs echo, result)


def cmd_parse(args, budget):
    if args.coords:
        names = args.vars.split(",") if args.vars else None
        f = RationalMapPk.from_strings(args.coords, names)
        echo = {"coords": args.coords, "vars": names}
    else:
        f, echo = load_map(args.map)
    if args.emit_map:
        return EXIT_OK, echo, f.to_json(), True
    return EXIT_OK, echo, {"map": f.to_json(), "degree": f.degree}


def cmd_compose(args, budget):
    f, ef = load_map(args.f)
    g, eg = load_map(args.g)
    rep = compose(f, g, budget.max_terms)
    return EXIT_OK, {"f": ef, "g": eg}, rep.to_json()


def cmd_iterate(args, budget):
    f, ef = load_map(args.map)
    seq = iterate_degrees(f, args.N, budget)
    result = seq.to_json()
    result["degrees"] = seq.degrees
    if args.lambda1:
        result["lambda1"] = spectral.lambda1_from_degrees(seq, _eps(args.eps)).to_json()
    return (EXIT_OK if seq.complete else EXIT_BUDGET), {"map": ef, "N": args.N}, result


def cmd_stability(args, budget):
    f, ef = load_map(args.map)
    stable, first = is_one_stable_upto(f, args.N, budget)
    return EXIT_OK, {"map": ef, "N": args.N}, {"one_stable": stable, "first_drop": first}


def cmd_criteria(args, budget):
    f, ef = load_map(args.f)
    g, eg = load_map(args.g) if args.g else (f, ef)
    rep = compose(f, g, budget.max_terms)
    witness = None if rep.dropped_factor.is_constant else rep.dropped_factor
    checks = []
    for text in args.H or []:
        try:
            H = parse_poly(text, f.names)
        except PolySyntaxError as exc:
            raise InputError(f"--H {text!r}: {exc}", exc.line, exc.column) from None
        checks.append({"H": format_poly(H, f.names), "collapses_into_indeterminacy": collapses_into_indeterminacy(f, g, H)})
    result = {
        "convention": rep.convention,
        "degree_drop_witness": None if witness is None else format_poly(witness, f.names),
        "functorial_on_H2": witness is None,
        "hypersurface_checks": checks,
    }
    return EXIT_OK, {"f": ef, "g": eg, "H": args.H or []}, result


def cmd_cohomology(args, budget):
    echo = {}
    result = {}
    if args.pushpull:
        factors = tuple(int(x) for x in args.pushpull.split(","))
        echo["pushpull"] = list(factors)
        try:
            result["pushpull_check"] = cohom.pushpull_check(cohom.ProductRing(factors), exhaustive=True)
        except ValueError as exc:
            raise InputError(str(exc)) from None
    if args.f_dv:
        u = _dv(args.f_dv)
        v = _dv(args.g_dv) if args.g_dv else u
        if u.k != v.k:
            raise InputError("degree vectors have different lengths")
        echo.update({"f_dv": list(u.d), "g_dv": list(v.d)})
        gf, gg = cohom.graph_class(u), cohom.graph_class(v)
        comp = cohom.composed_correspondence_class(gf, gg)
        result["composed_class"] = comp.to_json()
        result["composed_degree_vector"] = list(cohom.degree_vector_of(comp).d)
        if args.true_dv:
            t = _dv(args.true_dv)
            if t.k != u.k:
                raise InputError("true degree vector has the wrong length")
            echo["true_dv"] = list(t.d)
            e = cohom.excess_class(gf, gg, t)
            w = cohom.nonfunctoriality_witness(e)
            result["excess_class"] = e.to_json()
            result["excess_components"] = [str(e.coeff((p, u.k - p))) for p in range(u.k + 1)]
            result["nonfunctoriality_witness"] = None if w is None else w.to_json()
    if not result:
        raise InputError("cohomology needs --pushpull and/or --f-dv")
    return EXIT_OK, echo, result


def cmd_charpoly(args, budget):
    if args.poly:
        try:
            p = spectral.CharPolynomial.parse(args.poly)
        except PolySyntaxError as exc:
            raise InputError(f"--poly: {exc}", exc.line, exc.column) from None
        echo = {"poly": args.poly}
    elif args.matrix:
        M = _matrix(args.matrix)
        p = spectral.char_poly(M)
        echo = {"matrix": M}
    else:
        raise InputError("charpoly needs --poly or --matrix")
    result = {"char_poly": str(p), "coeffs": [str(c) for c in p.coeffs]}
    if args.largest_real_root:
        echo["eps"] = args.eps
        try:
            result["largest_real_root"] = spectral.largest_real_root(p, _eps(args.eps)).to_json()
        except (spectral.NoRealRoot, ValueError) as exc:
            raise InputError(str(exc)) from None
    return EXIT_OK, echo, result


def cmd_monomial(args, budget):
    M = _matrix(args.matrix)
    eps = _eps(args.eps)
    try:
        lams = spectral.monomial_dynamical_degrees(M, eps)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    f = builders.monomial(M)
    result = {"map": f.to_json(), "dynamical_degrees": [e.to_json() for e in lams]}
    echo = {"matrix": M, "eps": args.eps}
    if args.N:
        seq = iterate_degrees(f, args.N, budget)
        result["degree_sequence"] = seq.to_json()
        if not seq.complete:
            return EXIT_BUDGET, echo, result
    return EXIT_OK, echo, result


def cmd_scenario(args, budget):
    try:
        path = resolve_scenario_path(args.file)
    except FileNotFoundError as exc:
        raise InputError(str(exc)) from None
    data = _load_json(str(path), "scenario")
    try:
        s = Scenario.from_json(data)
    except jsonschema.ValidationError as exc:
        raise InputError(f"{args.file}: {exc.message}") from None
    try:
        rep = run_scenario(s)
    except ScenarioError as exc:
        raise InputError(f"{args.file}: {exc}") from None
    code = EXIT_BUDGET if rep.budget_exhausted else (EXIT_OK if rep.passed else EXIT_ASSERT)
    return code, {"file": args.file, "scenario_seed": s.seed}, rep.to_json()


def cmd_probe(args, budget):
    f, ef = load_map(args.map)
    if f.dim != 2:
        raise InputError("probe works on maps of P^2 only")
    seeds = list(range(args.seed, args.seed + args.samples))
    est = fiber_count_estimate(f, seeds)
    return EXIT_OK, {"map": ef, "samples": args.samples}, est.to_json()


# -- argument parsing ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="projdyn", description="Exact tools for rational maps of projective space.")
    ap.add_argument("--version", action="version", version=f"projdyn {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"random seed (default {DEFAULT_SEED})")
    common.add_argument("--max-terms", type=int, default=None, help="term-product budget per multiplication")
    common.add_argument("--max-seconds", type=float, default=None, help="wall-clock budget for iteration")
    common.add_argument("--output", "-o", default=None, help="write the report here instead of standard output")
    sub = ap.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("parse", parents=[common], help="parse and canonicalize a map")
    p.add_argument("--map", help="map JSON file or builtin name[:param=value,...]")
    p.add_argument("--coords", nargs="+", help="coordinate polynomials")
    p.add_argument("--vars", help="comma-separated variable names for --coords")
    p.add_argument("--emit-map", action="store_true", help="print only the canonical map JSON")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("compose", parents=[common], help="g o f with the dropped common factor")
    p.add_argument("--f", required=True, help="map applied first")
    p.add_argument("--g", required=True, help="map applied second")
    p.set_defaults(func=cmd_compose)

    for name, fn, helptext in (("iterate", cmd_iterate, "degrees of iterates"), ("stability", cmd_stability, "1-stability test")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--map", required=True)
        p.add_argument("--N", type=int, required=True)
        if name == "iterate":
            p.add_argument("--lambda1", action="store_true", help="add growth-rate enclosures")
            p.add_argument("--eps", default="1e-6")
        p.set_defaults(func=fn)

    p = sub.add_parser("criteria", parents=[common], help="degree-drop and collapse checks for g o f")
    p.add_argument("--f", required=True)
    p.add_argument("--g", help="defaults to f")
    p.add_argument("--H", action="append", help="hypersurface form to test (repeatable)")
    p.set_defaults(func=cmd_criteria)

    p = sub.add_parser("cohomology", parents=[common], help="correspondence calculus on P^k x P^k")
    p.add_argument("--f-dv", help="degree vector of f, e.g. 1,3,3,1")
    p.add_argument("--g-dv", help="degree vector of g (defaults to f's)")
    p.add_argument("--true-dv", help="degree vector of the actual composition")
    p.add_argument("--pushpull", help="run the push-pull check on a product ring, e.g. 2,2")
    p.set_defaults(func=cmd_cohomology)

    p = sub.add_parser("charpoly", parents=[common], help="characteristic polynomial and largest real root")
    p.add_argument("--poly", help="univariate polynomial text")
    p.add_argument("--matrix", help="JSON matrix, inline or file")
    p.add_argument("--largest-real-root", action="store_true")
    p.add_argument("--eps", default="1e-6")
    p.set_defaults(func=cmd_charpoly)

    p = sub.add_parser("monomial", parents=[common], help="dynamical degrees of a monomial map")
    p.add_argument("--matrix", required=True)
    p.add_argument("--eps", default="1e-6")
    p.add_argument("--N", type=int, default=0, help="also compute the first N iterate degrees")
    p.set_defaults(func=cmd_monomial)

    p = sub.add_parser("scenario", parents=[common], help="run a regression scenario")
    p.add_argument("--file", required=True, help="scenario JSON path or shipped scenario name")
    p.set_defaults(func=cmd_scenario)

    p = sub.add_parser("probe", parents=[common], help="randomized generic fiber count on P^2")
    p.add_argument("--map", required=True)
    p.add_argument("--samples", type=int, default=5)
    p.set_defaults(func=cmd_probe)
    return ap


def _report(args, budget, code, inputs, result, error=None) -> dict:
    rep = {
        "command": args.verb,
        "version": __version__,
        "seed": args.seed,
        "budget": {"max_terms": budget.max_terms, "max_seconds": budget.max_seconds},
        "inputs": inputs,
        "status": _STATUS[code],
        "result": result,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    if error is not None:
        rep["error"] = error
    return rep


def _emit(args, doc) -> None:
    text = json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    budget = Budget(args.max_terms or default_term_budget(), args.max_seconds)
    try:
        out = args.func(args, budget)
    except InputError as exc:
        err = {"message": str(exc)}
        if exc.line is not None:
            err.update(line=exc.line, column=exc.column)
        _emit(args, _report(args, budget, EXIT_INPUT, {}, None, err))
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except PolySyntaxError as exc:
        _emit(args, _report(args, budget, EXIT_INPUT, {}, None, {"message": str(exc), "line": exc.line, "column": exc.column}))
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BudgetExceeded as exc:
        _emit(args, _report(args, budget, EXIT_BUDGET, {}, None, {"message": str(exc)}))
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ValueError as exc:
        _emit(args, _report(args, budget, EXIT_INPUT, {}, None, {"message": str(exc)}))
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if len(out) == 4:  # bare canonical map
        _emit(args, out[2])
        return out[0]
    code, inputs, result = out
    _emit(args, _report(args, budget, code, inputs, result))
    return code


if __name__ == "__main__":
    sys.exit(main())
