"""Regression scenarios: named maps plus a list of checked assertions.

A scenario document looks like::

    {
      "name": "henon-stability",
      "seed": 0,
      "budget": {"max_terms": 10000000},
      "maps": {"h": {"builder": "henon", "params": {"a": "1", "c": "0"}}},
      "assertions": [
        {"op": "iterate_degrees", "args": {"map": "h", "N": 5},
         "expect": [2, 4, 8, 16, 32], "provenance": "DERIVED"}
      ]
    }

Every assertion evaluates an operation to a JSON value.  It passes when that
value equals ``expect``, or, for ``expect_within: [lo, hi]``, when every
number (or enclosure endpoint) in the value lies in the interval.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any, Callable

from . import builders, cohom, spectral
from .fiber import fiber_count_estimate
from .parser import parse_poly
from .poly import BudgetExceeded, format_poly
from .projmap import (
    Budget,
    IndeterminateAt,
    ProjPoint,
    RationalMapPk,
    collapses_into_indeterminacy,
    compose,
    evaluate,
    identity_map,
    image_of_hyperplane,
    is_indeterminate,
    is_one_stable_upto,
    iterate_degrees,
)
from .schemas import validate

PROVENANCE_TAGS = ("PAPER", "TRIVIAL", "DERIVED")


class ScenarioError(ValueError):
    """Malformed scenario document."""


@dataclass
class Scenario:
    name: str
    maps: dict[str, dict]
    assertions: list[dict]
    seed: int = 0
    budget: dict = field(default_factory=dict)
    description: str = ""

    @classmethod
    def from_json(cls, data: dict) -> "Scenario":
        validate(data, "scenario")
        return cls(
            name=data["name"],
            maps=data.get("maps", {}),
            assertions=data["assertions"],
            seed=data.get("seed", 0),
            budget=data.get("budget", {}),
            description=data.get("description", ""),
        )

    @classmethod
    def load(cls, path: str | Path) -> "Scenario":
        return cls.from_json(json.loads(Path(path).read_text()))


def builtin_scenarios() -> list[str]:
    root = resources.files("projdyn") / "data" / "scenarios"
    return sorted(p.name[: -len(".json")] for p in root.iterdir() if p.name.endswith(".json"))


def resolve_scenario_path(name: str) -> Path:
    """A path on disk, else ``scenarios/<name>.json`` or ``<name>`` among the shipped scenarios."""
    p = Path(name)
    if p.is_file():
        return p
    stem = p.name[: -len(".json")] if p.name.endswith(".json") else p.name
    shipped = resources.files("projdyn") / "data" / "scenarios" / f"{stem}.json"
    if shipped.is_file():
        return Path(str(shipped))
    raise FileNotFoundError(f"no scenario file {name!r} (shipped: {', '.join(builtin_scenarios())})")


# -- value conversion ----------------------------------------------------------------


def map_from_spec(spec: dict) -> RationalMapPk:
    if "builder" in spec:
        params = dict(spec.get("params", {}))
        if spec["builder"] == "identity":
            return identity_map(int(params.get("k", 2)))
        return builders.build(spec["builder"], **params)
    return RationalMapPk.from_json(spec)


def _point(coords) -> ProjPoint:
    return ProjPoint(tuple(Fraction(c) for c in coords))


def _point_json(p: ProjPoint | None):
    return None if p is None else [str(c) for c in p.coords]


def _dv(d) -> cohom.DegreeVector:
    return cohom.DegreeVector(tuple(int(x) for x in d))


def _eps(args) -> Fraction:
    return Fraction(str(args.get("eps", "1e-6")))


# -- operations ------------------------------------------------------------------------


class _Ctx:
    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self.budget = Budget(**{k: v for k, v in scenario.budget.items() if k in ("max_terms", "max_seconds")})
        self._maps: dict[str, RationalMapPk] = {}

    def map(self, ref) -> RationalMapPk:
        if isinstance(ref, dict):
            return map_from_spec(ref)
        if ref not in self._maps:
            if ref not in self.scenario.maps:
                raise ScenarioError(f"unknown map {ref!r}")
            self._maps[ref] = map_from_spec(self.scenario.maps[ref])
        return self._maps[ref]

    def poly(self, f: RationalMapPk, text: str):
        return parse_poly(text, f.names)


def _op_degree(ctx, a):
    return ctx.map(a["map"]).degree


def _op_map(ctx, a):
    return ctx.map(a["map"]).strings()


def _op_iterate_degrees(ctx, a):
    seq = iterate_degrees(ctx.map(a["map"]), int(a["N"]), ctx.budget)
    if not seq.complete:
        raise BudgetExceeded(seq.reason)
    if a.get("with_drops"):
        return [[e.deg, e.dropped] for e in seq.entries]
    return seq.degrees


def _op_is_one_stable(ctx, a):
    ok, first = is_one_stable_upto(ctx.map(a["map"]), int(a["N"]), ctx.budget)
    return [ok, first]


def _op_compose(ctx, a):
    f, g = ctx.map(a["f"]), ctx.map(a["g"])
    rep = compose(f, g, ctx.budget.max_terms)
    out = {
        "raw_degree": rep.raw_degree,
        "dropped_degree": rep.dropped_degree,
        "reduced_degree": rep.reduced.degree,
        "reduced_is_identity": rep.reduced == identity_map(f.dim),
    }
    keys = a.get("fields")
    if keys:
        if "dropped_factor" in keys:
            out["dropped_factor"] = format_poly(rep.dropped_factor, f.names)
        if "reduced" in keys:
            out["reduced"] = rep.reduced.strings()
        out = {k: out[k] for k in keys}
    return out


def _op_evaluate(ctx, a):
    r = evaluate(ctx.map(a["map"]), _point(a["point"]))
    return "indeterminate" if isinstance(r, IndeterminateAt) else _point_json(r)


def _op_is_indeterminate(ctx, a):
    f = ctx.map(a["map"])
    pts = a["points"] if "points" in a else [a["point"]]
    vals = [is_indeterminate(f, _point(p)) for p in pts]
    return vals if "points" in a else vals[0]


def _op_image_of_hyperplane(ctx, a):
    f = ctx.map(a["map"])
    return _point_json(image_of_hyperplane(f, ctx.poly(f, a["H"])))


def _op_collapses(ctx, a):
    f, g = ctx.map(a["f"]), ctx.map(a["g"])
    return collapses_into_indeterminacy(f, g, ctx.poly(f, a["H"]))


def _op_degree_drop_witness(ctx, a):
    f, g = ctx.map(a["f"]), ctx.map(a["g"])
    d = compose(f, g, ctx.budget.max_terms).dropped_factor
    return None if d.is_constant else format_poly(d, f.names)


def _op_graph_identity(ctx, a):
    which = a.get("relations", "generators")
    if which in ("generators", "system"):
        return builders.graph_identity_check(builders.henon_symbolic(), builders.henon_relations(which), params=2)
    f = ctx.map(a["map"])
    n = f.dim + 1
    names = [f"X{i + 1}" for i in range(n)] + [f"Y{i + 1}" for i in range(n)]
    return builders.graph_identity_check(f, [parse_poly(s, names) for s in which])


def _op_fiber_count(ctx, a):
    seeds = a.get("seeds", list(range(ctx.scenario.seed, ctx.scenario.seed + 5)))
    return fiber_count_estimate(ctx.map(a["map"]), seeds).count


def _op_largest_real_root(ctx, a):
    return spectral.largest_real_root(spectral.CharPolynomial.parse(a["poly"]), _eps(a)).to_json()


def _op_char_poly(ctx, a):
    return str(spectral.char_poly(a["matrix"]))


def _op_spectral_radius(ctx, a):
    return spectral.spectral_radius(a["matrix"], _eps(a)).to_json()


def _op_monomial_degrees(ctx, a):
    degs = [e.to_json() for e in spectral.monomial_dynamical_degrees(a["matrix"], _eps(a))]
    return degs[int(a["p"]) - 1] if "p" in a else degs


def _op_lambda1_from_degrees(ctx, a):
    if "degrees" in a:
        degs = a["degrees"]
    else:
        seq = iterate_degrees(ctx.map(a["map"]), int(a["N"]), ctx.budget)
        if not seq.complete:
            raise BudgetExceeded(seq.reason)
        degs = seq.degrees
    est = spectral.lambda1_from_degrees(degs, _eps(a))
    field_ = a.get("field", "fekete_min")
    if field_ == "per_n":
        return [e.to_json() for _, e in est.per_n]
    if field_ == "ratios":
        return [str(r) for r in est.ratios]
    return est.fekete_min.to_json()


def _op_graph_class(ctx, a):
    return cohom.graph_class(_dv(a["dv"])).to_json()


def _op_composed_class(ctx, a):
    c = cohom.composed_correspondence_class(cohom.graph_class(_dv(a["f"])), cohom.graph_class(_dv(a["g"])))
    return list(cohom.degree_vector_of(c).d)


def _op_excess_components(ctx, a):
    e = cohom.excess_class(cohom.graph_class(_dv(a["f"])), cohom.graph_class(_dv(a["g"])), _dv(a["true"]))
    k = len(a["true"]) - 1
    return [int(e.coeffs.get((p, k - p), 0)) for p in range(k + 1)]


def _op_witness(ctx, a):
    e = cohom.excess_class(cohom.graph_class(_dv(a["f"])), cohom.graph_class(_dv(a["g"])), _dv(a["true"]))
    w = cohom.nonfunctoriality_witness(e)
    return None if w is None else w.to_json()


def _op_pullback_action(ctx, a):
    g = cohom.graph_class(_dv(a["dv"]))
    k = len(a["dv"]) - 1
    alpha = cohom.ProductRing((k,)).gen(0, int(a["power"]))
    return cohom.pullback_action(g, alpha).to_json()


def _op_pushpull(ctx, a):
    return cohom.pushpull_check(cohom.ProductRing(tuple(a["factors"])), exhaustive=True)


OPS: dict[str, Callable[[_Ctx, dict], Any]] = {
    "degree": _op_degree,
    "map": _op_map,
    "iterate_degrees": _op_iterate_degrees,
    "is_one_stable": _op_is_one_stable,
    "compose": _op_compose,
    "evaluate": _op_evaluate,
    "is_indeterminate": _op_is_indeterminate,
    "image_of_hyperplane": _op_image_of_hyperplane,
    "collapses_into_indeterminacy": _op_collapses,
    "degree_drop_witness": _op_degree_drop_witness,
    "graph_identity": _op_graph_identity,
    "fiber_count": _op_fiber_count,
    "largest_real_root": _op_largest_real_root,
    "char_poly": _op_char_poly,
    "spectral_radius": _op_spectral_radius,
    "monomial_degrees": _op_monomial_degrees,
    "lambda1_from_degrees": _op_lambda1_from_degrees,
    "graph_class": _op_graph_class,
    "composed_class": _op_composed_class,
    "excess_components": _op_excess_components,
    "nonfunctoriality_witness": _op_witness,
    "pullback_action": _op_pullback_action,
    "pushpull_check": _op_pushpull,
}


# -- comparison ----------------------------------------------------------------------


def _numbers(value):
    """All numeric leaves of a result; enclosures contribute both endpoints."""
    if isinstance(value, dict) and "lower" in value and "upper" in value:
        return [Fraction(value["lower"]), Fraction(value["upper"])]
    if isinstance(value, (list, tuple)):
        return [x for v in value for x in _numbers(v)]
    if isinstance(value, bool) or value is None:
        raise ScenarioError("expect_within needs numeric results")
    return [Fraction(str(value))]


def _passes(assertion: dict, value) -> bool:
    if "expect_within" in assertion:
        lo, hi = (Fraction(str(x)) for x in assertion["expect_within"])
        return all(lo <= x <= hi for x in _numbers(value))
    return value == assertion["expect"]


@dataclass
class AssertionResult:
    index: int
    op: str
    status: str  # "pass" | "fail" | "budget_exhausted" | "skipped" | "error"
    provenance: str
    value: Any = None
    expected: Any = None
    message: str | None = None
    seconds: float = 0.0

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "op": self.op,
            "status": self.status,
            "provenance": self.provenance,
            "value": self.value,
            "expected": self.expected,
            "message": self.message,
        }


@dataclass
class ScenarioReport:
    name: str
    seed: int
    results: list[AssertionResult]

    @property
    def passed(self) -> bool:
        return all(r.status == "pass" for r in self.results)

    @property
    def budget_exhausted(self) -> bool:
        return any(r.status == "budget_exhausted" for r in self.results)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "seed": self.seed,
            "passed": self.passed,
            "assertions": [r.to_json() for r in self.results],
        }


def run_scenario(s: Scenario) -> ScenarioReport:
    """Evaluate the assertions in order.

    A failed assertion does not stop the run; running out of budget does, and
    the remaining assertions are reported as skipped.
    """
    ctx = _Ctx(s)
    results: list[AssertionResult] = []
    stop = False
    for i, a in enumerate(s.assertions):
        expected = a.get("expect_within", a.get("expect"))
        res = AssertionResult(i, a["op"], "skipped", a["provenance"], expected=expected)
        results.append(res)
        if stop:
            continue
        t0 = time.monotonic()
        try:
            op = OPS[a["op"]]
        except KeyError:
            raise ScenarioError(f"unknown op {a['op']!r}") from None
        try:
            res.value = op(ctx, a.get("args", {}))
            res.status = "pass" if _passes(a, res.value) else "fail"
        except BudgetExceeded as exc:
            res.status, res.message, stop = "budget_exhausted", str(exc), True
        except ScenarioError:
            raise
        except (ValueError, ArithmeticError) as exc:
            res.status, res.message = "error", f"{type(exc).__name__}: {exc}"
        res.seconds = time.monotonic() - t0
    return ScenarioReport(s.name, s.seed, results)
