"""JSON documents for game specifications, solutions and reports.

Numbers in input documents may be JSON numbers or strings such as ``"2/5"``
or ``"0.4"``; decimals become exact rationals (``0.4`` is ``2/5``).  Exact
numbers are written as ``{"exact": "p/q", "decimal": float}`` and
floating-point ones as ``{"decimal": float}``.  Subsets are lists of 1-based
locations.
"""
from __future__ import annotations

import json
from fractions import Fraction

from .model import (
    Arc,
    Domain,
    FixedCardinality,
    FixedLength,
    FreeLength,
    GameSpec,
    IndependentSubsets,
    MixedStrategy,
    PowerSet,
    RateProfile,
    CostProfile,
    Solution,
    SubsetFamily,
    UniformStartArc,
    as_rational,
    from_mask,
    is_exact,
    to_mask,
)


class DocumentError(ValueError):
    """Invalid input document; ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def loads(text: str):
    """Parse JSON keeping decimal literals exact."""
    try:
        return json.loads(text, parse_float=Fraction)
    except json.JSONDecodeError as exc:
        raise DocumentError("document", f"not valid JSON ({exc})") from None


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# numbers

def number(x) -> dict:
    if is_exact(x):
        x = Fraction(x)
        return {"exact": str(x), "decimal": float(x)}
    return {"decimal": float(x)}


def parse_number(raw, field: str) -> Fraction:
    if isinstance(raw, dict):
        if "exact" in raw:
            raw = raw["exact"]
        elif "decimal" in raw:
            raw = raw["decimal"]
        else:
            raise DocumentError(field, "number objects need an 'exact' or 'decimal' entry")
    if isinstance(raw, bool) or raw is None:
        raise DocumentError(field, f"expected a number, got {json.dumps(raw)}")
    try:
        return as_rational(raw)
    except (TypeError, ValueError, ZeroDivisionError):
        raise DocumentError(field, f"cannot parse {raw!r} as a rational number") from None


def _plain(x):
    return float(x) if isinstance(x, Fraction) else x


# ---------------------------------------------------------------------------
# game specifications

_FAMILY_TYPES = ("power_set", "fixed_cardinality", "subset_family", "free_length", "fixed_length")


def _parse_family(raw, field: str, finite: bool):
    if not isinstance(raw, dict) or "type" not in raw:
        raise DocumentError(field, "expected an object with a 'type' entry")
    kind = raw["type"]
    if kind not in _FAMILY_TYPES:
        raise DocumentError(f"{field}.type", f"unknown family {kind!r}; expected one of {', '.join(_FAMILY_TYPES)}")
    if finite and kind in ("free_length", "fixed_length"):
        raise DocumentError(f"{field}.type", f"{kind!r} needs a circle or interval domain")
    if not finite and kind not in ("free_length", "fixed_length"):
        raise DocumentError(f"{field}.type", f"{kind!r} needs the finite domain")
    try:
        if kind == "power_set":
            return PowerSet()
        if kind == "free_length":
            return FreeLength()
        if kind == "fixed_length":
            if "value" not in raw:
                raise DocumentError(f"{field}.value", "missing")
            return FixedLength(parse_number(raw["value"], f"{field}.value"))
        if kind == "fixed_cardinality":
            k = raw.get("k")
            if isinstance(k, bool) or not isinstance(k, (int, str, Fraction)):
                raise DocumentError(f"{field}.k", f"expected an integer, got {json.dumps(_plain(k))}")
            kq = parse_number(k, f"{field}.k")
            if kq.denominator != 1:
                raise DocumentError(f"{field}.k", f"expected an integer, got {kq}")
            return FixedCardinality(int(kq))
        sets = raw.get("sets")
        if not isinstance(sets, list):
            raise DocumentError(f"{field}.sets", "expected a list of location lists")
        return SubsetFamily(tuple(to_mask(_parse_locations(s, f"{field}.sets[{i}]"))
                                  for i, s in enumerate(sets)))
    except DocumentError:
        raise
    except ValueError as exc:
        raise DocumentError(field, str(exc)) from None


def _parse_locations(raw, field: str) -> list[int]:
    if not isinstance(raw, list) or any(isinstance(j, bool) or not isinstance(j, int) for j in raw):
        raise DocumentError(field, "expected a list of 1-based integer locations")
    if any(j < 1 for j in raw):
        raise DocumentError(field, "locations are 1-based")
    return raw


def _parse_vector(raw, field: str) -> tuple[Fraction, ...]:
    if not isinstance(raw, list) or not raw:
        raise DocumentError(field, "expected a non-empty array")
    return tuple(parse_number(x, f"{field}[{i}]") for i, x in enumerate(raw))


def parse_spec(doc) -> GameSpec:
    if not isinstance(doc, dict):
        raise DocumentError("document", "expected a JSON object")
    domain_raw = doc.get("domain")
    try:
        domain = Domain(domain_raw)
    except ValueError:
        raise DocumentError("domain", f"expected 'circle', 'interval' or 'finite', got {json.dumps(_plain(domain_raw))}") from None
    finite = domain is Domain.FINITE
    for side in ("hider", "searcher"):
        if side not in doc:
            raise DocumentError(side, "missing")
    hider = _parse_family(doc["hider"], "hider", finite)
    searcher = _parse_family(doc["searcher"], "searcher", finite)
    if "costs" not in doc:
        raise DocumentError("costs", "missing")
    try:
        if finite:
            costs = _parse_vector(doc["costs"], "costs")
            pens = _parse_vector(doc["penalties"], "penalties") if "penalties" in doc else costs
            if len(pens) != len(costs):
                raise DocumentError("penalties", f"has {len(pens)} entries but costs has {len(costs)}")
            profile = CostProfile(costs, pens)
        else:
            for key in ("costs", "penalties"):
                if isinstance(doc.get(key), list):
                    raise DocumentError(key, "continuous games take a scalar rate")
            cost = parse_number(doc["costs"], "costs")
            pen = parse_number(doc["penalties"], "penalties") if "penalties" in doc else cost
            profile = RateProfile(cost, pen)
        return GameSpec(domain, hider, searcher, profile)
    except DocumentError:
        raise
    except ValueError as exc:
        raise DocumentError("costs", str(exc)) from None


def _family_doc(family) -> dict:
    if isinstance(family, PowerSet):
        return {"type": "power_set"}
    if isinstance(family, FixedCardinality):
        return {"type": "fixed_cardinality", "k": family.k}
    if isinstance(family, SubsetFamily):
        return {"type": "subset_family", "sets": [list(from_mask(m)) for m in family.masks]}
    if isinstance(family, FreeLength):
        return {"type": "free_length"}
    return {"type": "fixed_length", "value": str(family.length)}


def spec_document(spec: GameSpec) -> dict:
    doc = {"domain": spec.domain.value, "hider": _family_doc(spec.hider),
           "searcher": _family_doc(spec.searcher)}
    if spec.domain is Domain.FINITE:
        doc["costs"] = [str(c) for c in spec.profile.costs]
        doc["penalties"] = [str(p) for p in spec.profile.penalties]
    else:
        doc["costs"] = str(spec.profile.cost)
        doc["penalties"] = str(spec.profile.penalty)
    return doc


# ---------------------------------------------------------------------------
# strategies and solutions

def strategy_document(strategy) -> dict:
    if isinstance(strategy, UniformStartArc):
        return {"type": "uniform_start_arc", "length": number(strategy.length)}
    if isinstance(strategy, IndependentSubsets):
        return {"type": "independent", "inclusion": [number(q) for q in strategy.inclusion]}
    atoms = []
    for pure, p in strategy.atoms:
        if isinstance(pure, Arc):
            atoms.append({"arc": {"start": number(pure.start), "length": number(pure.length)},
                          "probability": number(p)})
        else:
            atoms.append({"set": list(from_mask(pure)), "probability": number(p)})
    return {"type": "mixed", "atoms": atoms}


def parse_strategy(raw, field: str):
    if not isinstance(raw, dict) or "type" not in raw:
        raise DocumentError(field, "expected an object with a 'type' entry")
    kind = raw["type"]
    try:
        if kind == "uniform_start_arc":
            return UniformStartArc(parse_number(raw.get("length"), f"{field}.length"))
        if kind == "independent":
            return IndependentSubsets(_parse_vector(raw.get("inclusion"), f"{field}.inclusion"))
        if kind != "mixed":
            raise DocumentError(f"{field}.type", f"unknown strategy type {kind!r}")
        atoms = raw.get("atoms")
        if not isinstance(atoms, list) or not atoms:
            raise DocumentError(f"{field}.atoms", "expected a non-empty list")
        pairs = []
        for i, atom in enumerate(atoms):
            where = f"{field}.atoms[{i}]"
            if not isinstance(atom, dict):
                raise DocumentError(where, "expected an object")
            p = parse_number(atom.get("probability"), f"{where}.probability")
            if "set" in atom:
                pairs.append((to_mask(_parse_locations(atom["set"], f"{where}.set")), p))
            elif "arc" in atom and isinstance(atom["arc"], dict):
                arc = atom["arc"]
                pairs.append((Arc(parse_number(arc.get("start"), f"{where}.arc.start"),
                                  parse_number(arc.get("length"), f"{where}.arc.length")), p))
            else:
                raise DocumentError(where, "needs a 'set' or an 'arc'")
        return MixedStrategy(tuple(pairs))
    except DocumentError:
        raise
    except (TypeError, ValueError) as exc:
        raise DocumentError(field, str(exc)) from None


def solution_document(spec: GameSpec, solution: Solution) -> dict:
    return {
        "spec": spec_document(spec),
        "value": number(solution.value),
        "provenance": solution.provenance,
        "hider": strategy_document(solution.hider),
        "searcher": strategy_document(solution.searcher),
    }


def parse_solution(doc) -> Solution:
    if not isinstance(doc, dict):
        raise DocumentError("solution", "expected a JSON object")
    for key in ("value", "hider", "searcher"):
        if key not in doc:
            raise DocumentError(key, "missing")
    return Solution(parse_strategy(doc["hider"], "hider"),
                    parse_strategy(doc["searcher"], "searcher"),
                    parse_number(doc["value"], "value"),
                    str(doc.get("provenance", "supplied")))


def _pure_doc(pure):
    if pure is None:
        return None
    if isinstance(pure, Arc):
        return {"start": number(pure.start), "length": number(pure.length)}
    return list(from_mask(pure))


def report_document(report) -> dict:
    return {
        "passed": report.passed,
        "claimed_value": number(report.claimed_value),
        "oracle_value": None if report.oracle_value is None else number(report.oracle_value),
        "hider_gap": number(report.hider_gap),
        "searcher_gap": number(report.searcher_gap),
        "hider_guarantee": number(report.hider_guarantee),
        "searcher_guarantee": number(report.searcher_guarantee),
        "best_hider_response": _pure_doc(report.hider_response),
        "best_searcher_response": _pure_doc(report.searcher_response),
        "tolerance": number(report.tolerance),
    }


def simulation_document(result) -> dict:
    return {"trials": result.trials, "mean": result.mean, "std_error": result.std_error,
            "seed": result.seed, "spec_digest": result.spec_digest}
