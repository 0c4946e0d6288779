"""Scenario files: parsing, validation, serialization, and query dispatch.

A scenario is one JSON document holding an algebra declaration, named
events, named states, and a single query record.  Complex numbers are
two-element [re, im] arrays; matrices are row-major nested arrays of such
pairs.  Parsing separates syntax errors (ParseError) from semantic ones
(ValidationError, with the offending location in the message).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Any, Union

import numpy as np

from .errors import (AlgebraMismatch, DimensionMismatch, OrthoprobError,
                     ParseError, ValidationError)
from .events import (BooleanAlgebra, BooleanEvent, Event, EventAlgebra,
                     QuantumAlgebra, QuantumEvent, verify_orthospace_axioms)
from .interference import interference_decomposition, two_slit
from .linalg import StateVector, projector_from_span
from .sampler import SamplerConfig, sample_chain
from .states import (ClassicalState, DensityState, State, compatibility_residuals,
                     compatible, condition, condition_seq, predictability,
                     predictability_seq, prob)


# ---------------------------------------------------------------------------
# Wire format helpers.

def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _decode_complex(value, where: str) -> complex:
    if (not isinstance(value, list) or len(value) != 2
            or not all(_is_number(x) for x in value)):
        raise ValidationError(f"{where}: expected a two-element [re, im] array")
    return complex(value[0], value[1])


def _decode_vector(value, where: str) -> np.ndarray:
    if not isinstance(value, list) or not value:
        raise ValidationError(f"{where}: expected a nonempty array of [re, im] pairs")
    return np.array([_decode_complex(x, f"{where}[{i}]")
                     for i, x in enumerate(value)], dtype=np.complex128)


def _decode_matrix(value, where: str) -> np.ndarray:
    if not isinstance(value, list) or not value:
        raise ValidationError(f"{where}: expected a nonempty array of rows")
    rows = [_decode_vector(row, f"{where}[{i}]") for i, row in enumerate(value)]
    width = {len(r) for r in rows}
    if len(width) != 1:
        raise ValidationError(f"{where}: rows have different lengths")
    return np.array(rows, dtype=np.complex128)


def _encode_complex(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _encode_vector(arr: np.ndarray) -> list:
    return [_encode_complex(complex(x)) for x in arr]


def _encode_matrix(arr: np.ndarray) -> list:
    return [_encode_vector(row) for row in arr]


def _require_keys(doc: dict, where: str, required: tuple[str, ...],
                  optional: tuple[str, ...] = ()) -> None:
    for key in required:
        if key not in doc:
            raise ValidationError(f"{where}: missing required key {key!r}")
    extra = set(doc) - set(required) - set(optional)
    if extra:
        raise ValidationError(f"{where}: unknown keys {sorted(extra)}")


def _string(value, where: str) -> str:
    if not isinstance(value, str) or not value:
        raise ValidationError(f"{where}: expected a nonempty string")
    return value


def _string_list(value, where: str, minimum: int = 1) -> tuple[str, ...]:
    if not isinstance(value, list) or len(value) < minimum:
        raise ValidationError(f"{where}: expected an array of at least {minimum} name(s)")
    return tuple(_string(x, f"{where}[{i}]") for i, x in enumerate(value))


# ---------------------------------------------------------------------------
# Query records.

@dataclass(frozen=True)
class ProbQuery:
    kind = "prob"
    state: str
    event: str


@dataclass(frozen=True)
class ConditionQuery:
    kind = "condition"
    state: str
    event: str
    then: tuple[str, ...] = ()


@dataclass(frozen=True)
class ConditionSeqQuery:
    kind = "condition_seq"
    state: str
    events: tuple[str, ...] = ()
    then: tuple[str, ...] = ()


@dataclass(frozen=True)
class PredictabilityQuery:
    kind = "predictability"
    target: str = ""
    given: tuple[str, ...] = ()


@dataclass(frozen=True)
class CompatibleQuery:
    kind = "compatible"
    first: str = ""
    second: str = ""


@dataclass(frozen=True)
class InterferenceQuery:
    kind = "interference"
    atom: str = ""
    path1: str = ""
    path2: str = ""
    target: str = ""


@dataclass(frozen=True)
class TwoSlitQuery:
    kind = "two_slit"
    source: str = ""
    path1: str = ""
    path2: str = ""
    detector: str = ""


@dataclass(frozen=True)
class SampleQuery:
    kind = "sample"
    initial: str = ""
    tests: tuple[str, ...] = ()
    final: str = ""


@dataclass(frozen=True)
class AxiomsQuery:
    kind = "axioms"
    budget: int = 1000


Query = Union[ProbQuery, ConditionQuery, ConditionSeqQuery, PredictabilityQuery,
              CompatibleQuery, InterferenceQuery, TwoSlitQuery, SampleQuery,
              AxiomsQuery]

QUERY_KINDS = ("prob", "condition", "condition_seq", "predictability",
               "compatible", "interference", "two_slit", "sample", "axioms")


def _parse_query(doc, where: str = "query") -> Query:
    if not isinstance(doc, dict):
        raise ValidationError(f"{where}: expected an object")
    kind = _string(doc.get("kind", ""), f"{where}.kind")
    if kind == "prob":
        _require_keys(doc, where, ("kind", "state", "event"))
        return ProbQuery(state=_string(doc["state"], f"{where}.state"),
                         event=_string(doc["event"], f"{where}.event"))
    if kind == "condition":
        _require_keys(doc, where, ("kind", "state", "event"), ("then",))
        return ConditionQuery(
            state=_string(doc["state"], f"{where}.state"),
            event=_string(doc["event"], f"{where}.event"),
            then=_string_list(doc.get("then", []), f"{where}.then", minimum=0))
    if kind == "condition_seq":
        _require_keys(doc, where, ("kind", "state", "events"), ("then",))
        return ConditionSeqQuery(
            state=_string(doc["state"], f"{where}.state"),
            events=_string_list(doc["events"], f"{where}.events"),
            then=_string_list(doc.get("then", []), f"{where}.then", minimum=0))
    if kind == "predictability":
        _require_keys(doc, where, ("kind", "target", "given"))
        return PredictabilityQuery(
            target=_string(doc["target"], f"{where}.target"),
            given=_string_list(doc["given"], f"{where}.given"))
    if kind == "compatible":
        _require_keys(doc, where, ("kind", "first", "second"))
        return CompatibleQuery(first=_string(doc["first"], f"{where}.first"),
                               second=_string(doc["second"], f"{where}.second"))
    if kind == "interference":
        _require_keys(doc, where, ("kind", "atom", "path1", "path2", "target"))
        return InterferenceQuery(
            atom=_string(doc["atom"], f"{where}.atom"),
            path1=_string(doc["path1"], f"{where}.path1"),
            path2=_string(doc["path2"], f"{where}.path2"),
            target=_string(doc["target"], f"{where}.target"))
    if kind == "two_slit":
        _require_keys(doc, where, ("kind", "source", "path1", "path2", "detector"))
        return TwoSlitQuery(
            source=_string(doc["source"], f"{where}.source"),
            path1=_string(doc["path1"], f"{where}.path1"),
            path2=_string(doc["path2"], f"{where}.path2"),
            detector=_string(doc["detector"], f"{where}.detector"))
    if kind == "sample":
        _require_keys(doc, where, ("kind", "initial", "tests", "final"))
        return SampleQuery(
            initial=_string(doc["initial"], f"{where}.initial"),
            tests=_string_list(doc["tests"], f"{where}.tests"),
            final=_string(doc["final"], f"{where}.final"))
    if kind == "axioms":
        _require_keys(doc, where, ("kind",), ("budget",))
        budget = doc.get("budget", 1000)
        if not isinstance(budget, int) or isinstance(budget, bool) or budget < 1:
            raise ValidationError(f"{where}.budget: expected a positive integer")
        return AxiomsQuery(budget=budget)
    raise ValidationError(
        f"{where}.kind: unknown query kind {kind!r} (expected one of {', '.join(QUERY_KINDS)})")


def _query_to_jsonable(query: Query) -> dict:
    if isinstance(query, ProbQuery):
        return {"kind": "prob", "state": query.state, "event": query.event}
    if isinstance(query, ConditionQuery):
        out = {"kind": "condition", "state": query.state, "event": query.event}
        if query.then:
            out["then"] = list(query.then)
        return out
    if isinstance(query, ConditionSeqQuery):
        out = {"kind": "condition_seq", "state": query.state,
               "events": list(query.events)}
        if query.then:
            out["then"] = list(query.then)
        return out
    if isinstance(query, PredictabilityQuery):
        return {"kind": "predictability", "target": query.target,
                "given": list(query.given)}
    if isinstance(query, CompatibleQuery):
        return {"kind": "compatible", "first": query.first, "second": query.second}
    if isinstance(query, InterferenceQuery):
        return {"kind": "interference", "atom": query.atom, "path1": query.path1,
                "path2": query.path2, "target": query.target}
    if isinstance(query, TwoSlitQuery):
        return {"kind": "two_slit", "source": query.source, "path1": query.path1,
                "path2": query.path2, "detector": query.detector}
    if isinstance(query, SampleQuery):
        return {"kind": "sample", "initial": query.initial,
                "tests": list(query.tests), "final": query.final}
    if isinstance(query, AxiomsQuery):
        return {"kind": "axioms", "budget": query.budget}
    raise TypeError(f"not a query: {query!r}")


# ---------------------------------------------------------------------------
# Scenario documents.

@dataclass(eq=False)
class Scenario:
    """Parsed scenario: an algebra, named events and states, one query.

    ``query`` may be None for documents that only declare an algebra with
    events and states (useful as input to the axiom checker).
    """

    algebra: EventAlgebra
    events: dict[str, Event]
    states: dict[str, State | StateVector]
    query: Query | None

    def __eq__(self, other):
        if not isinstance(other, Scenario):
            return NotImplemented
        return scenario_to_jsonable(self) == scenario_to_jsonable(other)

    __hash__ = None


def _parse_algebra(doc, where: str = "algebra") -> EventAlgebra:
    if not isinstance(doc, dict):
        raise ValidationError(f"{where}: expected an object")
    kind = _string(doc.get("kind", ""), f"{where}.kind")
    if kind == "boolean":
        _require_keys(doc, where, ("kind", "size"), ("labels",))
        size = doc["size"]
        if not isinstance(size, int) or isinstance(size, bool) or size < 1:
            raise ValidationError(f"{where}.size: expected a positive integer")
        labels = None
        if "labels" in doc:
            labels = _string_list(doc["labels"], f"{where}.labels")
        try:
            return BooleanAlgebra(size, labels)
        except ValidationError as exc:
            raise ValidationError(f"{where}: {exc}") from None
    if kind == "quantum":
        _require_keys(doc, where, ("kind", "dim"))
        dim = doc["dim"]
        if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
            raise ValidationError(f"{where}.dim: expected a positive integer")
        return QuantumAlgebra(dim)
    raise ValidationError(f"{where}.kind: expected 'boolean' or 'quantum', got {kind!r}")


def _parse_event(algebra: EventAlgebra, name: str, spec) -> Event:
    where = f"events.{name}"
    if not isinstance(spec, dict):
        raise ValidationError(f"{where}: expected an object")
    forms = [k for k in ("members", "matrix", "span") if k in spec]
    if len(forms) != 1:
        raise ValidationError(
            f"{where}: exactly one of 'members', 'matrix', 'span' is required")
    form = forms[0]
    _require_keys(spec, where, (form,))
    try:
        if form == "members":
            if algebra.kind != "boolean":
                raise ValidationError("'members' events need a boolean algebra")
            members = spec["members"]
            if not isinstance(members, list) or \
                    not all(isinstance(i, int) and not isinstance(i, bool) for i in members):
                raise ValidationError("'members' must be an array of integers")
            return algebra.event(members)
        if algebra.kind != "quantum":
            raise ValidationError(f"{form!r} events need a quantum algebra")
        if form == "matrix":
            return algebra.event(_decode_matrix(spec["matrix"], f"{where}.matrix"))
        vectors = spec["span"]
        if not isinstance(vectors, list) or not vectors:
            raise ValidationError("'span' must be a nonempty array of vectors")
        decoded = [_decode_vector(v, f"{where}.span[{i}]")
                   for i, v in enumerate(vectors)]
        return algebra.event(projector_from_span(decoded))
    except (AlgebraMismatch, DimensionMismatch) as exc:
        raise ValidationError(f"{where}: {exc}") from None
    except ValidationError as exc:
        raise ValidationError(f"{where}: {exc}") from None


def _parse_state(algebra: EventAlgebra, name: str, spec) -> State | StateVector:
    where = f"states.{name}"
    if not isinstance(spec, dict):
        raise ValidationError(f"{where}: expected an object")
    forms = [k for k in ("weights", "density", "vector") if k in spec]
    if len(forms) != 1:
        raise ValidationError(
            f"{where}: exactly one of 'weights', 'density', 'vector' is required")
    form = forms[0]
    _require_keys(spec, where, (form,))
    try:
        if form == "weights":
            if algebra.kind != "boolean":
                raise ValidationError("'weights' states need a boolean algebra")
            weights = spec["weights"]
            if not isinstance(weights, list) or not all(_is_number(x) for x in weights):
                raise ValidationError("'weights' must be an array of numbers")
            return ClassicalState(algebra.space, np.array(weights, dtype=np.float64))
        if algebra.kind != "quantum":
            raise ValidationError(f"{form!r} states need a quantum algebra")
        if form == "density":
            arr = _decode_matrix(spec["density"], f"{where}.density")
            if arr.shape[0] != algebra.dim:
                raise ValidationError(
                    f"density matrix is {arr.shape[0]}x{arr.shape[1]}, "
                    f"algebra dimension is {algebra.dim}")
            return DensityState(arr)
        arr = _decode_vector(spec["vector"], f"{where}.vector")
        if arr.shape[0] != algebra.dim:
            raise ValidationError(
                f"vector has {arr.shape[0]} entries, algebra dimension is {algebra.dim}")
        norm = float(np.linalg.norm(arr))
        if abs(norm - 1.0) > 1e-6:
            raise ValidationError(
                f"vector norm {norm!r} is farther than 1e-6 from 1; not normalizing")
        return StateVector(arr / norm)
    except (AlgebraMismatch, DimensionMismatch) as exc:
        raise ValidationError(f"{where}: {exc}") from None
    except ValidationError as exc:
        raise ValidationError(f"{where}: {exc}") from None


def _check_references(scenario: Scenario) -> None:
    query = scenario.query
    if query is None:
        return
    events, states = scenario.events, scenario.states

    def event_ref(name: str, where: str) -> None:
        if name not in events:
            raise ValidationError(f"{where}: unknown event {name!r}")

    def state_ref(name: str, where: str, vector: bool = False) -> None:
        if name not in states:
            raise ValidationError(f"{where}: unknown state {name!r}")
        if vector and not isinstance(states[name], StateVector):
            raise ValidationError(f"{where}: state {name!r} must be a 'vector' state")

    if isinstance(query, ProbQuery):
        state_ref(query.state, "query.state")
        event_ref(query.event, "query.event")
    elif isinstance(query, ConditionQuery):
        state_ref(query.state, "query.state")
        event_ref(query.event, "query.event")
        for i, n in enumerate(query.then):
            event_ref(n, f"query.then[{i}]")
    elif isinstance(query, ConditionSeqQuery):
        state_ref(query.state, "query.state")
        for i, n in enumerate(query.events):
            event_ref(n, f"query.events[{i}]")
        for i, n in enumerate(query.then):
            event_ref(n, f"query.then[{i}]")
    elif isinstance(query, PredictabilityQuery):
        event_ref(query.target, "query.target")
        for i, n in enumerate(query.given):
            event_ref(n, f"query.given[{i}]")
    elif isinstance(query, CompatibleQuery):
        event_ref(query.first, "query.first")
        event_ref(query.second, "query.second")
    elif isinstance(query, InterferenceQuery):
        event_ref(query.atom, "query.atom")
        event_ref(query.path1, "query.path1")
        event_ref(query.path2, "query.path2")
        event_ref(query.target, "query.target")
    elif isinstance(query, TwoSlitQuery):
        state_ref(query.source, "query.source", vector=True)
        state_ref(query.path1, "query.path1", vector=True)
        state_ref(query.path2, "query.path2", vector=True)
        state_ref(query.detector, "query.detector", vector=True)
    elif isinstance(query, SampleQuery):
        state_ref(query.initial, "query.initial")
        for i, n in enumerate(query.tests):
            event_ref(n, f"query.tests[{i}]")
        event_ref(query.final, "query.final")


def scenario_from_jsonable(doc: Any) -> Scenario:
    if not isinstance(doc, dict):
        raise ValidationError("scenario: expected a JSON object at top level")
    _require_keys(doc, "scenario", ("algebra",), ("events", "states", "query"))
    algebra = _parse_algebra(doc["algebra"])
    events: dict[str, Event] = {}
    raw_events = doc.get("events", {})
    if not isinstance(raw_events, dict):
        raise ValidationError("events: expected an object")
    for name, spec in raw_events.items():
        event = _parse_event(algebra, _string(name, "events key"), spec)
        algebra.register(name, event)
        events[name] = event
    states: dict[str, State | StateVector] = {}
    raw_states = doc.get("states", {})
    if not isinstance(raw_states, dict):
        raise ValidationError("states: expected an object")
    for name, spec in raw_states.items():
        states[_string(name, "states key")] = _parse_state(algebra, name, spec)
    query = _parse_query(doc["query"]) if "query" in doc else None
    scenario = Scenario(algebra=algebra, events=events, states=states, query=query)
    _check_references(scenario)
    return scenario


def parse_scenario(text: str) -> Scenario:
    """Parse scenario JSON text; ParseError for syntax, ValidationError for meaning."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    return scenario_from_jsonable(doc)


def _event_to_jsonable(event: Event) -> dict:
    if isinstance(event, BooleanEvent):
        return {"members": sorted(int(i) for i in event.members)}
    return {"matrix": _encode_matrix(event.matrix)}


def _state_to_jsonable(state: State | StateVector) -> dict:
    if isinstance(state, ClassicalState):
        return {"weights": [float(w) for w in state.weights]}
    if isinstance(state, DensityState):
        return {"density": _encode_matrix(state.matrix)}
    return {"vector": _encode_vector(state.vector)}


def scenario_to_jsonable(scenario: Scenario) -> dict:
    algebra = scenario.algebra
    if isinstance(algebra, BooleanAlgebra):
        alg: dict = {"kind": "boolean", "size": algebra.size}
        if algebra.space.labels is not None:
            alg["labels"] = list(algebra.space.labels)
    else:
        alg = {"kind": "quantum", "dim": algebra.dim}
    doc = {"algebra": alg,
           "events": {n: _event_to_jsonable(e) for n, e in scenario.events.items()},
           "states": {n: _state_to_jsonable(s) for n, s in scenario.states.items()}}
    if scenario.query is not None:
        doc["query"] = _query_to_jsonable(scenario.query)
    return doc


def serialize_scenario(scenario: Scenario, pretty: bool = False) -> str:
    doc = scenario_to_jsonable(scenario)
    if pretty:
        return json.dumps(doc, indent=2)
    return json.dumps(doc)


# ---------------------------------------------------------------------------
# Query execution.

def _nan_to_none(x: float | None):
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return None
    return x


def _as_state(scenario: Scenario, name: str) -> State:
    state = scenario.states[name]
    if isinstance(state, StateVector):
        return DensityState(state.projector().op)
    return state


def run_query(scenario: Scenario, tol: float = 1e-9, seed: int = 42,
              trials: int = 100_000) -> dict:
    """Execute the scenario's query and return a JSON-ready result record.

    ``tol`` is forwarded to the underlying operation (conditioning
    threshold, detection tolerance, compatibility tolerance, path
    tolerance); ``seed`` and ``trials`` apply to sampling and axiom queries.
    """
    query = scenario.query
    if query is None:
        raise ValidationError("scenario has no query to run")
    if isinstance(query, ProbQuery):
        value = prob(_as_state(scenario, query.state), scenario.events[query.event])
        return {"kind": "prob", "state": query.state, "event": query.event,
                "value": value, "tol": tol}
    if isinstance(query, ConditionQuery):
        state = condition(_as_state(scenario, query.state),
                          scenario.events[query.event], tol=tol)
        out = {"kind": "condition", "state": query.state, "event": query.event,
               "conditioned": _state_to_jsonable(state), "tol": tol}
        if query.then:
            out["then"] = {n: prob(state, scenario.events[n]) for n in query.then}
        return out
    if isinstance(query, ConditionSeqQuery):
        state = condition_seq(_as_state(scenario, query.state),
                              [scenario.events[n] for n in query.events], tol=tol)
        out = {"kind": "condition_seq", "state": query.state,
               "events": list(query.events),
               "conditioned": _state_to_jsonable(state), "tol": tol}
        if query.then:
            out["then"] = {n: prob(state, scenario.events[n]) for n in query.then}
        return out
    if isinstance(query, PredictabilityQuery):
        target = scenario.events[query.target]
        given = [scenario.events[n] for n in query.given]
        if len(given) == 1:
            result = predictability(target, given[0], tol=tol)
        else:
            result = predictability_seq(target, given, tol=tol)
        return {"kind": "predictability", "target": query.target,
                "given": list(query.given), "sequence": len(given) > 1,
                "predictable": result.predictable, "s": result.s,
                "residual": result.residual, "tol": tol}
    if isinstance(query, CompatibleQuery):
        first = scenario.events[query.first]
        second = scenario.events[query.second]
        out = {"kind": "compatible", "first": query.first, "second": query.second,
               "compatible": compatible(first, second, tol=tol), "tol": tol}
        if isinstance(first, QuantumEvent):
            comm, ident_first, ident_second = compatibility_residuals(first, second)
            out["residuals"] = {"commutator": comm, "identity_first": ident_first,
                                "identity_second": ident_second}
        return out
    if isinstance(query, InterferenceQuery):
        report = interference_decomposition(
            scenario.events[query.atom], scenario.events[query.path1],
            scenario.events[query.path2], scenario.events[query.target], tol=tol)
        return {"kind": "interference", "atom": query.atom, "path1": query.path1,
                "path2": query.path2, "target": query.target,
                "p_total": report.p_total, "term1": report.term1,
                "term2": report.term2, "cross": report.cross,
                "p_path1": report.p_path1, "p_path2": report.p_path2,
                "p_either_path": report.p_either_path,
                "degenerate_paths": list(report.degenerate_paths), "tol": tol}
    if isinstance(query, TwoSlitQuery):
        value = two_slit(scenario.states[query.source],
                         scenario.states[query.path1],
                         scenario.states[query.path2],
                         scenario.states[query.detector], tol=tol)
        return {"kind": "two_slit", "source": query.source, "path1": query.path1,
                "path2": query.path2, "detector": query.detector,
                "value": value, "tol": tol}
    if isinstance(query, SampleQuery):
        config = SamplerConfig(seed=seed, trials=trials, tol=tol)
        result = sample_chain(_as_state(scenario, query.initial),
                              [scenario.events[n] for n in query.tests],
                              scenario.events[query.final], config)
        return {"kind": "sample", "initial": query.initial,
                "tests": list(query.tests), "final": query.final,
                "seed": seed, "trials": trials, "tol": tol,
                "outcome_counts": result.outcome_counts,
                "all_yes_count": result.all_yes_count,
                "final_event_yes_count": result.final_event_yes_count,
                "empirical_p": _nan_to_none(result.empirical_p),
                "std_error": _nan_to_none(result.std_error),
                "predicted_p": result.predicted_p}
    if isinstance(query, AxiomsQuery):
        report = verify_orthospace_axioms(scenario.algebra, budget=query.budget,
                                          seed=seed, tol=tol)
        return {"kind": "axioms", "algebra": report.algebra,
                "budget": query.budget, "seed": seed, "tol": tol,
                "checks": dict(report.checks), "failures": dict(report.failures),
                "passed": report.passed, "messages": list(report.messages)}
    raise OrthoprobError(f"unhandled query {query!r}")
