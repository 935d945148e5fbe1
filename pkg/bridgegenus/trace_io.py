"""Trace serialization: line-oriented text and JSON records.

Text layout::

    trace 1
    initial 1,1,-1,-1
    params k=2 s=1
    summary n=4 m=2 total=0 bound=0 regime=false
    step cancel_mirror_pair cost=0 classes=-1,-1|-1,-1
    final -1,-1;-1,-1

Both formats round-trip exactly and the summary header is checked
against the steps on parse.
"""

from __future__ import annotations

import json
from typing import Any

from pydantic import ValidationError

from bridgegenus.errors import TraceFormatError, WordParseError
from bridgegenus.knot_core import canonicalize, parse_word
from bridgegenus.models import (
    BoundParams,
    CobordismTrace,
    ConnectedSum,
    KnotClass,
    StepKind,
    TraceStep,
)

TEXT_VERSION = "1"
UNKNOT = "unknot"


def trace_header(trace: CobordismTrace) -> dict[str, Any]:
    return {
        "initial_word": str(trace.initial_word),
        "k": trace.params.k,
        "s": trace.params.s,
        "n": trace.n,
        "m": trace.m,
        "total_cost": trace.total_cost,
        "bound": trace.bound,
        "asymptotic_regime": trace.params.in_asymptotic_regime(trace.n),
    }


# --- Text ---


def _format_step(step: TraceStep) -> str:
    parts = [f"step {step.kind.value}", f"cost={step.genus_cost}"]
    if step.pair_index is not None:
        parts.append(f"pair={step.pair_index}")
    if step.classes:
        parts.append("classes=" + "|".join(str(c) for c in step.classes))
    return " ".join(parts)


def trace_to_text(trace: CobordismTrace) -> str:
    h = trace_header(trace)
    lines = [
        f"trace {TEXT_VERSION}",
        f"initial {h['initial_word']}",
        f"params k={h['k']} s={h['s']}",
        f"summary n={h['n']} m={h['m']} total={h['total_cost']} bound={h['bound']} "
        f"regime={'true' if h['asymptotic_regime'] else 'false'}",
    ]
    lines.extend(_format_step(step) for step in trace.steps)
    lines.append(f"final {trace.final if trace.final.summands else UNKNOT}")
    return "\n".join(lines) + "\n"


def _fields(tokens: list[str], lineno: int) -> dict[str, str]:
    fields: dict[str, str] = {}
    for token in tokens:
        key, sep, value = token.partition("=")
        if not sep:
            raise TraceFormatError(f'expected key=value, got "{token}"', lineno)
        fields[key] = value
    return fields


def _parse_class(text: str, lineno: int) -> KnotClass:
    try:
        c = canonicalize(parse_word(text))
    except WordParseError as e:
        raise TraceFormatError(str(e), lineno) from e
    if str(c) != text:
        raise TraceFormatError(f"{text} is not a canonical class representative", lineno)
    return c


def _parse_step(tokens: list[str], lineno: int) -> TraceStep:
    if not tokens:
        raise TraceFormatError("step without kind", lineno)
    try:
        kind = StepKind(tokens[0])
    except ValueError:
        raise TraceFormatError(f'unknown step kind "{tokens[0]}"', lineno) from None
    fields = _fields(tokens[1:], lineno)
    try:
        return TraceStep(
            kind=kind,
            genus_cost=int(fields["cost"]),
            pair_index=int(fields["pair"]) if "pair" in fields else None,
            classes=tuple(
                _parse_class(c, lineno) for c in fields["classes"].split("|")
            ) if "classes" in fields else (),
        )
    except (KeyError, ValueError, ValidationError) as e:
        raise TraceFormatError(f"bad step: {e}", lineno) from e


def trace_from_text(text: str) -> CobordismTrace:
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines or lines[0] != f"trace {TEXT_VERSION}":
        raise TraceFormatError(f'expected "trace {TEXT_VERSION}" header', 1)

    initial = params = summary = final = None
    steps: list[TraceStep] = []
    for lineno, line in enumerate(lines[1:], start=2):
        head, _, rest = line.partition(" ")
        tokens = rest.split()
        try:
            if head == "initial":
                initial = parse_word(rest)
            elif head == "params":
                f = _fields(tokens, lineno)
                params = BoundParams(k=int(f["k"]), s=int(f["s"]))
            elif head == "summary":
                summary = _fields(tokens, lineno)
            elif head == "step":
                steps.append(_parse_step(tokens, lineno))
            elif head == "final":
                final = ConnectedSum(summands=tuple(
                    _parse_class(c, lineno) for c in rest.split(";")
                )) if rest != UNKNOT else ConnectedSum()
            else:
                raise TraceFormatError(f'unknown record "{head}"', lineno)
        except (WordParseError, KeyError, ValueError, ValidationError) as e:
            if isinstance(e, TraceFormatError):
                raise
            raise TraceFormatError(str(e), lineno) from e

    if initial is None or params is None or summary is None or final is None:
        raise TraceFormatError("missing initial, params, summary or final record")

    trace = CobordismTrace(initial_word=initial, params=params, steps=tuple(steps), final=final)
    _check_summary(trace, summary)
    return trace


def _check_summary(trace: CobordismTrace, summary: dict[str, Any]) -> None:
    h = trace_header(trace)
    expected = {
        "n": h["n"], "m": h["m"], "total": h["total_cost"], "bound": h["bound"],
    }
    for key, value in expected.items():
        if str(summary.get(key)) != str(value):
            raise TraceFormatError(f"summary {key}={summary.get(key)} but steps give {value}")


# --- JSON ---


def trace_to_record(trace: CobordismTrace) -> dict[str, Any]:
    return {"header": trace_header(trace), "trace": trace.model_dump(mode="json")}


def trace_to_json(trace: CobordismTrace) -> str:
    return json.dumps(trace_to_record(trace), indent=2, sort_keys=True) + "\n"


def trace_from_record(record: dict[str, Any]) -> CobordismTrace:
    try:
        trace = CobordismTrace.model_validate(record["trace"])
    except (KeyError, ValidationError) as e:
        raise TraceFormatError(f"invalid trace record: {e}") from e
    header = record.get("header", {})
    _check_summary(trace, {
        "n": header.get("n"), "m": header.get("m"),
        "total": header.get("total_cost"), "bound": header.get("bound"),
    })
    return trace


def trace_from_json(text: str) -> CobordismTrace:
    try:
        record = json.loads(text)
    except json.JSONDecodeError as e:
        raise TraceFormatError(f"invalid JSON: {e}") from e
    return trace_from_record(record)
