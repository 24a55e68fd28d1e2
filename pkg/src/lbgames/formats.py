"""Machine-readable documents: instance files, solve reports, trace reports.

All documents are JSON with a ``format_version`` field. Numeric content is
exact (integers and "p/q" ratio strings); floats appear only in dynamics
frequencies and are quantized to 12 significant digits. Instance files are
the one shared input format: ``{"m": 4, "weights": [7,5,5,4,4,3,3,3]}``.
Weights may appear in any order in a file; loading canonicalizes the order
but never divides by the gcd.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .core import Allocation, Instance
from .solvers import SolveReport
from .dynamics import TraceStats

__all__ = [
    "FORMAT_VERSION",
    "format_ratio",
    "parse_ratio",
    "dumps_document",
    "instance_document",
    "load_instance_document",
    "solve_report_document",
    "parse_solve_report",
    "trace_document",
    "parse_trace_document",
]

FORMAT_VERSION = 1


def format_ratio(ratio: Fraction) -> str:
    """Exact "p/q" form; the denominator is always printed ("1/1", not "1")."""
    return f"{ratio.numerator}/{ratio.denominator}"


def parse_ratio(text: str) -> Fraction:
    num, _, den = text.partition("/")
    if not den:
        raise ValueError(f"ratio must look like 'p/q', got {text!r}")
    return Fraction(int(num), int(den))


def dumps_document(doc: dict) -> str:
    """Canonical JSON rendering: 2-space indent, trailing newline."""
    return json.dumps(doc, indent=2) + "\n"


def _quantize(x: float) -> float:
    # 12 significant digits; repr of the quantized value is deterministic.
    return float(format(x, ".12g"))


def instance_document(instance: Instance, predictions: dict | None = None) -> dict:
    doc: dict[str, Any] = {
        "format_version": FORMAT_VERSION,
        "m": instance.m,
        "weights": list(instance.weights),
    }
    if predictions is not None:
        doc["predictions"] = predictions
    return doc


def load_instance_document(source: str | dict) -> Instance:
    """Parse an instance document from JSON text or an already-parsed dict.

    Unknown fields (e.g. ``predictions`` from the generator) are ignored, so
    generator output feeds straight back into the solvers.
    """
    if isinstance(source, str):
        obj = json.loads(source)
    else:
        obj = source
    if not isinstance(obj, dict):
        raise ValueError("instance document must be a JSON object")
    try:
        m = obj["m"]
        weights = obj["weights"]
    except KeyError as exc:
        raise ValueError(f"instance document missing field {exc}") from exc
    if not isinstance(m, int):
        raise ValueError(f"'m' must be an integer, got {m!r}")
    if not isinstance(weights, list) or not all(isinstance(w, int) for w in weights):
        raise ValueError("'weights' must be an array of integers")
    return Instance(m=m, weights=tuple(weights))


def solve_report_document(report: SolveReport, objective: str = "both") -> dict:
    """Serialize a solve; ``objective`` picks which halves are included."""
    if objective not in ("makespan", "potential", "both"):
        raise ValueError(f"bad objective {objective!r}")
    doc: dict[str, Any] = {
        "format_version": FORMAT_VERSION,
        "objective": objective,
        "instance": {"m": report.instance.m, "weights": list(report.instance.weights)},
    }
    if objective in ("makespan", "both"):
        doc["opt_makespan"] = report.opt_makespan
        doc["opt_witness"] = list(report.opt_witness.assignment)
    if objective in ("potential", "both"):
        doc["min_potential"] = report.min_potential
        doc["worst_po_makespan"] = report.worst_po_makespan
        doc["worst_po_witness"] = list(report.worst_po_witness.assignment)
        doc["po_count_up_to_symmetry"] = report.po_count_up_to_symmetry
    if objective == "both" and report.instance.n > 0:
        doc["irse"] = format_ratio(report.irse())
    doc["nodes_explored"] = report.nodes_explored
    return doc


def parse_solve_report(source: str | dict) -> SolveReport:
    """Rebuild a full ('both') solve report from its document."""
    obj = json.loads(source) if isinstance(source, str) else source
    if obj.get("format_version") != FORMAT_VERSION:
        raise ValueError(f"unsupported format_version {obj.get('format_version')!r}")
    instance = load_instance_document(obj["instance"])
    return SolveReport(
        instance=instance,
        opt_makespan=obj["opt_makespan"],
        min_potential=obj["min_potential"],
        worst_po_makespan=obj["worst_po_makespan"],
        opt_witness=Allocation(tuple(obj["opt_witness"])),
        worst_po_witness=Allocation(tuple(obj["worst_po_witness"])),
        nodes_explored=obj["nodes_explored"],
        po_count_up_to_symmetry=obj["po_count_up_to_symmetry"],
    )


def trace_document(stats: TraceStats) -> dict:
    """Serialize a dynamics trace; frequencies keyed by sorted-load signature.

    Frequencies are 12-significant-digit floats for human use;
    ``profile_counts`` carries the exact visit counts so the document
    round-trips losslessly.
    """
    frequencies = None
    counts = None
    if stats.profile_counts is not None:
        ordered = sorted(stats.profile_counts.items(), reverse=True)
        frequencies = {
            ";".join(str(l) for l in sig): _quantize(count / stats.steps)
            for sig, count in ordered
        }
        counts = {";".join(str(l) for l in sig): count for sig, count in ordered}
    return {
        "format_version": FORMAT_VERSION,
        "beta": format_ratio(Fraction(stats.beta)),
        "steps": stats.steps,
        "seed": stats.seed,
        "generator": stats.generator,
        "final": list(stats.final.assignment),
        "min_potential": stats.min_potential,
        "visits_at_min_potential": stats.visits_at_min_potential,
        "frequencies": frequencies,
        "profile_counts": counts,
        "potential_trace": list(stats.potential_trace)
        if stats.potential_trace is not None
        else None,
    }


def parse_trace_document(source: str | dict) -> TraceStats:
    """Rebuild a TraceStats from its document (exact fields only)."""
    obj = json.loads(source) if isinstance(source, str) else source
    if obj.get("format_version") != FORMAT_VERSION:
        raise ValueError(f"unsupported format_version {obj.get('format_version')!r}")
    counts = obj.get("profile_counts")
    profile_counts = None
    if counts is not None:
        profile_counts = {
            tuple(int(part) for part in key.split(";")): value
            for key, value in counts.items()
        }
    trace = obj.get("potential_trace")
    return TraceStats(
        beta=parse_ratio(obj["beta"]),
        steps=obj["steps"],
        seed=obj["seed"],
        generator=obj["generator"],
        final=Allocation(tuple(obj["final"])),
        min_potential=obj["min_potential"],
        visits_at_min_potential=obj["visits_at_min_potential"],
        profile_counts=profile_counts,
        potential_trace=tuple(trace) if trace is not None else None,
    )
