"""Instance-space sweeps: hunt for high-ratio games, enforce the 4/3 ceiling.

Enumerates canonical instances (nonincreasing weights, gcd 1) or samples
random ones, solves each exactly, and keeps the records whose worst
potential-optimal makespan strictly exceeds the optimum. Every record is
checked against the exact bounds 1 <= ratio <= 4/3; a violation aborts the
sweep loudly, since it would mean either a solver bug or a counterexample
to the ceiling.

Sweeps are embarrassingly parallel: the enumeration is split into
contiguous chunks, workers share nothing, and results are merged back in
enumeration order, so output is identical for every worker count.
"""

from __future__ import annotations

import itertools
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .core import Instance, canonicalize
from .solvers import ResourceExhaustedError, potential_optimum

__all__ = [
    "InvariantViolationError",
    "SearchSpace",
    "SearchRecord",
    "SearchResult",
    "enumerate_canonical",
    "run_search",
    "render_csv",
    "CSV_HEADER",
]

_IRSE_CEILING = Fraction(4, 3)

CSV_HEADER = "n,m,weights,opt_makespan,worst_po_makespan,irse_num,irse_den,nodes_explored"


class InvariantViolationError(RuntimeError):
    """A solved record breached an exact invariant (e.g. the 4/3 ceiling)."""


@dataclass(frozen=True)
class SearchSpace:
    """Ranges of instances to sweep, exhaustively or by seeded sampling."""

    n_range: tuple[int, int]
    m_range: tuple[int, int]
    w_max: int
    mode: str = "exhaustive"
    count: int | None = None
    seed: int | None = None

    def __post_init__(self) -> None:
        n_min, n_max = self.n_range
        m_min, m_max = self.m_range
        if n_min < 1 or n_max < n_min:
            raise ValueError(f"bad job range {self.n_range!r}")
        if m_min < 1 or m_max < m_min:
            raise ValueError(f"bad machine range {self.m_range!r}")
        if self.w_max < 1:
            raise ValueError(f"w_max must be >= 1, got {self.w_max!r}")
        if self.mode == "exhaustive":
            pass
        elif self.mode == "random":
            if not isinstance(self.count, int) or self.count < 1:
                raise ValueError("random mode needs a positive sample count")
            if self.seed is None:
                raise ValueError("random mode needs a seed")
        else:
            raise ValueError(f"mode must be 'exhaustive' or 'random', got {self.mode!r}")


@dataclass(frozen=True)
class SearchRecord:
    """One solved instance: ratio plus the quantities it reduces."""

    instance: Instance
    opt_makespan: int
    worst_po_makespan: int
    irse: Fraction
    nodes_explored: int


@dataclass(frozen=True)
class SearchResult:
    best: SearchRecord | None
    hits: tuple[SearchRecord, ...]  # records with irse > 1, enumeration order
    records: tuple[SearchRecord, ...]  # all solved records, enumeration order
    skipped: tuple[tuple[Instance, str], ...]  # per-record resource exhaustion
    summary: dict


def enumerate_canonical(space: SearchSpace) -> Iterator[Instance]:
    """All canonical instances of the space in a fixed order.

    Weight vectors are nonincreasing with gcd 1 (one representative per
    scale-and-permutation class); iteration is n ascending, m ascending,
    then descending-lexicographic weight order.
    """
    if space.mode != "exhaustive":
        raise ValueError("enumerate_canonical requires exhaustive mode")
    n_min, n_max = space.n_range
    m_min, m_max = space.m_range
    for n in range(n_min, n_max + 1):
        for m in range(m_min, m_max + 1):
            for combo in itertools.combinations_with_replacement(
                range(space.w_max, 0, -1), n
            ):
                if math.gcd(*combo) != 1:
                    continue
                yield Instance(m=m, weights=combo)


def _space_instances(space: SearchSpace) -> list[Instance]:
    if space.mode == "exhaustive":
        return list(enumerate_canonical(space))
    rng = random.Random(space.seed)
    n_min, n_max = space.n_range
    m_min, m_max = space.m_range
    seen: set[tuple[int, tuple[int, ...]]] = set()
    out: list[Instance] = []
    for _ in range(space.count or 0):
        n = rng.randint(n_min, n_max)
        m = rng.randint(m_min, m_max)
        inst = canonicalize(
            Instance(m=m, weights=tuple(rng.randint(1, space.w_max) for _ in range(n)))
        )
        key = (inst.m, inst.weights)
        if key not in seen:
            seen.add(key)
            out.append(inst)
    return out


def _solve_batch(
    batch: list[tuple[int, int, tuple[int, ...]]], node_limit: int | None
) -> list[tuple]:
    """Worker body: solve a contiguous chunk; picklable plain tuples only."""
    results = []
    for idx, m, weights in batch:
        inst = Instance(m=m, weights=weights)
        try:
            report = potential_optimum(inst, node_limit=node_limit)
        except ResourceExhaustedError as exc:
            results.append((idx, "exhausted", str(exc)))
            continue
        results.append(
            (
                idx,
                "ok",
                report.opt_makespan,
                report.worst_po_makespan,
                report.nodes_explored,
            )
        )
    return results


def _check_record(record: SearchRecord) -> None:
    if not (Fraction(1) <= record.irse <= _IRSE_CEILING):
        raise InvariantViolationError(
            "IRSE bound breached: instance "
            f"m={record.instance.m} weights={list(record.instance.weights)} has "
            f"irse={record.irse} outside [1, 4/3]. This falsifies the ceiling "
            "or reveals a solver bug; stopping the sweep."
        )


def run_search(
    space: SearchSpace,
    workers: int = 1,
    node_limit: int | None = None,
) -> SearchResult:
    """Solve every instance of the space; deterministic for any worker count.

    Returns the best record, all records with ratio strictly above 1, the
    full record list, and per-instance resource exhaustions (which skip the
    record without aborting the sweep). Each record is asserted to satisfy
    1 <= irse <= 4/3 exactly.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    instances = _space_instances(space)
    indexed = [(i, inst.m, inst.weights) for i, inst in enumerate(instances)]

    if workers == 1 or len(indexed) <= 1:
        raw = _solve_batch(indexed, node_limit)
    else:
        chunk = -(-len(indexed) // workers)  # contiguous static partition
        batches = [indexed[i : i + chunk] for i in range(0, len(indexed), chunk)]
        raw = []
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_solve_batch, batches, itertools.repeat(node_limit)):
                raw.extend(part)
    raw.sort(key=lambda item: item[0])

    records: list[SearchRecord] = []
    skipped: list[tuple[Instance, str]] = []
    for item in raw:
        idx = item[0]
        inst = instances[idx]
        if item[1] == "exhausted":
            skipped.append((inst, item[2]))
            continue
        _idx, _tag, opt_mk, worst_mk, nodes = item
        record = SearchRecord(
            instance=inst,
            opt_makespan=opt_mk,
            worst_po_makespan=worst_mk,
            irse=Fraction(worst_mk, opt_mk),
            nodes_explored=nodes,
        )
        _check_record(record)
        records.append(record)

    best: SearchRecord | None = None
    for record in records:
        if best is None or record.irse > best.irse:
            best = record
    hits = tuple(r for r in records if r.irse > 1)

    summary = {
        "format_version": 1,
        "mode": space.mode,
        "instances_enumerated": len(instances),
        "instances_solved": len(records),
        "instances_skipped": len(skipped),
        "hits_above_one": len(hits),
        "max_irse": f"{best.irse.numerator}/{best.irse.denominator}" if best else None,
        "best": _record_doc(best) if best else None,
    }
    return SearchResult(
        best=best,
        hits=hits,
        records=tuple(records),
        skipped=tuple(skipped),
        summary=summary,
    )


def _record_doc(record: SearchRecord) -> dict:
    return {
        "n": record.instance.n,
        "m": record.instance.m,
        "weights": list(record.instance.weights),
        "opt_makespan": record.opt_makespan,
        "worst_po_makespan": record.worst_po_makespan,
        "irse": f"{record.irse.numerator}/{record.irse.denominator}",
        "nodes_explored": record.nodes_explored,
    }


def render_csv(records: tuple[SearchRecord, ...] | list[SearchRecord]) -> str:
    """CSV text for a record list; weights are semicolon-joined."""
    lines = [CSV_HEADER]
    for r in records:
        weights = ";".join(str(w) for w in r.instance.weights)
        lines.append(
            f"{r.instance.n},{r.instance.m},{weights},{r.opt_makespan},"
            f"{r.worst_po_makespan},{r.irse.numerator},{r.irse.denominator},"
            f"{r.nodes_explored}"
        )
    return "\n".join(lines) + "\n"


def parse_csv(text: str) -> list[SearchRecord]:
    """Inverse of :func:`render_csv`."""
    lines = text.strip().split("\n")
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError("unrecognized CSV header")
    records = []
    for line in lines[1:]:
        n, m, weights, opt_mk, worst_mk, num, den, nodes = line.split(",")
        inst = Instance(m=int(m), weights=tuple(int(w) for w in weights.split(";")))
        if inst.n != int(n):
            raise ValueError(f"row job count {n} does not match weights {weights!r}")
        records.append(
            SearchRecord(
                instance=inst,
                opt_makespan=int(opt_mk),
                worst_po_makespan=int(worst_mk),
                irse=Fraction(int(num), int(den)),
                nodes_explored=int(nodes),
            )
        )
    return records
