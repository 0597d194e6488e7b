"""Exhaustive fiber-graph connectivity checks and degree certification.

Within one fiber, two multisets are one move of degree <= m apart exactly
when they share at least d - m members.  The sweep walks every fiber of
every degree in [2, d_max], labels components, and aggregates a report; a
disconnected fiber yields a witness pair proving that moves of degree <= m
do not suffice at that degree.  A report never claims more than the range
it actually swept.
"""

from __future__ import annotations

import time
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from itertools import combinations
from typing import Callable, Iterable, Optional

from .errors import (
    CapacityError,
    IncompatibilityError,
    InvalidFiberError,
    PreconditionError,
)
from .fibers import (
    DEFAULT_FIBER_CAP,
    DEFAULT_SWEEP_CAP,
    ColumnSignature,
    FlowMultiset,
    compatible,
    enumerate_all_fibers,
    enumerate_fiber,
    make_multiset,
    multiset_from_rows,
    multiset_to_rows,
    signature,
)
from .groups import Group, group_from_json, group_to_json
from .moves import Move

PAIRWISE_LIMIT = 4096


class _UnionFind:
    def __init__(self, size: int):
        self.parent = list(range(size))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


@dataclass(frozen=True)
class FiberComponents:
    """Connected components of one fiber, each sorted, lowest member first."""

    components: tuple[tuple[FlowMultiset, ...], ...]

    @property
    def connected(self) -> bool:
        return len(self.components) == 1

    def labels(self) -> dict[FlowMultiset, int]:
        return {
            ms: label for label, comp in enumerate(self.components) for ms in comp
        }


@dataclass(frozen=True)
class DegreeStats:
    degree: int
    fiber_count: int
    multiset_count: int
    disconnected_count: int


@dataclass(frozen=True)
class Witness:
    """Two multisets of one fiber lying in distinct components."""

    degree: int
    signature: ColumnSignature
    first: FlowMultiset
    second: FlowMultiset


@dataclass(frozen=True)
class CertificationReport:
    group: Group
    n: int
    d_max: int
    m: int
    per_degree: tuple[DegreeStats, ...]
    witnesses: tuple[Witness, ...]
    verdict: str
    statement: str
    elapsed_ms: int = field(compare=False, default=0)


def _multiset_key(ms: FlowMultiset) -> tuple[tuple[int, ...], ...]:
    return tuple(f.values for f in ms.flows)


def _check_single_fiber(fiber: list[FlowMultiset]) -> ColumnSignature:
    if not fiber:
        raise InvalidFiberError("fiber is empty")
    sig = signature(fiber[0])
    for ms in fiber[1:]:
        if signature(ms) != sig:
            raise InvalidFiberError("multisets do not share one signature")
    return sig


def _shared_count(a: Counter, b: Counter) -> int:
    return sum((a & b).values())


def fiber_edges(fiber: list[FlowMultiset], m: int, *, validate: bool = True) -> list[tuple[int, int]]:
    """Adjacency by the shared-member rule: edge iff |M1 and M2| >= d - m."""
    if validate:
        _check_single_fiber(fiber)
    size = len(fiber)
    need = fiber[0].degree - m
    if need <= 0:
        return [(i, j) for i in range(size) for j in range(i + 1, size)]
    counters = [Counter(ms.flows) for ms in fiber]
    edges = []
    for i in range(size):
        ci = counters[i]
        for j in range(i + 1, size):
            if _shared_count(ci, counters[j]) >= need:
                edges.append((i, j))
    return edges


def fiber_edges_generative(
    fiber: list[FlowMultiset], m: int, *, fiber_cap: int = DEFAULT_FIBER_CAP
) -> list[tuple[int, int]]:
    """Adjacency by applying moves: remove each sub-multiset of size <= m and
    re-insert every compatible replacement.  Independent cross-check for
    :func:`fiber_edges`; quadratic in practice, test-scale only.
    """
    _check_single_fiber(fiber)
    group, n = fiber[0].group, fiber[0].n
    pos = {ms: i for i, ms in enumerate(fiber)}
    replacements: dict[tuple[int, ...], list[FlowMultiset]] = {}
    edges = set()
    for i, ms in enumerate(fiber):
        counter = Counter(ms.flows)
        d = ms.degree
        for k in range(1, min(m, d) + 1):
            outs = {tuple(sorted(sub, key=lambda f: f.values))
                    for sub in combinations(ms.flows, k)}
            for out_flows in outs:
                out = make_multiset(out_flows)
                key = signature(out).flat()
                if key not in replacements:
                    replacements[key] = enumerate_fiber(
                        signature(out), group, n, cap=fiber_cap
                    )
                base = counter - Counter(out.flows)
                for ins in replacements[key]:
                    if ins == out:
                        continue
                    neighbor = make_multiset(
                        list(base.elements()) + list(ins.flows)
                    )
                    j = pos[neighbor]
                    if j != i:
                        edges.add((min(i, j), max(i, j)))
    return sorted(edges)


def _shared_submultiset_union(fiber: list[FlowMultiset], m: int) -> _UnionFind:
    """Union-find over the same adjacency as :func:`fiber_edges`, built by
    hashing (d - m)-element sub-multisets instead of comparing all pairs.
    Two multisets share >= d - m members iff they share some such witness, so
    the components are identical; this path only matters for large fibers.
    """
    uf = _UnionFind(len(fiber))
    need = fiber[0].degree - m
    if need <= 0:
        for i in range(1, len(fiber)):
            uf.union(0, i)
        return uf
    anchors: dict[tuple, int] = {}
    for idx, ms in enumerate(fiber):
        vals = tuple(f.values for f in ms.flows)
        for sub in set(combinations(vals, need)):
            first = anchors.setdefault(sub, idx)
            if first != idx:
                uf.union(first, idx)
    return uf


def fiber_connected_under(
    fiber: Iterable[FlowMultiset],
    m: int,
    *,
    pairwise_limit: int = PAIRWISE_LIMIT,
) -> FiberComponents:
    """Decompose one fiber into components under moves of degree <= m."""
    members = list(fiber)
    _check_single_fiber(members)
    if m < 2:
        raise PreconditionError(f"move bound must be >= 2, got {m}")
    if len(members) <= pairwise_limit:
        uf = _UnionFind(len(members))
        for i, j in fiber_edges(members, m, validate=False):
            uf.union(i, j)
    else:
        uf = _shared_submultiset_union(members, m)
    by_root: dict[int, list[int]] = {}
    for i in range(len(members)):
        by_root.setdefault(uf.find(i), []).append(i)
    comps = []
    for idxs in by_root.values():
        idxs.sort(key=lambda i: _multiset_key(members[i]))
        comps.append(tuple(members[i] for i in idxs))
    comps.sort(key=lambda comp: _multiset_key(comp[0]))
    return FiberComponents(components=tuple(comps))


def _fiber_verdict(
    item: tuple[ColumnSignature, list[FlowMultiset]],
    m: int,
    pairwise_limit: int,
) -> tuple[ColumnSignature, int, Optional[tuple[FlowMultiset, FlowMultiset]]]:
    sig, fiber = item
    if len(fiber) == 1:
        return sig, 1, None
    comps = fiber_connected_under(fiber, m, pairwise_limit=pairwise_limit)
    if comps.connected:
        return sig, len(fiber), None
    return sig, len(fiber), (comps.components[0][0], comps.components[1][0])


def certify_degree(
    group: Group,
    n: int,
    d_max: int,
    m: int,
    *,
    threads: int = 1,
    find_all: bool = False,
    sweep_cap: int = DEFAULT_SWEEP_CAP,
    pairwise_limit: int = PAIRWISE_LIMIT,
    progress: Optional[Callable[[str], None]] = None,
) -> CertificationReport:
    """Check every fiber of every degree in [2, d_max] for connectivity.

    By default the sweep stops after the first degree that produced a
    witness and reports only the first one in (degree, fiber key) order;
    ``find_all=True`` sweeps the full range and keeps every witness.
    Fibers of one degree may be checked in parallel; the aggregate is
    independent of scheduling.
    """
    if m < 2:
        raise PreconditionError(f"move bound must be >= 2, got {m}")
    if d_max < m:
        raise PreconditionError(f"d_max={d_max} must be >= m={m}")
    if threads < 1:
        raise PreconditionError(f"threads must be >= 1, got {threads}")
    started = time.monotonic()
    per_degree: list[DegreeStats] = []
    witnesses: list[Witness] = []
    check = partial(_fiber_verdict, m=m, pairwise_limit=pairwise_limit)
    for d in range(2, d_max + 1):
        try:
            fibers = enumerate_all_fibers(group, n, d, cap=sweep_cap)
        except CapacityError as exc:
            raise CapacityError(
                f"degree {d} of the sweep: {exc}", required=exc.required, cap=exc.cap
            ) from exc
        fiber_count = 0
        multisets = 0
        disconnected = 0
        first_pair: Optional[Witness] = None
        if threads > 1:
            pool = ThreadPoolExecutor(max_workers=threads)
            results = pool.map(check, fibers)
        else:
            pool = None
            results = map(check, fibers)
        try:
            for sig, size, pair in results:
                fiber_count += 1
                multisets += size
                if pair is not None:
                    disconnected += 1
                    w = Witness(
                        degree=d, signature=sig, first=pair[0], second=pair[1]
                    )
                    if find_all:
                        witnesses.append(w)
                    elif first_pair is None:
                        first_pair = w
        finally:
            if pool is not None:
                pool.shutdown()
        if first_pair is not None:
            witnesses.append(first_pair)
        per_degree.append(
            DegreeStats(
                degree=d,
                fiber_count=fiber_count,
                multiset_count=multisets,
                disconnected_count=disconnected,
            )
        )
        if progress is not None:
            progress(
                f"degree {d}: {fiber_count} fibers, {multisets} multisets, "
                f"{disconnected} disconnected"
            )
        if disconnected and not find_all:
            break
    if witnesses:
        verdict = "not-verified"
        statement = (
            f"not verified for n={n}: {witnesses[0].degree} is the lowest degree "
            f"with a fiber disconnected under moves of degree <= {m}"
        )
    else:
        verdict = "verified"
        statement = (
            f"verified up to degree {d_max} for n={n}: every fiber is connected "
            f"under moves of degree <= {m}"
        )
    elapsed_ms = int((time.monotonic() - started) * 1000)
    return CertificationReport(
        group=group,
        n=n,
        d_max=d_max,
        m=m,
        per_degree=tuple(per_degree),
        witnesses=tuple(witnesses),
        verdict=verdict,
        statement=statement,
        elapsed_ms=elapsed_ms,
    )


def find_move_path(
    m1: FlowMultiset,
    m2: FlowMultiset,
    m: int,
    *,
    fiber_cap: int = DEFAULT_FIBER_CAP,
) -> Optional[list[Move]]:
    """Shortest sequence of degree <= m moves from m1 to m2, or None.

    Breadth-first search over the fiber of the shared signature; the replay
    of the returned moves transforms m1 into m2 exactly.
    """
    if m < 1:
        raise PreconditionError(f"move bound must be >= 1, got {m}")
    if not compatible(m1, m2):
        raise IncompatibilityError("endpoint multisets are not compatible")
    if m1 == m2:
        return []
    fiber = enumerate_fiber(signature(m1), m1.group, m1.n, cap=fiber_cap)
    pos = {ms: i for i, ms in enumerate(fiber)}
    src, dst = pos[m1], pos[m2]
    need = m1.degree - m
    counters = [Counter(ms.flows) for ms in fiber]
    parent: dict[int, Optional[int]] = {src: None}
    frontier = [src]
    while frontier and dst not in parent:
        nxt = []
        for i in frontier:
            ci = counters[i]
            for j in range(len(fiber)):
                if j in parent:
                    continue
                if need <= 0 or _shared_count(ci, counters[j]) >= need:
                    parent[j] = i
                    nxt.append(j)
        frontier = nxt
    if dst not in parent:
        return None
    chain = [dst]
    while parent[chain[-1]] is not None:
        chain.append(parent[chain[-1]])
    chain.reverse()
    moves = []
    for a, b in zip(chain, chain[1:]):
        ca, cb = counters[a], counters[b]
        moves.append(
            Move(
                removed=make_multiset((ca - cb).elements()),
                inserted=make_multiset((cb - ca).elements()),
            )
        )
    return moves


def find_indispensable(
    group: Group,
    n: int,
    m: int,
    *,
    d_max: int = 4,
    sweep_cap: int = DEFAULT_SWEEP_CAP,
    pairwise_limit: int = PAIRWISE_LIMIT,
) -> Optional[Witness]:
    """First disconnected fiber in (degree, fiber key) order, or None.

    A hit is evidence that generators of degree > m are required at that
    degree; None only means the range [2, d_max] is clean.
    """
    if m < 2:
        raise PreconditionError(f"move bound must be >= 2, got {m}")
    for d in range(2, d_max + 1):
        try:
            fibers = enumerate_all_fibers(group, n, d, cap=sweep_cap)
        except CapacityError as exc:
            raise CapacityError(
                f"degree {d} of the scan: {exc}", required=exc.required, cap=exc.cap
            ) from exc
        for sig, fiber in fibers:
            _, _, pair = _fiber_verdict((sig, fiber), m, pairwise_limit)
            if pair is not None:
                return Witness(degree=d, signature=sig, first=pair[0], second=pair[1])
    return None


def witness_to_json(w: Witness) -> dict:
    return {
        "degree": w.degree,
        "signature": [list(row) for row in w.signature.counts],
        "first": multiset_to_rows(w.first),
        "second": multiset_to_rows(w.second),
    }


def witness_from_json(group: Group, n: int, data: dict) -> Witness:
    first = multiset_from_rows(group, n, data["first"])
    second = multiset_from_rows(group, n, data["second"])
    sig = ColumnSignature(
        counts=tuple(tuple(int(c) for c in row) for row in data["signature"])
    )
    if signature(first) != sig or signature(second) != sig:
        raise InvalidFiberError("witness multisets do not match the stored signature")
    return Witness(degree=int(data["degree"]), signature=sig, first=first, second=second)


def report_to_json(report: CertificationReport, *, include_elapsed: bool = True) -> dict:
    data = {
        "format": 1,
        "group": group_to_json(report.group),
        "n": report.n,
        "d_max": report.d_max,
        "m": report.m,
        "per_degree": [
            {
                "degree": s.degree,
                "fiber_count": s.fiber_count,
                "multiset_count": s.multiset_count,
                "disconnected_count": s.disconnected_count,
            }
            for s in report.per_degree
        ],
        "witnesses": [witness_to_json(w) for w in report.witnesses],
        "verdict": report.verdict,
        "statement": report.statement,
    }
    if include_elapsed:
        data["elapsed_ms"] = report.elapsed_ms
    return data


def report_from_json(data: dict) -> CertificationReport:
    group = group_from_json(data["group"])
    n = int(data["n"])
    return CertificationReport(
        group=group,
        n=n,
        d_max=int(data["d_max"]),
        m=int(data["m"]),
        per_degree=tuple(
            DegreeStats(
                degree=int(s["degree"]),
                fiber_count=int(s["fiber_count"]),
                multiset_count=int(s["multiset_count"]),
                disconnected_count=int(s["disconnected_count"]),
            )
            for s in data["per_degree"]
        ),
        witnesses=tuple(witness_from_json(group, n, w) for w in data["witnesses"]),
        verdict=str(data["verdict"]),
        statement=str(data["statement"]),
        elapsed_ms=int(data.get("elapsed_ms", 0)),
    )
