"""Multisets of flows, compatibility, column signatures, fiber enumeration.

Two multisets are compatible when every index sees the same multiset of
group elements; the per-index count matrix (the signature) is therefore the
fiber key.  Fibers are the equivalence classes of that relation and the
state space for all connectivity questions downstream.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement
from math import comb
from typing import Iterable, Iterator

from .errors import CapacityError, ShapeError
from .flows import DEFAULT_FLOW_CAP, Flow, enumerate_flows, make_flow
from .groups import Group

DEFAULT_FIBER_CAP = 1 << 22
DEFAULT_SWEEP_CAP = 1 << 27


@dataclass(frozen=True)
class FlowMultiset:
    """A canonically sorted multiset of flows of one common (group, n)."""

    group: Group
    n: int
    flows: tuple[Flow, ...]

    @property
    def degree(self) -> int:
        return len(self.flows)


@dataclass(frozen=True)
class ColumnSignature:
    """Per-index counts of group elements: n rows of ``|G|`` entries."""

    counts: tuple[tuple[int, ...], ...]

    @property
    def degree(self) -> int:
        return sum(self.counts[0])

    def flat(self) -> tuple[int, ...]:
        """Row-major flattening; the sortable fiber key."""
        return tuple(c for row in self.counts for c in row)


def make_multiset(flows: Iterable[Flow]) -> FlowMultiset:
    """Canonicalize a non-empty collection of flows into a sorted multiset."""
    fs = list(flows)
    if not fs:
        raise ShapeError("a multiset needs at least one flow")
    group = fs[0].group
    n = fs[0].n
    for f in fs[1:]:
        if f.group != group or f.n != n:
            raise ShapeError(
                f"all flows must share (group, n); found {f.group.factors} on "
                f"{f.n} against {group.factors} on {n}"
            )
    fs.sort(key=lambda f: f.values)
    return FlowMultiset(group=group, n=n, flows=tuple(fs))


def multiset_from_rows(group: Group, n: int, rows: Iterable[Iterable[int]]) -> FlowMultiset:
    """Build a multiset from rows of element codes, validating every row."""
    flows = []
    for row in rows:
        vals = tuple(int(v) for v in row)
        if len(vals) != n:
            raise ShapeError(f"expected {n} codes per row, got {len(vals)}")
        flows.append(make_flow(group, vals))
    return make_multiset(flows)


def multiset_to_rows(m: FlowMultiset) -> list[list[int]]:
    return [list(f.values) for f in m.flows]


def signature(m: FlowMultiset) -> ColumnSignature:
    """Count matrix of the multiset; equals the summed vertex embeddings."""
    order = m.group.order
    counts = [[0] * order for _ in range(m.n)]
    for f in m.flows:
        for i, v in enumerate(f.values):
            counts[i][v] += 1
    return ColumnSignature(counts=tuple(tuple(row) for row in counts))


def compatible(m1: FlowMultiset, m2: FlowMultiset) -> bool:
    """True iff the two multisets have identical per-index contents."""
    if m1.group != m2.group or m1.n != m2.n:
        raise ShapeError(
            f"shape mismatch: {m1.group.factors} on {m1.n} vs "
            f"{m2.group.factors} on {m2.n}"
        )
    if m1.degree != m2.degree:
        return False
    return signature(m1) == signature(m2)


def _check_signature(sig: ColumnSignature, group: Group, n: int) -> int:
    if len(sig.counts) != n:
        raise ShapeError(f"signature has {len(sig.counts)} rows, expected n={n}")
    degree = None
    for i, row in enumerate(sig.counts):
        if len(row) != group.order:
            raise ShapeError(
                f"signature row {i} has {len(row)} entries, expected {group.order}"
            )
        if any(c < 0 for c in row):
            raise ShapeError(f"signature row {i} has negative counts")
        total = sum(row)
        if degree is None:
            degree = total
        elif total != degree:
            raise ShapeError(
                f"signature rows sum to different degrees: {degree} vs {total} at row {i}"
            )
    if not degree:
        raise ShapeError("signature degree must be >= 1")
    return degree


def enumerate_fiber(
    sig: ColumnSignature,
    group: Group,
    n: int,
    *,
    cap: int = DEFAULT_FIBER_CAP,
    flow_cap: int = DEFAULT_FLOW_CAP,
) -> list[FlowMultiset]:
    """All degree-d multisets with the given signature, in canonical order.

    Depth-first construction: flows are tried in canonical order with
    multiplicity, pruning on the per-index remaining counts, so emitted
    multisets come out sorted without a post-pass.
    """
    degree = _check_signature(sig, group, n)
    flows = enumerate_flows(group, n, cap=flow_cap)
    remaining = [list(row) for row in sig.counts]
    chosen: list[int] = []
    found: list[tuple[int, ...]] = []

    def descend(start: int, left: int) -> None:
        if left == 0:
            found.append(tuple(chosen))
            if len(found) > cap:
                raise CapacityError(
                    f"fiber exceeds the cap of {cap} multisets",
                    required=len(found),
                    cap=cap,
                )
            return
        for j in range(start, len(flows)):
            vals = flows[j].values
            if all(remaining[i][v] > 0 for i, v in enumerate(vals)):
                for i, v in enumerate(vals):
                    remaining[i][v] -= 1
                chosen.append(j)
                descend(j, left - 1)
                chosen.pop()
                for i, v in enumerate(vals):
                    remaining[i][v] += 1

    descend(0, degree)
    return [
        FlowMultiset(group=group, n=n, flows=tuple(flows[j] for j in combo))
        for combo in found
    ]


def multiset_count(group: Group, n: int, d: int) -> int:
    """Number of degree-d multisets over all flows on n."""
    if d < 1:
        raise ShapeError(f"degree must be >= 1, got {d}")
    return comb(group.order ** (n - 1) + d - 1, d)


def enumerate_all_fibers(
    group: Group,
    n: int,
    d: int,
    *,
    cap: int = DEFAULT_SWEEP_CAP,
    flow_cap: int = DEFAULT_FLOW_CAP,
) -> Iterator[tuple[ColumnSignature, list[FlowMultiset]]]:
    """Partition all degree-d multisets by signature, ascending by fiber key.

    The capacity check runs eagerly; iteration then yields one fiber at a
    time so consumers can stream and discard.
    """
    total = multiset_count(group, n, d)
    if total > cap:
        raise CapacityError(
            f"sweep over {total} degree-{d} multisets exceeds the cap of {cap}",
            required=total,
            cap=cap,
        )
    flows = enumerate_flows(group, n, cap=flow_cap)
    return _iter_fibers(group, n, d, flows)


def _iter_fibers(
    group: Group, n: int, d: int, flows: list[Flow]
) -> Iterator[tuple[ColumnSignature, list[FlowMultiset]]]:
    order = group.order
    width = n * order
    # flat coordinate hit per flow: one increment position per index
    hits = [tuple(i * order + v for i, v in enumerate(f.values)) for f in flows]
    buckets: dict[tuple[int, ...], list[tuple[int, ...]]] = {}
    for combo in combinations_with_replacement(range(len(flows)), d):
        key = [0] * width
        for j in combo:
            for p in hits[j]:
                key[p] += 1
        buckets.setdefault(tuple(key), []).append(combo)
    for key in sorted(buckets):
        sig = ColumnSignature(
            counts=tuple(key[i * order : (i + 1) * order] for i in range(n))
        )
        yield sig, [
            FlowMultiset(group=group, n=n, flows=tuple(flows[j] for j in combo))
            for combo in buckets[key]
        ]


def fiber_to_json(sig: ColumnSignature, multisets: list[FlowMultiset]) -> dict:
    return {
        "signature": [list(row) for row in sig.counts],
        "multisets": [multiset_to_rows(m) for m in multisets],
    }


def fiber_from_json(
    group: Group, n: int, data: dict
) -> tuple[ColumnSignature, list[FlowMultiset]]:
    sig = ColumnSignature(counts=tuple(tuple(int(c) for c in row) for row in data["signature"]))
    _check_signature(sig, group, n)
    return sig, [multiset_from_rows(group, n, rows) for rows in data["multisets"]]
