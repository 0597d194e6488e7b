from __future__ import annotations

import random

import pytest

import flowcert as fc
from flowcert.certify import PAIRWISE_LIMIT, _fiber_verdict
from flowcert.errors import (
    CapacityError,
    IncompatibilityError,
    InvalidFiberError,
    PreconditionError,
)

Z2 = fc.make_group([2])
Z3 = fc.make_group([3])

# lowest disconnected locus for Z3 under quadric moves, frozen after the
# generative-edge oracle confirmed the disconnection
WITNESS_Z3_N3 = {
    "signature": ((1, 1, 1), (1, 1, 1), (1, 1, 1)),
    "first": [[0, 0, 0], [1, 1, 1], [2, 2, 2]],
    "second": [[0, 1, 2], [1, 2, 0], [2, 0, 1]],
}
WITNESS_Z3_N4 = {
    "signature": ((0, 0, 3), (1, 1, 1), (1, 1, 1), (1, 1, 1)),
    "first": [[2, 0, 0, 1], [2, 1, 1, 2], [2, 2, 2, 0]],
    "second": [[2, 0, 1, 0], [2, 1, 2, 1], [2, 2, 0, 2]],
}


def walkthrough_pair():
    m1 = fc.multiset_from_rows(
        Z2, 6, [[1, 1, 1, 1, 1, 1], [0, 0, 0, 0, 0, 0], [1, 1, 1, 1, 0, 0]]
    )
    m2 = fc.multiset_from_rows(
        Z2, 6, [[0, 1, 0, 1, 0, 0], [1, 1, 1, 0, 1, 0], [1, 0, 1, 1, 0, 1]]
    )
    return m1, m2


def test_singleton_fiber_is_connected():
    m = fc.make_multiset([fc.make_flow(Z2, [0, 1, 1])])
    comps = fc.fiber_connected_under([m], 2)
    assert comps.connected
    assert comps.labels() == {m: 0}


def test_complement_pairs_fiber_connected():
    fiber = fc.enumerate_fiber(fc.ColumnSignature(((1, 1),) * 4), Z2, 4)
    assert len(fiber) == 4
    comps = fc.fiber_connected_under(fiber, 2)
    assert comps.connected
    # every pair of distinct degree-2 multisets in one fiber is one move apart
    assert len(fc.fiber_edges(fiber, 2)) == 6


def test_walkthrough_endpoints_share_a_component():
    m1, m2 = walkthrough_pair()
    fiber = fc.enumerate_fiber(fc.signature(m1), Z2, 6)
    comps = fc.fiber_connected_under(fiber, 2)
    labels = comps.labels()
    assert labels[m1] == labels[m2]


def test_fiber_connected_under_input_validation():
    a = fc.make_multiset([fc.make_flow(Z2, [0, 0, 0])])
    b = fc.make_multiset([fc.make_flow(Z2, [0, 1, 1])])
    with pytest.raises(InvalidFiberError):
        fc.fiber_connected_under([a, b], 2)
    with pytest.raises(InvalidFiberError):
        fc.fiber_connected_under([], 2)
    with pytest.raises(PreconditionError):
        fc.fiber_connected_under([a], 1)


@pytest.mark.parametrize(
    "group,n,d_max,m",
    [(Z2, 4, 3, 2), (Z3, 3, 4, 2), (Z3, 3, 4, 3)],
    ids=["z2-n4", "z3-n3-m2", "z3-n3-m3"],
)
def test_edge_rule_matches_generative_oracle(group, n, d_max, m):
    for d in range(2, d_max + 1):
        for _, fiber in fc.enumerate_all_fibers(group, n, d):
            assert fc.fiber_edges(fiber, m) == fc.fiber_edges_generative(fiber, m)


def test_bucket_union_matches_pairwise_components():
    # pairwise_limit=0 forces the shared-submultiset union path
    for group, n, d_max, m in [(Z2, 4, 4, 2), (Z3, 3, 4, 2)]:
        for d in range(2, d_max + 1):
            for _, fiber in fc.enumerate_all_fibers(group, n, d):
                direct = fc.fiber_connected_under(fiber, m)
                bucketed = fc.fiber_connected_under(fiber, m, pairwise_limit=0)
                assert direct == bucketed


def test_certify_z2_n4_verified():
    report = fc.certify_degree(Z2, 4, 4, 2)
    assert report.verdict == "verified"
    assert report.witnesses == ()
    assert [s.degree for s in report.per_degree] == [2, 3, 4]
    assert [s.multiset_count for s in report.per_degree] == [36, 120, 330]
    assert "verified up to degree 4 for n=4" in report.statement


def test_certify_z3_n4_cubics_verified():
    report = fc.certify_degree(Z3, 4, 4, 3)
    assert report.verdict == "verified"
    assert report.witnesses == ()


def test_certify_z3_quadrics_fail_at_degree_three():
    report = fc.certify_degree(Z3, 3, 4, 2)
    assert report.verdict == "not-verified"
    assert len(report.witnesses) == 1
    w = report.witnesses[0]
    assert w.degree == 3
    assert w.signature.counts == WITNESS_Z3_N3["signature"]
    # default sweep stops after the first failing degree
    assert [s.degree for s in report.per_degree] == [2, 3]
    assert report.per_degree[-1].disconnected_count > 0


def test_certify_find_all_keeps_sweeping():
    report = fc.certify_degree(Z3, 3, 4, 2, find_all=True)
    assert [s.degree for s in report.per_degree] == [2, 3, 4]
    assert len(report.witnesses) == sum(
        s.disconnected_count for s in report.per_degree
    )


def test_certify_monotone_in_move_bound():
    for group, n, d_max in [(Z2, 4, 4), (Z3, 3, 4)]:
        verdicts = {
            m: fc.certify_degree(group, n, d_max, m).verdict
            for m in (2, 3, 4)
        }
        for m in (2, 3):
            if verdicts[m] == "verified":
                assert verdicts[m + 1] == "verified"


def test_certify_deterministic_across_parallelism():
    sequential = fc.certify_degree(Z3, 3, 4, 2, find_all=True, threads=1)
    parallel = fc.certify_degree(Z3, 3, 4, 2, find_all=True, threads=4)
    assert sequential == parallel
    assert fc.report_to_json(sequential, include_elapsed=False) == fc.report_to_json(
        parallel, include_elapsed=False
    )


def test_certify_repeated_runs_identical():
    a = fc.certify_degree(Z2, 5, 4, 2)
    b = fc.certify_degree(Z2, 5, 4, 2)
    assert a == b


def test_certify_parameter_validation():
    with pytest.raises(PreconditionError):
        fc.certify_degree(Z2, 3, 4, 1)
    with pytest.raises(PreconditionError):
        fc.certify_degree(Z2, 3, 2, 3)
    with pytest.raises(PreconditionError):
        fc.certify_degree(Z2, 3, 4, 2, threads=0)


def test_certify_capacity_error_names_the_degree():
    with pytest.raises(CapacityError) as err:
        fc.certify_degree(Z2, 6, 4, 2, sweep_cap=1000)
    assert "degree 3" in str(err.value)
    assert err.value.required > 1000


def test_report_json_round_trip():
    report = fc.certify_degree(Z3, 3, 4, 2, find_all=True)
    data = fc.report_to_json(report)
    rebuilt = fc.report_from_json(data)
    assert rebuilt == report
    # elapsed is excluded from equality so the deterministic payload survives
    stripped = fc.report_from_json(fc.report_to_json(report, include_elapsed=False))
    assert stripped == report


def test_find_move_path_walkthrough():
    m1, m2 = walkthrough_pair()
    path = fc.find_move_path(m1, m2, 2)
    assert len(path) == 2
    assert all(mv.degree <= 2 for mv in path)
    intermediate = fc.apply_move(m1, path[0])
    assert fc.compatible(intermediate, m1)
    assert fc.compatible(intermediate, m2)
    assert fc.apply_move(intermediate, path[1]) == m2


def test_find_move_path_identity_and_errors():
    m1, m2 = walkthrough_pair()
    assert fc.find_move_path(m1, m1, 2) == []
    incompatible = fc.make_multiset(
        [fc.make_flow(Z2, [0, 0, 0, 0, 0, 0])] * 3
    )
    with pytest.raises(IncompatibilityError):
        fc.find_move_path(m1, incompatible, 2)


def test_find_move_path_replays_randomized():
    rng = random.Random(555)
    flows = fc.enumerate_flows(Z2, 5)
    for _ in range(50):
        d = rng.randrange(2, 5)
        a = fc.make_multiset([rng.choice(flows) for _ in range(d)])
        fiber = fc.enumerate_fiber(fc.signature(a), Z2, 5)
        b = rng.choice(fiber)
        path = fc.find_move_path(a, b, 2)
        assert path is not None, "quadric moves connect every binary fiber here"
        current = a
        for mv in path:
            assert mv.degree <= 2
            current = fc.apply_move(current, mv)
        assert current == b


def frozen_witness(group, n, fixture):
    return fc.Witness(
        degree=3,
        signature=fc.ColumnSignature(counts=fixture["signature"]),
        first=fc.multiset_from_rows(group, n, fixture["first"]),
        second=fc.multiset_from_rows(group, n, fixture["second"]),
    )


def test_find_indispensable_z3_quadrics():
    w3 = fc.find_indispensable(Z3, 3, 2, d_max=4)
    assert w3 == frozen_witness(Z3, 3, WITNESS_Z3_N3)
    w4 = fc.find_indispensable(Z3, 4, 2, d_max=3)
    assert w4 == frozen_witness(Z3, 4, WITNESS_Z3_N4)


def test_find_indispensable_clean_cases():
    assert fc.find_indispensable(Z2, 4, 2, d_max=4) is None
    assert fc.find_indispensable(Z3, 4, 3, d_max=4) is None


def test_witness_pair_connectivity_by_move_bound():
    w = frozen_witness(Z3, 3, WITNESS_Z3_N3)
    assert fc.find_move_path(w.first, w.second, 2) is None
    path = fc.find_move_path(w.first, w.second, 3)
    assert path is not None
    current = w.first
    for mv in path:
        assert mv.degree <= 3
        current = fc.apply_move(current, mv)
    assert current == w.second


def test_witness_json_round_trip():
    w = frozen_witness(Z3, 3, WITNESS_Z3_N3)
    assert fc.witness_from_json(Z3, 3, fc.witness_to_json(w)) == w


def test_fiber_verdict_is_threadsafe_shape():
    # helper contract: (signature, size, optional witness pair)
    sig = fc.ColumnSignature(counts=WITNESS_Z3_N3["signature"])
    fiber = fc.enumerate_fiber(sig, Z3, 3)
    got_sig, size, pair = _fiber_verdict((sig, fiber), 2, PAIRWISE_LIMIT)
    assert got_sig == sig and size == 3 and pair is not None
    assert pair[0] == fiber[0]
