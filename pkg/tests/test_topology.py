import pytest

from conekit.topology import (
    FundamentalCycle,
    LinkageGraph,
    TopologyError,
    cycle_space_dimension,
    default_cotree,
    fundamental_cycles,
    signed_incidence,
)

TRIANGLE = LinkageGraph.from_edges([(1, "a", "b"), (2, "b", "c"), (3, "c", "a")], base="a")
THETA = LinkageGraph.from_edges([(1, "a", "b"), (2, "a", "b"), (3, "a", "b")], base="a")


def test_cycle_space_dimension(fayet):
    assert (fayet.graph.n, fayet.graph.N) == (20, 18)
    assert cycle_space_dimension(fayet.graph) == 3
    assert cycle_space_dimension(TRIANGLE) == 1
    assert cycle_space_dimension(THETA) == 2


def test_disconnected_graph_rejected():
    g = LinkageGraph.from_edges([(1, "a", "b"), (2, "c", "d")], base="a")
    with pytest.raises(TopologyError):
        cycle_space_dimension(g)


def test_fayet_cotree_reproduces_loops(fayet):
    cycles = fundamental_cycles(fayet.graph, [8, 14, 18], orderings=fayet.loops)
    assert [c.signed() for c in cycles] == [
        tuple(range(1, 12)),
        (1, 2, 3, 4, 5, 12, 13, 14, 15, 16),
        (9, 10, 11, -16, -15, 17, 18, 19, 20),
    ]


def test_fayet_cotree_without_override_is_equivalent(fayet):
    cycles = fundamental_cycles(fayet.graph, [8, 14, 18])
    for got, want in zip(cycles, fayet.loops):
        assert got.equivalent(want)


def test_fayet_loop_membership(fayet):
    member = {j: {l for l, loop in enumerate(fayet.loops) if j in loop.joints} for j in range(1, 21)}
    expect = {}
    for j in range(1, 6):
        expect[j] = {0, 1}
    for j in range(6, 9):
        expect[j] = {0}
    for j in range(9, 12):
        expect[j] = {0, 2}
    for j in range(12, 15):
        expect[j] = {1}
    for j in (15, 16):
        expect[j] = {1, 2}
    for j in range(17, 21):
        expect[j] = {2}
    assert member == expect


def test_triangle_and_theta_cycles():
    (tri,) = fundamental_cycles(TRIANGLE, [3])
    assert tri.equivalent(FundamentalCycle.from_signed([1, 2, 3]))
    c2, c3 = fundamental_cycles(THETA, [2, 3])
    assert c2.equivalent(FundamentalCycle.from_signed([1, -2]))
    assert c3.equivalent(FundamentalCycle.from_signed([1, -3]))


def test_cycles_are_closed(fayet):
    for loop in fayet.loops:
        assert signed_incidence(fayet.graph, loop) == {}


def test_bad_cotree_rejected(fayet):
    with pytest.raises(TopologyError):
        fundamental_cycles(fayet.graph, [1, 2, 3])
    with pytest.raises(TopologyError):
        fundamental_cycles(fayet.graph, [8, 14])


def test_default_cotree(fayet):
    cotree = default_cotree(fayet.graph)
    assert cotree == [11, 16, 20]
    assert len(fundamental_cycles(fayet.graph, cotree)) == 3
