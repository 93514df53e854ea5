import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from infowalk.app_graph import CsrGraph, clustered_powerlaw_graph, powerlaw_graph
from infowalk.app_partition import (
    PartitionAssignment,
    PartitionMembers,
    assign_node,
    balance_factor,
    edge_cut,
    normalize_order,
    partition_graph,
    partition_hash,
    partition_parallel,
    partition_stream,
    proximity_first,
    proximity_second,
    read_partition,
    stream_order,
)
from infowalk.app_partition.partition_manager import _StreamState

random_graphs = st.builds(
    lambda n, edges: CsrGraph.from_edges([u % n for u, _ in edges], [v % n for _, v in edges], node_count=n),
    st.integers(min_value=1, max_value=40),
    st.lists(st.tuples(st.integers(0, 1000), st.integers(0, 1000)), max_size=120),
)


def members(*ids) -> PartitionMembers:
    part = PartitionMembers(resort_every=2)
    for v in ids:
        part.add(v)
    return part


def state_with(g: CsrGraph, m: int, gamma: float, placed) -> _StreamState:
    state = _StreamState(np.full(g.node_count, -1, dtype=np.int64), m, gamma)
    for i, ids in enumerate(placed):
        for v in ids:
            state.owner[v] = i
            state.sizes[i] += 1
            state.members[i].add(v)
    return state


# --- proximity and balance ---

def test_proximity_first_examples():
    g = CsrGraph.from_edges([0, 0, 0], [1, 2, 3], node_count=6)
    assert proximity_first(g, 0, members(2, 3, 5)) == 2
    assert proximity_first(g, 0, members()) == 0
    weighted = CsrGraph.from_edges([0, 0], [1, 2], [0.5, 2.0])
    assert proximity_first(weighted, 0, members(1, 2)) == pytest.approx(2.5)


def test_proximity_second_examples():
    triangle = CsrGraph.from_edges([0, 0, 1], [1, 2, 2])
    assert proximity_second(triangle, 0, members(1)) == 1
    assert proximity_second(triangle, 0, members()) == 0
    star = CsrGraph.from_edges([0, 0, 0], [1, 2, 3])
    assert proximity_second(star, 0, members(1, 2, 3)) == 0


def test_proximity_second_uses_common_neighbor_cache():
    triangle = CsrGraph.from_edges([0, 0, 1], [1, 2, 2])
    cm = {}
    proximity_second(triangle, 0, members(1, 2), cm)
    assert cm == {1: 1, 2: 1}


def test_membership_sees_pending_and_sorted_ids():
    part = PartitionMembers(resort_every=3)
    for v in [9, 1, 5, 7]:
        part.add(v)
    assert len(part) == 4
    assert part.common_with(np.array([1, 2, 5, 7, 9])).tolist() == [1, 5, 7, 9]


def test_balance_factor_examples():
    assert balance_factor([3, 3, 3], 1, 1.0) == pytest.approx(0.0)
    assert balance_factor([2, 0], 0, 2.0) == pytest.approx(0.0)
    assert balance_factor([2, 0], 1, 2.0) == pytest.approx(1.0)
    assert balance_factor([0, 0, 0], 2, 2.0) == 1.0


def test_balance_factor_decreases_as_partition_grows():
    assert balance_factor([4, 3], 0, 2.0) < balance_factor([3, 3], 0, 2.0)


# --- assignment ---

def test_first_node_goes_to_partition_zero():
    g = powerlaw_graph(20, avg_degree=4, seed=0)
    state = state_with(g, 3, 2.0, [[], [], []])
    assert assign_node(g, 7, state) == 0
    assert state.sizes.tolist() == [1, 0, 0]


def test_node_follows_its_neighbors():
    g = CsrGraph.from_edges([0, 0, 0], [1, 2, 3], node_count=7)
    state = state_with(g, 2, 2.0, [[4, 5, 6], [1, 2, 3]])
    assert assign_node(g, 0, state) == 1


def test_overloaded_partition_loses_its_neighbors():
    g = CsrGraph.from_edges([0, 0, 0], [1, 2, 3], node_count=7)
    state = state_with(g, 2, 1.0, [[4], [1, 2, 3]])
    assert assign_node(g, 0, state) == 0


def test_ties_go_to_least_loaded_partition():
    g = CsrGraph.from_edges([], [], node_count=6)
    state = state_with(g, 3, 2.0, [[0, 1], [2], [3, 4]])
    assert assign_node(g, 5, state) == 1


def test_assigning_twice_is_rejected():
    g = CsrGraph.from_edges([0], [1])
    state = state_with(g, 2, 2.0, [[0], []])
    with pytest.raises(ValueError):
        assign_node(g, 0, state)


# --- stream orders ---

@pytest.mark.parametrize("kind", ["random", "bfs", "dfs", "bfs-degree", "dfs_degree"])
def test_stream_order_is_a_permutation(kind, small_powerlaw):
    order = stream_order(small_powerlaw, kind, seed=1)
    assert sorted(order.tolist()) == list(range(small_powerlaw.node_count))


def test_degree_orders_start_at_the_hub():
    # star centre 3 plus a separate edge 5-6
    g = CsrGraph.from_edges([3, 3, 3, 5], [0, 1, 2, 6])
    assert stream_order(g, "dfs-degree")[0] == 3
    assert stream_order(g, "bfs-degree").tolist()[:4] == [3, 0, 1, 2]
    assert stream_order(g, "bfs").tolist() == [0, 3, 1, 2, 4, 5, 6]


def test_unknown_order_is_rejected():
    with pytest.raises(ValueError):
        normalize_order("zigzag")


# --- whole-graph partitioners ---

def test_single_machine_takes_everything(small_powerlaw):
    parts = partition_stream(small_powerlaw, 1)
    assert parts.sizes.tolist() == [small_powerlaw.node_count]
    assert edge_cut(small_powerlaw, parts) == 0


@settings(max_examples=100, deadline=None)
@given(random_graphs, st.integers(min_value=1, max_value=6), st.sampled_from(["random", "dfs-degree", "bfs-degree"]))
def test_exact_balance_at_unit_slack(g, m, order):
    parts = partition_stream(g, m, gamma=1.0, order=order)
    assert parts.complete
    assert parts.sizes.max() - parts.sizes.min() <= 1


@settings(max_examples=40, deadline=None)
@given(random_graphs, st.integers(min_value=1, max_value=5))
def test_slack_bounds_partition_size(g, m):
    parts = partition_stream(g, m, gamma=2.0)
    assert parts.complete
    assert parts.sizes.max() <= 2.0 * g.node_count / m + 1


def test_locality_beats_hash_on_clustered_graph():
    g = clustered_powerlaw_graph(400, blocks=4, avg_degree=8, seed=2)
    mpgp = partition_stream(g, 4, gamma=2.0, order="dfs-degree")
    assert edge_cut(g, mpgp) < 0.8 * edge_cut(g, partition_hash(g, 4))


def test_one_segment_equals_sequential(small_powerlaw):
    seq = partition_stream(small_powerlaw, 3, order="bfs-degree")
    par = partition_parallel(small_powerlaw, 3, segments=1, order="bfs-degree")
    assert np.array_equal(seq.owner, par.owner)


def test_parallel_segments_are_deterministic_and_balanced(small_powerlaw):
    a = partition_parallel(small_powerlaw, 4, gamma=2.0, segments=4, threads=4)
    b = partition_parallel(small_powerlaw, 4, gamma=2.0, segments=4, threads=2)
    assert np.array_equal(a.owner, b.owner)
    assert a.complete
    assert a.sizes.max() <= 2.0 * small_powerlaw.node_count / 4 + 4


def test_hash_partition_examples():
    g = CsrGraph.from_edges([], [], node_count=10)
    assert partition_hash(g, 2).sizes.tolist() == [5, 5]
    assert partition_hash(g, 4).owner[7] == 3
    assert np.ptp(partition_hash(g, 3).sizes) <= 1


def test_partition_graph_dispatch(small_powerlaw):
    assert partition_graph(small_powerlaw, "hash", 2).method == "hash"
    assert partition_graph(small_powerlaw, "mpgp-parallel", 2, segments=2).method == "mpgp-parallel"
    with pytest.raises(ValueError):
        partition_graph(small_powerlaw, "metis", 2)


def test_partition_file_round_trip(tmp_path, small_powerlaw):
    parts = partition_stream(small_powerlaw, 3)
    path = tmp_path / "partition.txt"
    path.write_text(parts.to_text())
    again = read_partition(str(path), small_powerlaw.node_count, 3)
    assert np.array_equal(again.owner, parts.owner)
    assert again.sizes.tolist() == parts.sizes.tolist()
    assert read_partition(str(path), small_powerlaw.node_count).m == 3
    with pytest.raises(ValueError, match="written for 3 machines"):
        read_partition(str(path), small_powerlaw.node_count, 2)


def test_partition_file_keeps_empty_machines(tmp_path):
    parts = PartitionAssignment(owner=np.array([0, 1, 0, 1]), sizes=np.array([2, 2, 0]), m=3)
    assert parts.to_text().splitlines()[0] == "# machines 3"
    path = tmp_path / "partition.txt"
    path.write_text(parts.to_text())
    again = read_partition(str(path), 4)
    assert again.m == 3
    assert again.sizes.tolist() == [2, 2, 0]
    with pytest.raises(ValueError):
        read_partition(str(path), 4, 2)
    with pytest.raises(ValueError):
        read_partition(str(path), 4, 4)


def test_summary_frame_columns(small_powerlaw):
    frame = partition_hash(small_powerlaw, 2).summary_frame(small_powerlaw)
    assert list(frame.columns) == ["machine_id", "size", "edge_cut", "seconds"]
