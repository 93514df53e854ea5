import math
from collections import Counter
from random import Random

import numpy as np
import pytest
from scipy.stats import chisquare

from infowalk.app_graph import CsrGraph, powerlaw_graph, with_random_weights
from infowalk.app_partition import PartitionAssignment, partition_hash, partition_stream
from infowalk.app_sampler import (
    Corpus,
    MessageCodec,
    NextHopSampler,
    WalkerMessage,
    WalkStrategy,
    huge_acceptance,
    node2vec_weight,
    read_corpus,
    run_walks,
)
from infowalk.app_sampler.messages import MODE_FIXED, MODE_FULL, MODE_INCREMENTAL
from infowalk.app_stats import WalkInfoState


def halves(g: CsrGraph, m: int = 2) -> PartitionAssignment:
    owner = (np.arange(g.node_count) * m // max(g.node_count, 1)).astype(np.int64)
    return PartitionAssignment(owner=owner, sizes=np.bincount(owner, minlength=m), m=m)


def crossings(walks, owner) -> int:
    return sum(1 for w in walks for a, b in zip(w, w[1:]) if owner[a] != owner[b])


# --- acceptance rules ---

def test_huge_acceptance_example():
    # deg(0) = 4, deg(1) = 2, common neighbor {2}
    g = CsrGraph.from_edges([0, 0, 0, 0, 1], [1, 2, 3, 4, 2])
    assert huge_acceptance(g, 0, 1) == pytest.approx(math.tanh(2 / 3))
    assert huge_acceptance(g, 0, 1) == pytest.approx(0.5827, abs=1e-4)


def test_huge_acceptance_equal_degrees_without_common_neighbors(path_graph):
    # deg(1) = deg(2) = 2, no common neighbors
    assert huge_acceptance(path_graph, 1, 2) == pytest.approx(math.tanh(1 / 2))


def test_huge_acceptance_inside_triangle():
    # deg(0) = deg(1) = 2 with one common neighbor
    k3 = CsrGraph.from_edges([0, 0, 1], [1, 2, 2])
    prob = huge_acceptance(k3, 0, 1)
    assert 0 < prob < 1
    assert prob == pytest.approx(math.tanh(1.0))


def test_huge_acceptance_scales_with_weight():
    g = CsrGraph.from_edges([0, 1], [1, 2], [2.0, 1.0])
    assert huge_acceptance(g, 0, 1) == pytest.approx(math.tanh(2.0 * 2.0))


def test_node2vec_weight_table():
    assert node2vec_weight(0, 4, 1) == 0.25
    assert node2vec_weight(1, 4, 1) == 1.0
    assert node2vec_weight(2, 1, 2) == 0.5
    assert {node2vec_weight(d, 1, 1) for d in (0, 1, 2)} == {1.0}
    with pytest.raises(ValueError):
        node2vec_weight(3, 1, 1)


def test_node2vec_strategy_requires_positive_parameters():
    with pytest.raises(ValueError):
        WalkStrategy(kind="node2vec", p=0.0)


def test_node2vec_next_hop_distribution():
    # t = 0, u = 1; from u: 0 returns (1/p), 2 neighbors t (1), 3 moves away (1/q)
    g = CsrGraph.from_edges([0, 1, 1, 0], [1, 2, 3, 2])
    sampler = NextHopSampler(g, WalkStrategy(kind="node2vec", p=0.5, q=2.0))
    rng = Random(7)
    draws = Counter(sampler.choose(1, 0, rng) for _ in range(20000))
    observed = [draws[0], draws[2], draws[3]]
    weights = np.array([2.0, 1.0, 0.5])
    expected = weights / weights.sum() * sum(observed)
    assert chisquare(observed, expected).pvalue > 1e-4


def test_deepwalk_weighted_next_hop_distribution():
    g = CsrGraph.from_edges([0, 0, 0], [1, 2, 3], [1.0, 2.0, 4.0])
    sampler = NextHopSampler(g, WalkStrategy(kind="deepwalk"))
    rng = Random(3)
    draws = Counter(sampler.choose(0, None, rng) for _ in range(20000))
    observed = [draws[1], draws[2], draws[3]]
    expected = np.array([1.0, 2.0, 4.0]) / 7.0 * sum(observed)
    assert chisquare(observed, expected).pvalue > 1e-4


def test_certain_acceptance_takes_first_candidate():
    g = CsrGraph.from_edges([0, 0, 0], [1, 2, 3])
    sampler = NextHopSampler(g, WalkStrategy(kind="deepwalk"))
    a, b = Random(1), Random(1)
    assert sampler.choose(0, None, a) == [1, 2, 3][b.randrange(3)]


def test_isolated_node_has_no_next_hop():
    g = CsrGraph.from_edges([0], [1], node_count=3)
    assert NextHopSampler(g, WalkStrategy()).choose(2, None, Random(0)) is None


# --- wire format ---

def test_message_sizes():
    assert MessageCodec(MODE_INCREMENTAL).message_size() == 80
    assert MessageCodec(MODE_INCREMENTAL, with_prev=True).message_size() == 88
    assert MessageCodec(MODE_FIXED).message_size() == 24
    assert MessageCodec(MODE_FIXED, with_prev=True).message_size() == 32
    full = MessageCodec(MODE_FULL)
    assert full.message_size(80) == 24 + 8 * 80
    assert full.message_size(80) / MessageCodec(MODE_INCREMENTAL).message_size() == pytest.approx(8.3)


def test_incremental_message_is_constant_size():
    codec = MessageCodec(MODE_INCREMENTAL)
    state = WalkInfoState.start()
    for n_before in [0, 0, 1, 2, 0, 3]:
        state = state.advance(n_before)
        payload = codec.encode(WalkerMessage(walker_id=9, steps=state.L, node_id=4, info=state))
        assert len(payload) == 80
        decoded = codec.decode(payload)
        assert decoded.info.as_tuple() == state.as_tuple()
        assert decoded.steps == decoded.info.L


def test_full_message_carries_path():
    codec = MessageCodec(MODE_FULL, with_prev=True)
    msg = WalkerMessage(walker_id=1, steps=3, node_id=5, path=[4, 2, 4])
    payload = codec.encode(msg)
    assert len(payload) == 24 + 8 * 3
    assert codec.decode(payload).path == [4, 2, 4]


def test_codec_rejects_inconsistent_messages():
    codec = MessageCodec(MODE_INCREMENTAL)
    with pytest.raises(ValueError):
        codec.encode(WalkerMessage(walker_id=1, steps=2, node_id=0, info=WalkInfoState.start()))
    with pytest.raises(ValueError):
        codec.decode(b"\x00" * 30)
    with pytest.raises(ValueError):
        MessageCodec(MODE_FIXED, with_prev=True).encode(WalkerMessage(walker_id=1, steps=2, node_id=0))


# --- walk engine ---

def test_single_machine_sends_no_messages(small_powerlaw):
    parts = partition_hash(small_powerlaw, 1)
    corpus, report = run_walks(small_powerlaw, parts, WalkStrategy(), seed=1)
    assert report.total_messages == 0 and report.total_bytes == 0
    assert report.local_steps[0] == sum(len(w) - 1 for w in corpus.walks)


def test_path_graph_crossings_are_exact():
    g = CsrGraph.from_edges(list(range(9)), list(range(1, 10)))
    parts = halves(g)
    corpus, report = run_walks(g, parts, WalkStrategy(kind="deepwalk"), seed=3)
    expected = crossings(corpus.walks, parts.owner)
    assert expected > 0
    assert report.total_messages == expected
    assert report.total_bytes == 80 * expected


def test_node2vec_messages_carry_previous_node(small_powerlaw):
    parts = partition_hash(small_powerlaw, 3)
    strategy = WalkStrategy(kind="node2vec", p=0.5, q=2.0)
    corpus, report = run_walks(small_powerlaw, parts, strategy, seed=2)
    assert report.total_messages == crossings(corpus.walks, parts.owner)
    assert report.total_bytes == 88 * report.total_messages


def test_fixed_configuration_walk_counts(small_powerlaw):
    strategy = WalkStrategy(kind="deepwalk", fixed_length=20, walks_per_node=3)
    parts = partition_hash(small_powerlaw, 2)
    corpus, report = run_walks(small_powerlaw, parts, strategy, seed=0)
    assert len(corpus.walks) == 3 * small_powerlaw.node_count
    assert report.rounds == 3
    assert all(len(w) == 20 for w in corpus.walks)
    assert report.total_bytes == 24 * report.total_messages
    # one walk per source node per round
    for r in range(3):
        sources = sorted(w[0] for w in corpus.walks[r * 300:(r + 1) * 300])
        assert sources == list(range(300))


def test_information_centric_walks_are_shorter(small_powerlaw):
    parts = partition_hash(small_powerlaw, 2)
    corpus, report = run_walks(small_powerlaw, parts, WalkStrategy(), mu=0.995, delta=0.001, seed=4)
    assert corpus.mean_length < 80
    assert min(len(w) for w in corpus.walks) >= 2
    assert report.rounds >= 2
    assert len(report.divergence) == report.rounds
    assert corpus.stats.total_ocn == sum(len(w) for w in corpus.walks)


def test_corpus_does_not_depend_on_partition(small_powerlaw):
    strategy = WalkStrategy()
    a, _ = run_walks(small_powerlaw, partition_hash(small_powerlaw, 1), strategy, seed=8)
    b, _ = run_walks(small_powerlaw, partition_hash(small_powerlaw, 4), strategy, seed=8, threads=4)
    assert a.walks == b.walks


def test_same_seed_same_corpus(small_powerlaw):
    parts = partition_stream(small_powerlaw, 3, seed=0)
    a, ra = run_walks(small_powerlaw, parts, WalkStrategy(), seed=5, threads=3)
    b, rb = run_walks(small_powerlaw, parts, WalkStrategy(), seed=5, threads=3)
    assert a.to_text() == b.to_text()
    assert ra.to_frame().equals(rb.to_frame())


def test_full_path_mode_matches_incremental(small_powerlaw):
    parts = partition_hash(small_powerlaw, 3)
    inc, inc_report = run_walks(small_powerlaw, parts, WalkStrategy(), seed=6)
    full, full_report = run_walks(small_powerlaw, parts, WalkStrategy(incremental=False), seed=6)
    assert inc.walks == full.walks
    assert inc_report.total_messages == full_report.total_messages
    assert inc_report.total_bytes == 80 * inc_report.total_messages
    # a message entering position i carries the i nodes before it
    expected = sum(24 + 8 * i for w in full.walks for i in range(1, len(w)) if parts.owner[w[i - 1]] != parts.owner[w[i]])
    assert full_report.total_bytes == expected


def test_directed_sink_ends_walk():
    g = CsrGraph.from_edges([0, 1], [1, 2], directed=True)
    corpus, _ = run_walks(g, partition_hash(g, 2), WalkStrategy(kind="deepwalk", fixed_length=10, walks_per_node=1))
    assert corpus.walks == [[0, 1, 2], [1, 2], [2]]


def test_weighted_graph_walks(small_powerlaw):
    g = with_random_weights(small_powerlaw, seed=1)
    corpus, _ = run_walks(g, partition_hash(g, 2), WalkStrategy(), seed=1)
    for walk in corpus.walks[:50]:
        assert all(g.has_edge(a, b) for a, b in zip(walk, walk[1:]))


def test_empty_graph_gives_empty_corpus():
    g = CsrGraph.empty()
    corpus, report = run_walks(g, partition_hash(g, 2), WalkStrategy())
    assert corpus.walks == [] and report.walks == 0


def test_corpus_file_round_trip(tmp_path, small_powerlaw):
    corpus, _ = run_walks(small_powerlaw, partition_hash(small_powerlaw, 2), WalkStrategy(), seed=2)
    path = tmp_path / "corpus.txt"
    path.write_text(corpus.to_text())
    again = read_corpus(str(path), small_powerlaw.node_count)
    assert again.walks == corpus.walks
    assert np.array_equal(again.stats.ocn, corpus.stats.ocn)
    with pytest.raises(ValueError):
        Corpus.from_text("0 1 999\n", small_powerlaw.node_count)


def test_empty_machine_idles_without_changing_the_corpus(small_powerlaw):
    two = partition_hash(small_powerlaw, 2)
    three = PartitionAssignment(owner=two.owner.copy(), sizes=np.append(two.sizes, 0), m=3)
    corpus_two, report_two = run_walks(small_powerlaw, two, WalkStrategy(fixed_length=10, walks_per_node=2), seed=4)
    corpus_three, report_three = run_walks(small_powerlaw, three, WalkStrategy(fixed_length=10, walks_per_node=2), seed=4)
    assert corpus_three.walks == corpus_two.walks
    assert report_three.local_steps[2] == 0 and report_three.msgs_sent[2] == 0
    assert report_three.total_messages == report_two.total_messages


@pytest.mark.slow
def test_information_centric_beats_routine_configuration():
    g = powerlaw_graph(10_000, avg_degree=10, seed=0)
    parts = partition_hash(g, 4)
    corpus, report = run_walks(g, parts, WalkStrategy(), mu=0.995, delta=0.001, seed=0, threads=4)
    routine, routine_report = run_walks(g, parts, WalkStrategy(fixed_length=80, walks_per_node=10), seed=0, threads=4)
    assert corpus.mean_length < routine.mean_length <= 80
    assert corpus.stats.total_ocn < routine.stats.total_ocn
    assert report.rounds <= routine_report.rounds


@pytest.mark.slow
def test_locality_aware_partition_cuts_messages():
    g = powerlaw_graph(10_000, avg_degree=10, seed=0)
    mpgp = partition_stream(g, 4, gamma=2.0, order="dfs-degree")
    _, mpgp_report = run_walks(g, mpgp, WalkStrategy(), seed=0, threads=4)
    _, hash_report = run_walks(g, partition_hash(g, 4), WalkStrategy(), seed=0, threads=4)
    assert mpgp_report.total_messages <= 0.8 * hash_report.total_messages
