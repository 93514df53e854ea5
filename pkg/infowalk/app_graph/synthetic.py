# File: infowalk/app_graph/synthetic.py
import networkx as nx
import numpy as np

from .graph_store import CsrGraph


def from_networkx(nx_graph: nx.Graph, weight: str = None) -> CsrGraph:
    """Converts a networkx graph with integer node labels 0..n-1."""
    n = nx_graph.number_of_nodes()
    edges = list(nx_graph.edges(data=weight, default=1.0)) if weight else list(nx_graph.edges())
    if not edges:
        return CsrGraph.from_edges([], [], node_count=n, directed=nx_graph.is_directed())
    src = np.fromiter((e[0] for e in edges), dtype=np.int64, count=len(edges))
    dst = np.fromiter((e[1] for e in edges), dtype=np.int64, count=len(edges))
    wts = np.fromiter((e[2] for e in edges), dtype=np.float64, count=len(edges)) if weight else None
    return CsrGraph.from_edges(src, dst, wts, node_count=n, directed=nx_graph.is_directed())


def powerlaw_graph(n: int, avg_degree: int = 10, seed: int = 0) -> CsrGraph:
    """
    Connected graph with a power-law degree tail (preferential attachment).
    Each arriving node attaches avg_degree / 2 edges.
    """
    m = max(1, avg_degree // 2)
    if n <= m:
        return from_networkx(nx.complete_graph(n))
    return from_networkx(nx.barabasi_albert_graph(n, m, seed=seed))


def clustered_powerlaw_graph(n: int, blocks: int = 4, avg_degree: int = 10, mix: float = 0.05, seed: int = 0) -> CsrGraph:
    """
    Power-law blocks joined by random inter-block edges (a mix share of the
    total), with node ids shuffled so the blocks are not id-contiguous.
    """
    rng = np.random.default_rng(seed)
    sizes = [len(chunk) for chunk in np.array_split(np.arange(n), blocks)]
    g = nx.disjoint_union_all(
        nx.barabasi_albert_graph(size, max(1, avg_degree // 2), seed=seed + b) for b, size in enumerate(sizes)
    )
    bridges = int(mix * g.number_of_edges()) if blocks > 1 else 0
    block_of = np.repeat(np.arange(blocks), sizes)
    while bridges > 0:
        u, v = (int(x) for x in rng.integers(0, n, size=2))
        if block_of[u] != block_of[v] and not g.has_edge(u, v):
            g.add_edge(u, v)
            bridges -= 1
    g = nx.relabel_nodes(g, dict(enumerate(rng.permutation(n).tolist())))
    return from_networkx(g)


def two_cliques(k: int, bridge: bool = False) -> CsrGraph:
    """Two k-cliques on ids [0, k) and [k, 2k); optionally joined by one edge."""
    g = nx.disjoint_union(nx.complete_graph(k), nx.complete_graph(k))
    if bridge:
        g.add_edge(k - 1, k)
    return from_networkx(g)


def with_random_weights(g: CsrGraph, low: float = 1.0, high: float = 5.0, seed: int = 0) -> CsrGraph:
    """
    Same topology with weights drawn uniformly from [low, high). Both copies
    of an undirected edge receive the same weight.
    """
    rng = np.random.default_rng(seed)
    src, dst = g.edge_pairs()
    keep = np.ones(src.size, dtype=bool) if g.directed else src <= dst
    src, dst = src[keep], dst[keep]
    weights = rng.uniform(low, high, size=src.size)
    return CsrGraph.from_edges(src, dst, weights, node_count=g.node_count, directed=g.directed)
