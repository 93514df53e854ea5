# File: infowalk/app_partition/stream_order.py
from collections import deque
from typing import Callable, List, Optional

import numpy as np

from infowalk.app_graph import CsrGraph

ORDERS = ("random", "bfs", "dfs", "bfs-degree", "dfs-degree")


def normalize_order(kind: str) -> str:
    kind = kind.replace("_", "-").lower()
    if kind not in ORDERS:
        raise ValueError(f"Unknown stream order '{kind}'; expected one of {ORDERS}.")
    return kind


def _traverse(g: CsrGraph, starts: np.ndarray, key: Optional[Callable[[int], tuple]], depth_first: bool) -> List[int]:
    adj = g.adjacency_lists()
    visited = [False] * g.node_count
    order: List[int] = []

    def ranked(u: int) -> List[int]:
        nbrs = [v for v in adj[u] if not visited[v]]
        if key is not None:
            nbrs.sort(key=key)
        return nbrs

    for s in starts.tolist():
        if visited[s]:
            continue
        if depth_first:
            stack = [s]
            while stack:
                u = stack.pop()
                if visited[u]:
                    continue
                visited[u] = True
                order.append(u)
                # preferred neighbor on top
                stack.extend(reversed(ranked(u)))
        else:
            visited[s] = True
            queue = deque([s])
            while queue:
                u = queue.popleft()
                order.append(u)
                for v in ranked(u):
                    visited[v] = True
                    queue.append(v)
    return order


def stream_order(g: CsrGraph, kind: str, seed: int = 0) -> np.ndarray:
    """
    The node stream fed to the partitioner; every node appears exactly once.

    Degree-guided traversals start each component at its highest-degree
    unvisited node (lowest id on ties) and expand higher-degree neighbors
    first. Plain bfs/dfs start at the lowest unvisited id and expand
    neighbors in ascending id order.
    """
    kind = normalize_order(kind)
    n = g.node_count
    if n == 0:
        return np.empty(0, dtype=np.int64)
    if kind == "random":
        return np.random.default_rng(seed).permutation(n).astype(np.int64)

    ids = np.arange(n, dtype=np.int64)
    if kind.endswith("degree"):
        deg = g.degrees()
        deg_list = deg.tolist()
        starts = np.lexsort((ids, -deg))
        key = lambda v: (-deg_list[v], v)
    else:
        starts = ids
        key = None
    order = _traverse(g, starts, key, depth_first=kind.startswith("dfs"))
    return np.asarray(order, dtype=np.int64)
