# File: infowalk/app_partition/partition_manager.py
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from infowalk.app_graph import CsrGraph, common_neighbor_count, intersect_galloping

from .stream_order import normalize_order, stream_order

logger = logging.getLogger(__name__)

PARTITIONERS = ("mpgp", "mpgp-parallel", "hash")
MACHINES_HEADER = "# machines"


@dataclass
class PartitionAssignment:
    """
    owner[v] is the machine of node v (-1 while unassigned); sizes[i] the
    number of nodes on machine i.
    """
    owner: np.ndarray
    sizes: np.ndarray
    m: int
    gamma: float = float("nan")
    order: str = ""
    method: str = ""
    seconds: float = 0.0

    @classmethod
    def unassigned(cls, node_count: int, m: int, gamma: float = float("nan"), order: str = "") -> "PartitionAssignment":
        if m < 1:
            raise ValueError(f"m must be at least 1, got {m}.")
        return cls(owner=np.full(node_count, -1, dtype=np.int64), sizes=np.zeros(m, dtype=np.int64),
                   m=m, gamma=gamma, order=order)

    @property
    def node_count(self) -> int:
        return int(self.owner.size)

    @property
    def complete(self) -> bool:
        return bool(np.all(self.owner >= 0)) and int(self.sizes.sum()) == self.node_count

    def members(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.owner == i)

    def to_text(self) -> str:
        """One "node_id machine_id" line per node under a "# machines m" header."""
        header = f"{MACHINES_HEADER} {self.m}\n"
        return header + "".join(f"{v} {i}\n" for v, i in enumerate(self.owner.tolist()))

    def summary_frame(self, g: Optional[CsrGraph] = None) -> pd.DataFrame:
        frame = pd.DataFrame({"machine_id": range(self.m), "size": self.sizes})
        if g is not None:
            frame["edge_cut"] = edge_cut(g, self)
            frame["seconds"] = self.seconds
        return frame


def read_partition(path: str, node_count: int, m: Optional[int] = None) -> PartitionAssignment:
    """
    Reads a partition file. The "# machines m" header, when present, must
    agree with m; machines may legitimately own no nodes.
    """
    owner = np.full(node_count, -1, dtype=np.int64)
    declared = None
    with open(path, "r", encoding="utf-8") as f:
        for line_no, raw in enumerate(f, start=1):
            if raw.startswith(MACHINES_HEADER):
                try:
                    declared = int(raw[len(MACHINES_HEADER):])
                except ValueError as e:
                    raise ValueError(f"{path}:{line_no}: malformed machine-count header.") from e
                continue
            parts = raw.split()
            if not parts or parts[0].startswith("#"):
                continue
            if len(parts) != 2:
                raise ValueError(f"{path}:{line_no}: expected 'node_id machine_id'.")
            v, i = int(parts[0]), int(parts[1])
            if not 0 <= v < node_count or i < 0:
                raise ValueError(f"{path}:{line_no}: entry ({v}, {i}) out of range.")
            owner[v] = i
    if np.any(owner < 0):
        raise ValueError(f"{path}: {int(np.count_nonzero(owner < 0))} nodes have no machine.")
    if declared is not None:
        if m is not None and declared != m:
            raise ValueError(f"{path}: written for {declared} machines, expected {m}.")
        m = declared
    if m is not None and node_count and int(owner.max()) >= m:
        raise ValueError(f"{path}: machine id {int(owner.max())} out of range for {m} machines.")
    m = m if m is not None else (int(owner.max()) + 1 if node_count else 1)
    return PartitionAssignment(owner=owner, sizes=np.bincount(owner, minlength=m).astype(np.int64), m=m)


class PartitionMembers:
    """
    Members of one partition: a sorted id array plus a short pending list of
    recent additions, merged back into the sorted array once it grows.
    """

    def __init__(self, resort_every: int = 64):
        self._sorted = np.empty(0, dtype=np.int64)
        self._pending: List[int] = []
        self.resort_every = resort_every

    def __len__(self) -> int:
        return int(self._sorted.size) + len(self._pending)

    def add(self, v: int):
        self._pending.append(v)
        if len(self._pending) >= max(self.resort_every, int(np.sqrt(self._sorted.size))):
            self._sorted = np.union1d(self._sorted, np.asarray(self._pending, dtype=np.int64))
            self._pending = []

    def common_with(self, ids: np.ndarray) -> np.ndarray:
        """Members among a sorted id array."""
        common = intersect_galloping(ids, self._sorted, check=False)
        if self._pending:
            extra = ids[np.isin(ids, self._pending, assume_unique=True)]
            if extra.size:
                common = np.sort(np.concatenate([common, extra]))
        return common


def _neighbor_weights(g: CsrGraph, v: int, ids: np.ndarray) -> np.ndarray:
    if not g.weighted:
        return np.ones(ids.size, dtype=np.float64)
    nbrs = g.neighbors_of(v)
    return g.weights_of(v)[np.searchsorted(nbrs, ids)]


def proximity_first(g: CsrGraph, v: int, part: PartitionMembers) -> float:
    """Neighbors of v in the partition, or their total edge weight."""
    common = part.common_with(g.neighbors_of(v))
    if common.size == 0:
        return 0.0
    return float(_neighbor_weights(g, v, common).sum())


def proximity_second(g: CsrGraph, v: int, part: PartitionMembers, cm: Optional[Dict[int, int]] = None) -> float:
    """
    Common-neighbor mass between v and the partition, restricted to members
    that are neighbors of v. cm caches |N(v) ∩ N(u)| per neighbor u.
    """
    common = part.common_with(g.neighbors_of(v))
    if common.size == 0:
        return 0.0
    counts = np.empty(common.size, dtype=np.float64)
    for j, u in enumerate(common.tolist()):
        if cm is not None and u in cm:
            counts[j] = cm[u]
        else:
            counts[j] = common_neighbor_count(g, v, u)
            if cm is not None:
                cm[u] = int(counts[j])
    return float((counts * _neighbor_weights(g, v, common)).sum())


def balance_factor(sizes: Sequence[int], i: int, gamma: float) -> float:
    sizes = np.asarray(sizes)
    total = float(sizes.sum())
    if total == 0:
        return 1.0
    return 1.0 - float(sizes[i]) * sizes.size / (gamma * total)


class _StreamState:
    def __init__(self, owner: np.ndarray, m: int, gamma: float):
        self.owner = owner
        self.sizes = np.zeros(m, dtype=np.int64)
        self.members = [PartitionMembers() for _ in range(m)]
        self.m = m
        self.gamma = gamma


def assign_node(g: CsrGraph, v: int, state: _StreamState) -> int:
    """
    Places v on argmax_i (PS1 + PS2) * tau_i. Ties go to the least loaded
    partition, then the lowest index.
    """
    if state.owner[v] >= 0:
        raise ValueError(f"Node {v} is already assigned to {state.owner[v]}.")
    cm: Dict[int, int] = {}
    scores = np.empty(state.m, dtype=np.float64)
    for i in range(state.m):
        proximity = proximity_first(g, v, state.members[i]) + proximity_second(g, v, state.members[i], cm)
        scores[i] = proximity * balance_factor(state.sizes, i, state.gamma)

    candidates = np.flatnonzero(scores == scores.max())
    if candidates.size > 1:
        candidates = candidates[np.lexsort((candidates, state.sizes[candidates]))]
    best = int(candidates[0])

    state.owner[v] = best
    state.sizes[best] += 1
    state.members[best].add(v)
    return best


def _stream_segment(g: CsrGraph, nodes: np.ndarray, m: int, gamma: float) -> Tuple[np.ndarray, np.ndarray]:
    """Partitions one node stream against its own counters; returns (owner, sizes)."""
    owner = np.full(g.node_count, -1, dtype=np.int64)
    state = _StreamState(owner, m, gamma)
    for v in nodes.tolist():
        assign_node(g, v, state)
    return owner, state.sizes


def partition_stream(g: CsrGraph, m: int, gamma: float = 2.0, order: str = "dfs-degree", seed: int = 0) -> PartitionAssignment:
    if gamma < 1:
        raise ValueError(f"gamma must be at least 1, got {gamma}.")
    order = normalize_order(order)
    start = time.perf_counter()
    result = PartitionAssignment.unassigned(g.node_count, m, gamma, order)
    stream = stream_order(g, order, seed)
    owner, sizes = _stream_segment(g, stream, m, gamma)
    result.owner, result.sizes = owner, sizes
    result.method = "mpgp"
    result.seconds = time.perf_counter() - start
    logger.info(f"--- MPGP ({order}, gamma={gamma}): sizes {sizes.tolist()} in {result.seconds:.2f}s ---")
    return result


def partition_parallel(g: CsrGraph, m: int, gamma: float = 2.0, segments: int = 1, order: str = "bfs-degree",
                       seed: int = 0, threads: int = 1) -> PartitionAssignment:
    """
    Splits the stream into contiguous segments and partitions each one
    independently; segments never see each other's assignments. The results
    are merged by taking every segment's owners and summing its sizes.
    """
    if segments < 1:
        raise ValueError(f"segments must be at least 1, got {segments}.")
    if gamma < 1:
        raise ValueError(f"gamma must be at least 1, got {gamma}.")
    order = normalize_order(order)
    start = time.perf_counter()
    stream = stream_order(g, order, seed)
    chunks = np.array_split(stream, segments)

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        parts = list(pool.map(lambda chunk: _stream_segment(g, chunk, m, gamma), chunks))

    result = PartitionAssignment.unassigned(g.node_count, m, gamma, order)
    for chunk, (owner, sizes) in zip(chunks, parts):
        result.owner[chunk] = owner[chunk]
        result.sizes += sizes
    result.method = "mpgp-parallel"
    result.seconds = time.perf_counter() - start
    logger.info(f"--- MPGP-P ({segments} segments, {order}): sizes {result.sizes.tolist()} in {result.seconds:.2f}s ---")
    return result


def partition_hash(g: CsrGraph, m: int) -> PartitionAssignment:
    if m < 1:
        raise ValueError(f"m must be at least 1, got {m}.")
    owner = np.arange(g.node_count, dtype=np.int64) % m
    return PartitionAssignment(owner=owner, sizes=np.bincount(owner, minlength=m).astype(np.int64),
                               m=m, method="hash")


def edge_cut(g: CsrGraph, parts: PartitionAssignment) -> int:
    """Edges whose endpoints live on different machines; undirected edges count once."""
    src, dst = g.edge_pairs()
    crossing = parts.owner[src] != parts.owner[dst]
    if not g.directed:
        crossing &= src < dst
    return int(np.count_nonzero(crossing))


def partition_graph(g: CsrGraph, method: str, m: int, gamma: float = 2.0, order: str = "dfs-degree",
                    segments: int = 1, seed: int = 0, threads: int = 1) -> PartitionAssignment:
    if method == "mpgp":
        return partition_stream(g, m, gamma, order, seed)
    if method == "mpgp-parallel":
        return partition_parallel(g, m, gamma, segments, order, seed, threads)
    if method == "hash":
        return partition_hash(g, m)
    raise ValueError(f"Unknown partitioner '{method}'; expected one of {PARTITIONERS}.")
