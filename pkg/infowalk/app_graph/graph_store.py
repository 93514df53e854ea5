# File: infowalk/app_graph/graph_store.py
import logging
import struct
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .intersect import intersect_galloping

logger = logging.getLogger(__name__)

CSR_MAGIC = b"IWCSR\x00\x00\x00"
CSR_VERSION = 1
# magic, version, flags, node_count, edge_count
_CSR_HEADER = struct.Struct("<8sIIQQ")
_FLAG_DIRECTED = 1
_FLAG_WEIGHTED = 2


class GraphFormatError(ValueError):
    pass


class GraphValidationError(ValueError):
    pass


class NodeIndexError(IndexError):
    pass


@dataclass(frozen=True, eq=False)
class CsrGraph:
    """
    Immutable compressed-sparse-row graph.

    Undirected edges are stored twice, once in each endpoint's slice. Every
    slice is strictly ascending so neighbor lists can be intersected by
    galloping search.
    """
    offsets: np.ndarray
    neighbors: np.ndarray
    weights: Optional[np.ndarray] = None
    directed: bool = False
    _lists: List[List[int]] = field(default_factory=list, init=False, repr=False)

    def __post_init__(self):
        self.validate()
        for arr in (self.offsets, self.neighbors, self.weights):
            if arr is not None:
                arr.flags.writeable = False

    # --- shape ---
    @property
    def node_count(self) -> int:
        return int(self.offsets.size - 1)

    @property
    def edge_count(self) -> int:
        return int(self.neighbors.size)

    @property
    def weighted(self) -> bool:
        return self.weights is not None

    def validate(self):
        offsets, neighbors = self.offsets, self.neighbors
        if offsets.ndim != 1 or offsets.size < 1:
            raise GraphValidationError("offsets must be a non-empty 1-d array.")
        if offsets[0] != 0 or offsets[-1] != neighbors.size:
            raise GraphValidationError("offsets must start at 0 and end at edge_count.")
        if np.any(np.diff(offsets) < 0):
            raise GraphValidationError("offsets must be non-decreasing.")
        n = offsets.size - 1
        if neighbors.size and (neighbors.min() < 0 or neighbors.max() >= n):
            raise GraphValidationError("neighbor id out of range.")
        if neighbors.size > 1:
            # within a slice ids strictly increase; a decrease is only allowed at slice starts
            steps = np.diff(neighbors)
            starts = np.zeros(neighbors.size - 1, dtype=bool)
            inner = offsets[1:-1]
            inner = inner[(inner > 0) & (inner < neighbors.size)]
            starts[inner - 1] = True
            if np.any((steps <= 0) & ~starts):
                raise GraphValidationError("adjacency slices must be strictly sorted ascending.")
        if self.weights is not None:
            if self.weights.shape != neighbors.shape:
                raise GraphValidationError("weights must align with neighbors.")
            if np.any(~(self.weights > 0)):
                raise GraphValidationError("all weights must be positive.")

    # --- queries ---
    def _check(self, u: int):
        if not 0 <= u < self.node_count:
            raise NodeIndexError(f"node id {u} out of range [0, {self.node_count}).")

    def degree(self, u: int) -> int:
        self._check(u)
        return int(self.offsets[u + 1] - self.offsets[u])

    def degrees(self) -> np.ndarray:
        return np.diff(self.offsets)

    def neighbors_of(self, u: int) -> np.ndarray:
        self._check(u)
        return self.neighbors[self.offsets[u]:self.offsets[u + 1]]

    def weights_of(self, u: int) -> np.ndarray:
        self._check(u)
        if self.weights is None:
            return np.ones(self.degree(u), dtype=np.float64)
        return self.weights[self.offsets[u]:self.offsets[u + 1]]

    def edge_index(self, u: int, v: int) -> int:
        """Position of (u, v) in the neighbor array, or -1."""
        nbrs = self.neighbors_of(u)
        i = int(np.searchsorted(nbrs, v))
        if i < nbrs.size and nbrs[i] == v:
            return int(self.offsets[u]) + i
        return -1

    def has_edge(self, u: int, v: int) -> bool:
        return self.edge_index(u, v) >= 0

    def weight(self, u: int, v: int) -> float:
        idx = self.edge_index(u, v)
        if idx < 0:
            raise KeyError(f"no edge ({u}, {v}).")
        return 1.0 if self.weights is None else float(self.weights[idx])

    def adjacency_lists(self) -> List[List[int]]:
        """Plain-list adjacency for the walk hot loop; built once and cached."""
        if not self._lists and self.node_count:
            lists = np.split(self.neighbors, self.offsets[1:-1])
            self._lists.extend(arr.tolist() for arr in lists)
        return self._lists

    def edge_pairs(self) -> Tuple[np.ndarray, np.ndarray]:
        """All stored (src, dst) pairs, CSR order."""
        src = np.repeat(np.arange(self.node_count, dtype=np.int64), self.degrees())
        return src, self.neighbors.copy()

    def same_as(self, other: "CsrGraph") -> bool:
        if self.directed != other.directed or self.weighted != other.weighted:
            return False
        if not (np.array_equal(self.offsets, other.offsets) and np.array_equal(self.neighbors, other.neighbors)):
            return False
        return self.weights is None or np.array_equal(self.weights, other.weights)

    # --- construction ---
    @classmethod
    def from_edges(cls, src, dst, weights=None, node_count: Optional[int] = None, directed: bool = False) -> "CsrGraph":
        """
        Builds a CSR graph from parallel edge arrays.

        Undirected inputs get their reverse edges added (self-loops once).
        Duplicate edges collapse into one; weights of duplicates are summed.
        """
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        if src.shape != dst.shape:
            raise GraphValidationError("src and dst must have the same length.")
        w = None if weights is None else np.asarray(weights, dtype=np.float64)
        if w is not None and np.any(~(w > 0)):
            raise GraphValidationError("all weights must be positive.")
        if src.size and min(src.min(), dst.min()) < 0:
            raise GraphValidationError("node ids must be non-negative.")

        n = int(node_count) if node_count is not None else (int(max(src.max(), dst.max())) + 1 if src.size else 0)
        if src.size and max(src.max(), dst.max()) >= n:
            raise GraphValidationError("node id exceeds node_count.")

        if not directed:
            loop = src == dst
            src, dst = np.concatenate([src, dst[~loop]]), np.concatenate([dst, src[~loop]])
            if w is not None:
                w = np.concatenate([w, w[~loop]])

        keys = src * max(n, 1) + dst
        uniq, inverse = np.unique(keys, return_inverse=True)
        if w is not None:
            w = np.bincount(inverse, weights=w, minlength=uniq.size)
        u_src = uniq // max(n, 1)
        u_dst = uniq % max(n, 1)

        offsets = np.zeros(n + 1, dtype=np.int64)
        if n:
            np.cumsum(np.bincount(u_src, minlength=n), out=offsets[1:])
        return cls(offsets=offsets, neighbors=u_dst.astype(np.int64), weights=w, directed=directed)

    @classmethod
    def empty(cls, directed: bool = False) -> "CsrGraph":
        return cls(offsets=np.zeros(1, dtype=np.int64), neighbors=np.empty(0, dtype=np.int64), directed=directed)


def load_edge_list(path: str, directed: bool = False, weighted: bool = False) -> CsrGraph:
    """
    Reads a whitespace-separated edge list into a validated CsrGraph.

    Lines are "src dst" or "src dst weight"; '#' lines and blank lines are
    skipped. In unweighted mode a third column is ignored; in weighted mode a
    missing weight counts as 1.0.
    """
    src: List[int] = []
    dst: List[int] = []
    wts: List[float] = []

    with open(path, "r", encoding="utf-8") as f:
        for line_no, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) not in (2, 3):
                raise GraphFormatError(f"line {line_no}: expected 'src dst [weight]', got {line!r}.")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError as e:
                raise GraphFormatError(f"line {line_no}: node ids must be integers, got {line!r}.") from e
            if u < 0 or v < 0:
                raise GraphFormatError(f"line {line_no}: node ids must be non-negative.")
            if weighted:
                try:
                    wt = float(parts[2]) if len(parts) == 3 else 1.0
                except ValueError as e:
                    raise GraphFormatError(f"line {line_no}: weight must be a number, got {parts[2]!r}.") from e
                if not wt > 0:
                    raise GraphValidationError(f"line {line_no}: weight must be positive, got {wt}.")
                wts.append(wt)
            src.append(u)
            dst.append(v)

    g = CsrGraph.from_edges(src, dst, wts if weighted else None, directed=directed)
    logger.info(f"--- Loaded graph '{path}': {g.node_count} nodes, {g.edge_count} stored edges ---")
    return g


def write_edge_list(g: CsrGraph) -> str:
    """Edge list text for a graph; undirected edges are written once."""
    src, dst = g.edge_pairs()
    keep = np.ones(src.size, dtype=bool) if g.directed else src <= dst
    lines = []
    for i in np.flatnonzero(keep):
        if g.weights is None:
            lines.append(f"{int(src[i])} {int(dst[i])}")
        else:
            lines.append(f"{int(src[i])} {int(dst[i])} {float(g.weights[i])!r}")
    return "\n".join(lines) + ("\n" if lines else "")


def common_neighbor_count(g: CsrGraph, u: int, v: int) -> int:
    """
    |N(u) ∩ N(v)| with self-loops excluded: a node is never its own common
    neighbor.
    """
    a = g.neighbors_of(u)
    b = g.neighbors_of(v)
    common = intersect_galloping(a, b, check=False)
    if common.size == 0:
        return 0
    # u can only appear in N(u) through a self-loop, likewise v
    return int(common.size - np.count_nonzero((common == u) | (common == v)))


def save_csr(g: CsrGraph, path: str):
    """Binary CSR cache, little-endian."""
    flags = (_FLAG_DIRECTED if g.directed else 0) | (_FLAG_WEIGHTED if g.weighted else 0)
    with open(path, "wb") as f:
        f.write(_CSR_HEADER.pack(CSR_MAGIC, CSR_VERSION, flags, g.node_count, g.edge_count))
        f.write(g.offsets.astype("<i8").tobytes())
        f.write(g.neighbors.astype("<i8").tobytes())
        if g.weights is not None:
            f.write(g.weights.astype("<f8").tobytes())


def load_csr(path: str) -> CsrGraph:
    with open(path, "rb") as f:
        header = f.read(_CSR_HEADER.size)
        if len(header) != _CSR_HEADER.size:
            raise GraphFormatError(f"'{path}' is too short to be a CSR cache.")
        magic, version, flags, n, m = _CSR_HEADER.unpack(header)
        if magic != CSR_MAGIC:
            raise GraphFormatError(f"'{path}' is not a CSR cache (bad magic).")
        if version != CSR_VERSION:
            raise GraphFormatError(f"'{path}' has unsupported CSR version {version}.")

        def read(dtype: str, native, count: int) -> np.ndarray:
            raw = f.read(8 * count)
            if len(raw) != 8 * count:
                raise GraphFormatError(f"'{path}' is truncated.")
            return np.frombuffer(raw, dtype=dtype).astype(native)

        offsets = read("<i8", np.int64, n + 1)
        neighbors = read("<i8", np.int64, m)
        weights = read("<f8", np.float64, m) if flags & _FLAG_WEIGHTED else None
    return CsrGraph(offsets=offsets, neighbors=neighbors, weights=weights, directed=bool(flags & _FLAG_DIRECTED))
