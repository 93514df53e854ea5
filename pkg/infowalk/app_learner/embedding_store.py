# File: infowalk/app_learner/embedding_store.py
import logging
from dataclasses import dataclass
from typing import List

import numpy as np

from infowalk.app_stats import CorpusStats

logger = logging.getLogger(__name__)

VECTORS = ("in", "mean")


class StoreMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class HotnessBlock:
    """Rows [start, stop) all share one corpus frequency."""
    frequency: int
    start: int
    stop: int

    @property
    def size(self) -> int:
        return self.stop - self.start


@dataclass
class EmbeddingStore:
    """
    Input and output matrices with rows ordered by descending corpus
    frequency. order[r] is the node held in row r and rank[v] the row of
    node v.
    """
    phi_in: np.ndarray
    phi_out: np.ndarray
    order: np.ndarray
    rank: np.ndarray
    counts: np.ndarray
    blocks: List[HotnessBlock]

    @property
    def node_count(self) -> int:
        return int(self.order.size)

    @property
    def dim(self) -> int:
        return int(self.phi_in.shape[1])

    def copy(self) -> "EmbeddingStore":
        return EmbeddingStore(
            phi_in=self.phi_in.copy(),
            phi_out=self.phi_out.copy(),
            order=self.order,
            rank=self.rank,
            counts=self.counts,
            blocks=self.blocks,
        )

    def same_layout(self, other: "EmbeddingStore") -> bool:
        return (
            self.phi_in.shape == other.phi_in.shape
            and np.array_equal(self.order, other.order)
            and self.blocks == other.blocks
        )

    def node_vectors(self, vectors: str = "in") -> np.ndarray:
        """Vectors in node-id order; 'mean' averages the input and output rows."""
        if vectors not in VECTORS:
            raise ValueError(f"vectors must be one of {VECTORS}, got '{vectors}'.")
        if vectors == "in":
            return self.phi_in[self.rank]
        return (self.phi_in[self.rank] + self.phi_out[self.rank]) / 2.0


def hotness_blocks(counts: np.ndarray) -> List[HotnessBlock]:
    """Runs of equal frequency over rows sorted descending; zero-count rows are left out."""
    live = int(np.count_nonzero(counts > 0))
    if live == 0:
        return []
    starts = np.concatenate([[0], np.flatnonzero(np.diff(counts[:live])) + 1])
    stops = np.concatenate([starts[1:], [live]])
    return [HotnessBlock(int(counts[s]), int(s), int(e)) for s, e in zip(starts, stops)]


def build_store(stats: CorpusStats, d: int, seed: int = 0) -> EmbeddingStore:
    if d < 1:
        raise ValueError(f"Embedding dimension must be at least 1, got {d}.")
    if stats.total_ocn == 0:
        raise ValueError("Cannot build embeddings from an empty corpus.")

    n = stats.node_count
    ocn = stats.ocn
    order = np.lexsort((np.arange(n), -ocn)).astype(np.int64)
    rank = np.empty(n, dtype=np.int64)
    rank[order] = np.arange(n, dtype=np.int64)
    counts = ocn[order]

    rng = np.random.default_rng(seed)
    phi_in = rng.uniform(-0.5 / d, 0.5 / d, size=(n, d))
    phi_out = np.zeros((n, d), dtype=np.float64)
    blocks = hotness_blocks(counts)
    logger.info(f"--- Embedding store: {n} rows x {d} dims, {len(blocks)} hotness blocks (ocn_max={stats.ocn_max}) ---")
    return EmbeddingStore(phi_in=phi_in, phi_out=phi_out, order=order, rank=rank, counts=counts, blocks=blocks)


def embeddings_bytes(store: EmbeddingStore, binary: bool = False, vectors: str = "in") -> bytes:
    """word2vec format: a 'node_count d' header, then one vector per node in id order."""
    matrix = store.node_vectors(vectors)
    n, d = matrix.shape
    if binary:
        rows = (f"{v} ".encode("utf-8") + matrix[v].astype("<f4").tobytes() + b"\n" for v in range(n))
        return f"{n} {d}\n".encode("utf-8") + b"".join(rows)
    lines = [f"{n} {d}"]
    lines.extend(f"{v} " + " ".join(f"{x:.8g}" for x in matrix[v]) for v in range(n))
    return ("\n".join(lines) + "\n").encode("utf-8")


def save_embeddings(store: EmbeddingStore, path: str, binary: bool = False, vectors: str = "in"):
    with open(path, "wb") as f:
        f.write(embeddings_bytes(store, binary, vectors))


def load_embeddings(path: str, binary: bool = False) -> np.ndarray:
    """Reads either format back into an (n, d) matrix indexed by node id."""
    if binary:
        with open(path, "rb") as f:
            n, d = (int(x) for x in f.readline().split())
            matrix = np.zeros((n, d), dtype=np.float64)
            for _ in range(n):
                label = b""
                while (ch := f.read(1)) != b" ":
                    if not ch:
                        raise ValueError(f"'{path}' is truncated.")
                    label += ch
                raw = f.read(4 * d)
                if len(raw) != 4 * d:
                    raise ValueError(f"'{path}' is truncated.")
                matrix[int(label)] = np.frombuffer(raw, dtype="<f4")
                f.read(1)
        return matrix

    with open(path, "r", encoding="utf-8") as f:
        n, d = (int(x) for x in f.readline().split())
        matrix = np.zeros((n, d), dtype=np.float64)
        for line_no, line in enumerate(f, start=2):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != d + 1:
                raise ValueError(f"{path}:{line_no}: expected {d + 1} fields, got {len(parts)}.")
            matrix[int(parts[0])] = [float(x) for x in parts[1:]]
    return matrix
