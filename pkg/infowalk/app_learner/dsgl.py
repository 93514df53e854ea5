# File: infowalk/app_learner/dsgl.py
from dataclasses import dataclass
from typing import List, Optional, Sequence, Union

import numpy as np
from scipy.special import expit, log_expit

from infowalk.app_stats import CorpusStats

from .embedding_store import EmbeddingStore, StoreMismatchError

NEGATIVE_POWER = 0.75


class NegativeSampler:
    """Draws node ids with probability proportional to ocn ** 0.75."""

    def __init__(self, ocn: np.ndarray, power: float = NEGATIVE_POWER):
        weights = np.power(ocn.astype(np.float64), power)
        self.cdf = np.cumsum(weights)
        if self.cdf.size == 0 or self.cdf[-1] <= 0:
            raise ValueError("Negative sampling needs at least one node with a positive count.")

    def draw(self, size: int, rng: np.random.Generator) -> np.ndarray:
        u = rng.random(size) * self.cdf[-1]
        return np.searchsorted(self.cdf, u, side="right").astype(np.int64)


def sample_negatives(source: Union[CorpusStats, NegativeSampler], K: int, L: int, rng: np.random.Generator) -> np.ndarray:
    """
    K * L negative node ids, shaped (L, K): row t is the subset used at step t.
    source is a prepared sampler or the corpus statistics to build one from.
    """
    if K * L < 1:
        raise ValueError(f"K * L must be at least 1, got K={K}, L={L}.")
    sampler = source if isinstance(source, NegativeSampler) else NegativeSampler(source.ocn)
    return sampler.draw(K * L, rng).reshape(L, K)


@dataclass
class StepBatch:
    """
    One lockstep position across a batch of walks. Rows are the context
    nodes of every active window, columns the window targets followed by the
    shared negatives.
    """
    row_nodes: np.ndarray
    row_window: np.ndarray
    col_nodes: np.ndarray
    labels: np.ndarray
    mask: np.ndarray

    @property
    def shape(self):
        return self.labels.shape


def build_step(walks: Sequence[Sequence[int]], t: int, w: int, negatives: Sequence[int]) -> Optional[StepBatch]:
    row_nodes: List[int] = []
    row_window: List[int] = []
    targets: List[int] = []
    for walk in walks:
        if t >= len(walk):
            continue
        context = list(walk[max(0, t - w):t]) + list(walk[t + 1:t + 1 + w])
        if not context:
            continue
        row_window.extend([len(targets)] * len(context))
        row_nodes.extend(context)
        targets.append(walk[t])
    if not targets:
        return None

    row_window = np.asarray(row_window, dtype=np.int64)
    col_nodes = np.concatenate([np.asarray(targets, dtype=np.int64), np.asarray(negatives, dtype=np.int64)])
    rows = np.arange(row_window.size)
    labels = np.zeros((row_window.size, col_nodes.size))
    labels[rows, row_window] = 1.0
    own_target = col_nodes[row_window]
    # a window's own target never acts as its negative
    mask = (col_nodes[None, :] != own_target[:, None]).astype(np.float64)
    mask[rows, row_window] = 1.0
    return StepBatch(np.asarray(row_nodes, dtype=np.int64), row_window, col_nodes, labels, mask)


def batch_gradients(C: np.ndarray, O: np.ndarray, labels: np.ndarray, mask: np.ndarray, lr: float):
    """Update deltas for the context rows C and output rows O of one step."""
    G = lr * (labels - expit(C @ O.T)) * mask
    return G @ O, G.T @ C


def batch_loss(C: np.ndarray, O: np.ndarray, labels: np.ndarray, mask: np.ndarray) -> float:
    S = C @ O.T
    return float(-(mask * (labels * log_expit(S) + (1.0 - labels) * log_expit(-S))).sum())


class WorkerBuffers:
    """
    Worker-private copies of the rows one lifetime touches: the input rows
    of every node in the walks (context buffer) and the output rows of the
    walk nodes and the sampled negatives (output buffer, holding the K x L
    negative buffer). Global matrices change only at flush, once.
    """

    def __init__(self, store: EmbeddingStore, walks: Sequence[Sequence[int]], negatives: np.ndarray):
        walk_nodes = np.unique(np.concatenate([np.asarray(w, dtype=np.int64) for w in walks]))
        self.negatives = negatives
        self.window_count = len(walks)
        self.context_nodes = walk_nodes
        self.context_rows = store.rank[walk_nodes]
        self.context_base = store.phi_in[self.context_rows].copy()
        self.context_buffer = self.context_base.copy()

        self.output_nodes = np.union1d(walk_nodes, negatives.ravel())
        self.output_rows = store.rank[self.output_nodes]
        self.output_base = store.phi_out[self.output_rows].copy()
        self.output_buffer = self.output_base.copy()

        self.loss = 0.0
        self.pairs = 0
        self.flushed = False

    def apply(self, batch: StepBatch, lr: float):
        ci = np.searchsorted(self.context_nodes, batch.row_nodes)
        oi = np.searchsorted(self.output_nodes, batch.col_nodes)
        C = self.context_buffer[ci]
        O = self.output_buffer[oi]
        self.loss += batch_loss(C, O, batch.labels, batch.mask)
        self.pairs += int(batch.row_nodes.size)
        dC, dO = batch_gradients(C, O, batch.labels, batch.mask, lr)
        np.add.at(self.context_buffer, ci, dC)
        np.add.at(self.output_buffer, oi, dO)

    def flush(self, store: EmbeddingStore):
        """Adds this lifetime's deltas to the global matrices."""
        if self.flushed:
            raise RuntimeError("Worker buffers were already flushed.")
        store.phi_in[self.context_rows] += self.context_buffer - self.context_base
        store.phi_out[self.output_rows] += self.output_buffer - self.output_base
        self.flushed = True


def train_multiwindow(store: EmbeddingStore, walks: Sequence[Sequence[int]], K: int, w: int, lr: float,
                      rng: np.random.Generator, sampler: NegativeSampler) -> WorkerBuffers:
    """
    Trains one batch of walks whose windows slide in lockstep. Each step
    shares one K-subset of negatives across all windows, and the targets of
    the other windows act as extra negatives. Results stay in the returned
    buffers until flushed.
    """
    if not walks:
        raise ValueError("A lifetime needs at least one walk.")
    if K < 1 or w < 1:
        raise ValueError(f"K and w must be at least 1, got K={K}, w={w}.")
    L = max(len(walk) for walk in walks)
    negatives = sample_negatives(sampler, K, L, rng)
    buffers = WorkerBuffers(store, walks, negatives)
    for t in range(L):
        batch = build_step(walks, t, w, negatives[t])
        if batch is not None:
            buffers.apply(batch, lr)
    return buffers


@dataclass
class SyncResult:
    rows: int
    bytes_per_matrix: int

    @property
    def bytes_total(self) -> int:
        return 2 * self.bytes_per_matrix


def _check_layouts(stores: Sequence[EmbeddingStore]):
    if not stores:
        raise StoreMismatchError("No stores to synchronize.")
    for i, other in enumerate(stores[1:], start=1):
        if not stores[0].same_layout(other):
            raise StoreMismatchError(f"Store {i} does not share the row ordering of store 0.")


def _average_rows(stores: Sequence[EmbeddingStore], rows: np.ndarray):
    for name in ("phi_in", "phi_out"):
        mean = np.mean([getattr(s, name)[rows] for s in stores], axis=0)
        for s in stores:
            getattr(s, name)[rows] = mean


def sync_hotness(stores: Sequence[EmbeddingStore], rng: np.random.Generator) -> SyncResult:
    """Averages one randomly chosen row per hotness block across all machines."""
    _check_layouts(stores)
    if len(stores) == 1:
        return SyncResult(rows=0, bytes_per_matrix=0)
    blocks = stores[0].blocks
    rows = np.fromiter((rng.integers(b.start, b.stop) for b in blocks), dtype=np.int64, count=len(blocks))
    _average_rows(stores, rows)
    return SyncResult(rows=int(rows.size), bytes_per_matrix=int(rows.size) * stores[0].dim * 8 * len(stores))


def sync_full(stores: Sequence[EmbeddingStore]) -> SyncResult:
    _check_layouts(stores)
    if len(stores) == 1:
        return SyncResult(rows=0, bytes_per_matrix=0)
    rows = np.arange(stores[0].node_count, dtype=np.int64)
    _average_rows(stores, rows)
    return SyncResult(rows=int(rows.size), bytes_per_matrix=int(rows.size) * stores[0].dim * 8 * len(stores))


def heldout_loss(store: EmbeddingStore, walks: Sequence[Sequence[int]], K: int, w: int, seed: int,
                 sampler: Optional[NegativeSampler] = None) -> float:
    """Mean per-pair negative log-likelihood over the windows of walks; nothing is updated."""
    sampler = sampler or NegativeSampler(store.counts[store.rank])
    rng = np.random.default_rng(seed)
    total, pairs = 0.0, 0
    for walk in walks:
        walk = np.asarray(walk, dtype=np.int64)
        for t in range(walk.size):
            context = np.concatenate([walk[max(0, t - w):t], walk[t + 1:t + 1 + w]])
            if context.size == 0:
                continue
            negs = sampler.draw(K, rng)
            negs = negs[negs != walk[t]]
            C = store.phi_in[store.rank[context]]
            O = store.phi_out[store.rank[np.concatenate([[walk[t]], negs])]]
            S = C @ O.T
            total -= float(log_expit(S[:, 0]).sum() + log_expit(-S[:, 1:]).sum())
            pairs += int(context.size)
    return total / pairs if pairs else float("nan")
