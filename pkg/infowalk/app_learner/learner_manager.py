# File: infowalk/app_learner/learner_manager.py
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np
import pandas as pd

from infowalk.app_sampler import Corpus

from .dsgl import NegativeSampler, heldout_loss, sync_hotness, train_multiwindow
from .embedding_store import EmbeddingStore, build_store

logger = logging.getLogger(__name__)

LR_MIN = 0.0001
# one walk in HOLDOUT_EVERY is kept out of training for the loss column
HOLDOUT_EVERY = 20
# SeedSequence slots of the trainer's auxiliary streams
SYNC_SLOT = 1 << 20
HOLDOUT_SLOT = 1 << 21


@dataclass
class TrainParams:
    dim: int = 128
    window: int = 10
    negatives: int = 5
    multi_windows: int = 2
    epochs: int = 1
    lr: float = 0.025
    lr_min: float = LR_MIN
    workers: int = 1
    sync_interval: float = 0.1
    sync_every: int = 0
    seed: int = 0

    @classmethod
    def from_config(cls, config, seed: int) -> "TrainParams":
        return cls(
            dim=config.dim,
            window=config.window,
            negatives=config.negatives,
            multi_windows=config.multi_windows,
            epochs=config.epochs,
            lr=config.lr,
            workers=config.workers,
            sync_interval=config.sync_interval,
            sync_every=config.sync_every,
            seed=seed,
        )


@dataclass
class TrainResult:
    store: EmbeddingStore
    log: pd.DataFrame
    sync_rows: int = 0
    sync_bytes: int = 0
    seconds: float = 0.0


@dataclass
class _Worker:
    """One training thread: its batches, position, and random stream."""
    machine: int
    batches: List[List[Sequence[int]]]
    rng: np.random.Generator
    total_nodes: int
    done_nodes: int = 0
    cursor: int = 0
    loss: float = 0.0
    pairs: int = 0

    @property
    def exhausted(self) -> bool:
        return self.cursor >= len(self.batches)


def _split_walks(walks: Sequence[Sequence[int]], seed: int) -> Tuple[List[Sequence[int]], List[Sequence[int]]]:
    """Holds out a seeded random sample of one walk in HOLDOUT_EVERY."""
    if len(walks) < HOLDOUT_EVERY:
        return list(walks), list(walks)
    rng = np.random.default_rng(np.random.SeedSequence([seed, HOLDOUT_SLOT]))
    held_idx = rng.choice(len(walks), size=len(walks) // HOLDOUT_EVERY, replace=False)
    is_held = np.zeros(len(walks), dtype=bool)
    is_held[held_idx] = True
    train = [w for w, h in zip(walks, is_held.tolist()) if not h]
    held = [w for w, h in zip(walks, is_held.tolist()) if h]
    return train, held


def _make_workers(walks: Sequence[Sequence[int]], machines: int, params: TrainParams, epoch: int) -> List[_Worker]:
    workers = []
    for machine, m_idx in enumerate(np.array_split(np.arange(len(walks)), machines)):
        for slot, w_idx in enumerate(np.array_split(m_idx, params.workers)):
            mine = [walks[i] for i in w_idx.tolist()]
            batches = [mine[i:i + params.multi_windows] for i in range(0, len(mine), params.multi_windows)]
            seq = np.random.SeedSequence([params.seed, epoch, machine, slot])
            workers.append(_Worker(machine, batches, np.random.default_rng(seq), sum(len(w) for w in mine)))
    return workers


def train(corpus: Corpus, machines: int = 1, params: TrainParams = None) -> TrainResult:
    """
    Trains embeddings on machines logical machines, each with params.workers
    threads sharing that machine's matrices.

    Walks are split contiguously across machines and then across workers.
    Training runs in sync periods: every worker processes batches until the
    period ends (sync_every batches, or sync_interval seconds when
    sync_every is 0), then the machines average one row per hotness block.
    The learning rate decays linearly per worker from lr to lr_min. At the
    end all machines' matrices are averaged into the returned store.
    """
    params = params or TrainParams()
    if not corpus.walks or corpus.stats.total_ocn == 0:
        raise ValueError("Cannot train on an empty corpus.")
    if machines < 1:
        raise ValueError(f"machines must be at least 1, got {machines}.")

    began = time.perf_counter()
    base = build_store(corpus.stats, params.dim, params.seed)
    stores = [base.copy() for _ in range(machines)]
    sampler = NegativeSampler(corpus.stats.ocn)
    train_walks, held_walks = _split_walks(corpus.walks, params.seed)
    sync_rng = np.random.default_rng(np.random.SeedSequence([params.seed, SYNC_SLOT]))
    loss_seed = params.seed + 7

    rows_log = [{
        "epoch": 0,
        "loss": heldout_loss(base, held_walks, params.negatives, params.window, loss_seed, sampler),
        "train_loss": float("nan"),
        "nodes_per_sec": 0.0,
        "synced_rows": 0,
        "bytes_synced": 0,
        "full_sync_rows": 0,
        "seconds": 0.0,
    }]
    total_rows, total_bytes = 0, 0
    logger.info(f"--- Training: {len(train_walks)} walks, {machines} machines x {params.workers} workers, "
                f"{params.epochs} epochs, d={params.dim} ---")

    with ThreadPoolExecutor(max_workers=machines * params.workers) as pool:
        for epoch in range(1, params.epochs + 1):
            epoch_start = time.perf_counter()
            workers = _make_workers(train_walks, machines, params, epoch)
            epoch_total = sum(wk.total_nodes for wk in workers)
            synced_rows = synced_bytes = 0

            def run_period(worker: _Worker):
                store = stores[worker.machine]
                deadline = time.perf_counter() + params.sync_interval
                done = 0
                while not worker.exhausted:
                    batch = worker.batches[worker.cursor]
                    worker.cursor += 1
                    progress = ((epoch - 1) * worker.total_nodes + worker.done_nodes) / max(1, params.epochs * worker.total_nodes)
                    lr = max(params.lr_min, params.lr - (params.lr - params.lr_min) * progress)
                    buffers = train_multiwindow(store, batch, params.negatives, params.window, lr, worker.rng, sampler)
                    buffers.flush(store)
                    worker.loss += buffers.loss
                    worker.pairs += buffers.pairs
                    worker.done_nodes += sum(len(w) for w in batch)
                    done += 1
                    if params.sync_every > 0:
                        if done >= params.sync_every:
                            break
                    elif time.perf_counter() >= deadline:
                        break

            while not all(wk.exhausted for wk in workers):
                list(pool.map(run_period, workers))
                if machines > 1:
                    result = sync_hotness(stores, sync_rng)
                    synced_rows += result.rows
                    synced_bytes += result.bytes_total

            seconds = time.perf_counter() - epoch_start
            pairs = sum(wk.pairs for wk in workers)
            rows_log.append({
                "epoch": epoch,
                "loss": heldout_loss(_averaged(stores), held_walks, params.negatives, params.window, loss_seed, sampler),
                "train_loss": sum(wk.loss for wk in workers) / pairs if pairs else float("nan"),
                "nodes_per_sec": epoch_total / seconds if seconds > 0 else 0.0,
                "synced_rows": synced_rows,
                "bytes_synced": synced_bytes,
                "full_sync_rows": base.node_count if machines > 1 else 0,
                "seconds": seconds,
            })
            total_rows += synced_rows
            total_bytes += synced_bytes
            logger.info(f"--- Epoch {epoch}: loss {rows_log[-1]['loss']:.4f}, {synced_rows} rows synced ---")

    result = TrainResult(store=_averaged(stores), log=pd.DataFrame(rows_log), sync_rows=total_rows,
                         sync_bytes=total_bytes, seconds=time.perf_counter() - began)
    return result


def _averaged(stores: Sequence[EmbeddingStore]) -> EmbeddingStore:
    merged = stores[0].copy()
    if len(stores) > 1:
        merged.phi_in = np.mean([s.phi_in for s in stores], axis=0)
        merged.phi_out = np.mean([s.phi_out for s in stores], axis=0)
    return merged
