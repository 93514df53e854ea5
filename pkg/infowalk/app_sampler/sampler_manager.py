# File: infowalk/app_sampler/sampler_manager.py
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from random import Random
from typing import Dict, List, Tuple

import numpy as np
import pandas as pd

from infowalk.app_graph import CsrGraph
from infowalk.app_partition import PartitionAssignment
from infowalk.app_stats import CorpusStats, relative_entropy, walks_converged

from .machine import Machine
from .strategies import WalkStrategy

logger = logging.getLogger(__name__)


@dataclass
class Corpus:
    walks: List[List[int]]
    stats: CorpusStats

    def lengths(self) -> np.ndarray:
        return np.fromiter((len(w) for w in self.walks), dtype=np.int64, count=len(self.walks))

    @property
    def mean_length(self) -> float:
        return float(self.lengths().mean()) if self.walks else 0.0

    def to_text(self) -> str:
        return "".join(" ".join(map(str, walk)) + "\n" for walk in self.walks)

    @classmethod
    def from_text(cls, text: str, node_count: int) -> "Corpus":
        walks = [[int(tok) for tok in line.split()] for line in text.splitlines() if line.strip()]
        for i, walk in enumerate(walks, start=1):
            if walk and (min(walk) < 0 or max(walk) >= node_count):
                raise ValueError(f"Corpus line {i}: node id out of range [0, {node_count}).")
        return cls(walks=walks, stats=CorpusStats.from_walks(node_count, walks))


def read_corpus(path: str, node_count: int) -> Corpus:
    with open(path, "r", encoding="utf-8") as f:
        return Corpus.from_text(f.read(), node_count)


@dataclass
class CommReport:
    local_steps: List[int]
    msgs_sent: List[int]
    bytes_sent: List[int]
    rounds: int = 0
    supersteps: int = 0
    walks: int = 0
    mean_length: float = 0.0
    divergence: List[float] = field(default_factory=list)
    seconds: float = 0.0

    @classmethod
    def empty(cls, machines: int) -> "CommReport":
        return cls(local_steps=[0] * machines, msgs_sent=[0] * machines, bytes_sent=[0] * machines)

    @property
    def total_messages(self) -> int:
        return int(sum(self.msgs_sent))

    @property
    def total_bytes(self) -> int:
        return int(sum(self.bytes_sent))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "machine_id": range(len(self.local_steps)),
            "local_steps": self.local_steps,
            "msgs_sent": self.msgs_sent,
            "bytes_sent": self.bytes_sent,
        })

    def summary(self) -> Dict[str, object]:
        return {
            "rounds": self.rounds,
            "supersteps": self.supersteps,
            "walks": self.walks,
            "mean_walk_length": self.mean_length,
            "messages": self.total_messages,
            "bytes": self.total_bytes,
            "divergence": list(self.divergence),
        }


def walker_rng(seed: int, walker_id: int) -> Random:
    state = np.random.SeedSequence([int(seed), int(walker_id)]).generate_state(2, dtype=np.uint32)
    return Random((int(state[0]) << 32) | int(state[1]))


def _assemble(fragments: List[Tuple[int, int, int]]) -> List[List[int]]:
    """Orders (walker_id, step, node) fragments into one walk per walker."""
    if not fragments:
        return []
    arr = np.asarray(fragments, dtype=np.int64)
    arr = arr[np.lexsort((arr[:, 1], arr[:, 0]))]
    cuts = np.flatnonzero(np.diff(arr[:, 0])) + 1
    walks = []
    for chunk_steps, chunk_nodes in zip(np.split(arr[:, 1], cuts), np.split(arr[:, 2], cuts)):
        if not np.array_equal(chunk_steps, np.arange(chunk_steps.size)):
            raise RuntimeError("Walk fragments are not contiguous; a walker was lost.")
        walks.append(chunk_nodes.tolist())
    return walks


def run_walks(g: CsrGraph, parts: PartitionAssignment, strategy: WalkStrategy, mu: float = 0.995,
              delta: float = 0.001, seed: int = 0, threads: int = 1) -> Tuple[Corpus, CommReport]:
    """
    Generates the walk corpus on parts.m logical machines in BSP supersteps.

    Every round launches one walker per node. Walker messages produced in a
    superstep are delivered at the following barrier; a round ends when no
    message is in flight. Information-centric runs stop once the corpus
    divergence changes by at most delta between rounds; fixed runs stop
    after walks_per_node rounds.
    """
    n = g.node_count
    m = parts.m
    report = CommReport.empty(m)
    stats = CorpusStats.empty(n)
    if n == 0:
        logger.info("--- Empty graph: no walks generated ---")
        return Corpus(walks=[], stats=stats), report
    if parts.owner.size != n:
        raise ValueError(f"Partition covers {parts.owner.size} nodes, graph has {n}.")

    began = time.perf_counter()
    codec = strategy.codec()
    owner = parts.owner.tolist()
    rngs: Dict[int, Random] = {}
    machines = [Machine(i, g, owner, strategy, mu, codec, rngs) for i in range(m)]
    sources = [np.flatnonzero(parts.owner == i).tolist() for i in range(m)]
    walks: List[List[int]] = []

    logger.info(f"--- Walking: {n} nodes on {m} machines, strategy={strategy.kind}, stopping={strategy.stopping} ---")
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        while True:
            base = report.rounds * n
            rngs.clear()
            rngs.update({base + s: walker_rng(seed, base + s) for s in range(n)})
            pending = [[(base + s, s) for s in srcs] for srcs in sources]

            while True:
                outboxes = list(pool.map(lambda i: machines[i].superstep(pending[i]), range(m)))
                report.supersteps += 1
                pending = [[] for _ in range(m)]
                in_flight = 0
                for outbox in outboxes:
                    for dest, payloads in outbox.items():
                        machines[dest].inbox.extend(payloads)
                        in_flight += len(payloads)
                if in_flight == 0:
                    break

            fragments = [frag for machine in machines for frag in machine.drain_round()]
            round_walks = _assemble(fragments)
            for walk in round_walks:
                stats.add_walk(walk)
            walks.extend(round_walks)
            report.rounds += 1
            stats.record_divergence(relative_entropy(g, stats))
            logger.debug(f"Round {report.rounds}: D={stats.D_curr:.6f}")

            if not strategy.information_centric:
                if report.rounds >= strategy.walks_per_node:
                    break
            elif walks_converged(stats.D_curr, stats.D_prev, delta):
                break
            elif report.rounds >= strategy.max_rounds:
                logger.warning(f"Walk count did not converge within {strategy.max_rounds} rounds; stopping.")
                break

    for machine in machines:
        report.local_steps[machine.machine_id] = machine.local_steps
        report.msgs_sent[machine.machine_id] = machine.msgs_sent
        report.bytes_sent[machine.machine_id] = machine.bytes_sent

    corpus = Corpus(walks=walks, stats=stats)
    report.walks = len(walks)
    report.mean_length = corpus.mean_length
    report.divergence = list(stats.history)
    report.seconds = time.perf_counter() - began
    logger.info(
        f"--- Walks done: {report.walks} walks in {report.rounds} rounds, mean length {report.mean_length:.2f}, "
        f"{report.total_messages} messages / {report.total_bytes} bytes ---"
    )
    return corpus, report
