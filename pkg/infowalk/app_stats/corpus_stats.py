# File: infowalk/app_stats/corpus_stats.py
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.stats import entropy

from infowalk.app_graph import CsrGraph


@dataclass
class CorpusStats:
    """Per-node occurrence counts of a walk corpus plus the divergence trace."""
    ocn: np.ndarray
    D_prev: float = math.nan
    D_curr: float = math.nan
    history: list = field(default_factory=list)

    @classmethod
    def empty(cls, node_count: int) -> "CorpusStats":
        return cls(ocn=np.zeros(node_count, dtype=np.int64))

    @classmethod
    def from_walks(cls, node_count: int, walks: Iterable[Sequence[int]]) -> "CorpusStats":
        stats = cls.empty(node_count)
        for walk in walks:
            stats.add_walk(walk)
        return stats

    @property
    def node_count(self) -> int:
        return int(self.ocn.size)

    @property
    def total_ocn(self) -> int:
        return int(self.ocn.sum())

    @property
    def ocn_max(self) -> int:
        return int(self.ocn.max()) if self.ocn.size else 0

    def add_walk(self, walk: Sequence[int]):
        if len(walk):
            self.ocn += np.bincount(np.asarray(walk, dtype=np.int64), minlength=self.ocn.size)

    def merge(self, other: "CorpusStats"):
        if other.ocn.size != self.ocn.size:
            raise ValueError(f"Cannot merge counts over {other.ocn.size} nodes into {self.ocn.size}.")
        self.ocn += other.ocn

    def record_divergence(self, value: float):
        """Shifts D_curr into D_prev and stores the newest divergence."""
        self.D_prev, self.D_curr = self.D_curr, float(value)
        self.history.append(float(value))


def relative_entropy(g: CsrGraph, stats: CorpusStats) -> float:
    """
    D(p || q) in bits, with p the degree distribution of the graph and q the
    occurrence distribution of the corpus. Nodes never visited count once.
    """
    deg = g.degrees().astype(np.float64)
    if deg.sum() == 0:
        return 0.0
    q = np.where(stats.ocn > 0, stats.ocn, 1).astype(np.float64)
    # scipy normalises both vectors
    return float(max(0.0, entropy(deg, q, base=2)))


def walks_converged(D_curr: float, D_prev: float, delta: float) -> bool:
    return abs(D_curr - D_prev) <= delta
