# File: infowalk/app_sampler/strategies.py
import math
from bisect import bisect_left
from dataclasses import dataclass
from random import Random
from typing import Dict, List, Optional

from infowalk.app_graph import CsrGraph, common_neighbor_count

from .messages import MODE_FIXED, MODE_FULL, MODE_INCREMENTAL, MessageCodec

KINDS = ("huge", "deepwalk", "node2vec")

# trials per step before the last candidate is taken as is
REJECTION_CAP = 64


@dataclass(frozen=True)
class WalkStrategy:
    """
    How the next hop is chosen and when walks stop.

    fixed_length == 0 selects information-centric stopping: walks end by the
    entropy/length correlation test and rounds end once the corpus
    divergence settles. A positive fixed_length gives the routine
    configuration of fixed_length nodes per walk and walks_per_node rounds.
    incremental=False carries the full path in every message and re-evaluates
    the statistics from it.
    """
    kind: str = "huge"
    p: float = 1.0
    q: float = 1.0
    fixed_length: int = 0
    walks_per_node: int = 10
    l_min: int = 5
    l_max: int = 80
    max_rounds: int = 50
    incremental: bool = True

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"Unknown walk strategy '{self.kind}'.")
        if self.kind == "node2vec" and not (self.p > 0 and self.q > 0):
            raise ValueError(f"node2vec needs p, q > 0 (got p={self.p}, q={self.q}).")
        if self.fixed_length < 0 or self.walks_per_node < 1:
            raise ValueError("fixed_length must be >= 0 and walks_per_node >= 1.")

    @property
    def information_centric(self) -> bool:
        return self.fixed_length == 0

    @property
    def stopping(self) -> str:
        if self.information_centric:
            return "information_centric"
        return f"fixed({self.fixed_length},{self.walks_per_node})"

    @property
    def carries_prev(self) -> bool:
        return self.kind == "node2vec"

    def codec(self) -> MessageCodec:
        if not self.incremental:
            mode = MODE_FULL
        elif self.information_centric:
            mode = MODE_INCREMENTAL
        else:
            mode = MODE_FIXED
        return MessageCodec(mode, with_prev=self.carries_prev)

    @classmethod
    def from_config(cls, config) -> "WalkStrategy":
        return cls(
            kind=config.strategy,
            p=config.p,
            q=config.q,
            fixed_length=config.fixed_length,
            walks_per_node=config.walks_per_node,
            l_min=config.l_min,
            l_max=config.l_max,
            max_rounds=config.max_rounds,
        )


def huge_acceptance(g: CsrGraph, u: int, v: int) -> float:
    """
    Acceptance probability of moving u -> v: tanh of the common-neighbor
    and degree-ratio score, scaled by w(u, v) on weighted graphs.
    """
    du, dv = g.degree(u), g.degree(v)
    cm = common_neighbor_count(g, u, v)
    denom = max(1, du - cm)
    # a sink on a directed graph has out-degree 0
    a, b = max(du, 1), max(dv, 1)
    alpha = max(a / b, b / a) / denom
    if g.weighted:
        alpha *= g.weight(u, v)
    return math.tanh(alpha)


def node2vec_weight(d_tv: int, p: float, q: float) -> float:
    if d_tv == 0:
        return 1.0 / p
    if d_tv == 1:
        return 1.0
    if d_tv == 2:
        return 1.0 / q
    raise ValueError(f"d_tv must be 0, 1 or 2, got {d_tv}.")


class NextHopSampler:
    """
    Walking-backtracking next-hop selection: a neighbor is drawn uniformly
    and accepted with its strategy probability, otherwise the walker stays
    and draws again.
    """

    def __init__(self, g: CsrGraph, strategy: WalkStrategy):
        self.g = g
        self.strategy = strategy
        self.adj = g.adjacency_lists()
        self.offsets = g.offsets.tolist()
        self.weights = g.weights.tolist() if g.weighted else None
        self.envelope = max(1.0 / strategy.p, 1.0, 1.0 / strategy.q)
        self._accept: Dict[int, float] = {}
        self._max_weight: Dict[int, float] = {}

    def _weight_ratio(self, u: int, i: int) -> float:
        start = self.offsets[u]
        top = self._max_weight.get(u)
        if top is None:
            top = max(self.weights[start:self.offsets[u + 1]])
            self._max_weight[u] = top
        return self.weights[start + i] / top

    def acceptance(self, u: int, i: int, v: int, prev: Optional[int]) -> float:
        kind = self.strategy.kind
        if kind == "huge":
            key = self.offsets[u] + i
            prob = self._accept.get(key)
            if prob is None:
                prob = huge_acceptance(self.g, u, v)
                self._accept[key] = prob
            return prob

        base = self._weight_ratio(u, i) if self.weights is not None else 1.0
        if kind == "deepwalk" or prev is None:
            return base
        if v == prev:
            d_tv = 0
        else:
            prev_nbrs: List[int] = self.adj[prev]
            j = bisect_left(prev_nbrs, v)
            d_tv = 1 if j < len(prev_nbrs) and prev_nbrs[j] == v else 2
        return base * node2vec_weight(d_tv, self.strategy.p, self.strategy.q) / self.envelope

    def choose(self, u: int, prev: Optional[int], rng: Random) -> Optional[int]:
        """Next node after u, or None when u has no (out-)neighbors."""
        nbrs = self.adj[u]
        deg = len(nbrs)
        if deg == 0:
            return None
        if self.strategy.kind == "deepwalk" and self.weights is None:
            return nbrs[rng.randrange(deg)]

        v = nbrs[0]
        for _ in range(REJECTION_CAP):
            i = rng.randrange(deg)
            v = nbrs[i]
            if rng.random() < self.acceptance(u, i, v, prev):
                return v
        return v
