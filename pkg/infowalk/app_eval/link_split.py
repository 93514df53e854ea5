# File: infowalk/app_eval/link_split.py
import logging
from dataclasses import dataclass

import numpy as np

from infowalk.app_graph import CsrGraph

logger = logging.getLogger(__name__)


class SplitError(ValueError):
    pass


@dataclass
class LinkSplit:
    train_graph: CsrGraph
    pos_test: np.ndarray
    neg_test: np.ndarray
    split_seed: int

    @property
    def test_size(self) -> int:
        return int(self.pos_test.shape[0])


def _test_candidates(g: CsrGraph):
    src, dst = g.edge_pairs()
    weights = g.weights.copy() if g.weighted else None
    loops = src == dst
    # undirected edges are stored twice; keep one copy
    keep = ~loops if g.directed else src < dst
    return src, dst, weights, loops, keep


def split_edges(g: CsrGraph, fraction: float, seed: int, max_tries_per_edge: int = 100) -> LinkSplit:
    """
    Moves round(fraction * E) edges into the positive test set and draws as
    many node pairs that are not edges of g as negatives. Self-loops always
    stay in the training graph.
    """
    if not 0 <= fraction < 1:
        raise ValueError(f"fraction must be in [0, 1), got {fraction}.")
    rng = np.random.default_rng(seed)
    n = g.node_count
    src, dst, weights, loops, keep = _test_candidates(g)
    cand = np.flatnonzero(keep)
    k = int(round(fraction * cand.size))

    picked = np.sort(rng.choice(cand, size=k, replace=False)) if k else np.empty(0, dtype=np.int64)
    removed = np.zeros(src.size, dtype=bool)
    removed[picked] = True
    remain = (keep | loops) & ~removed
    train_graph = CsrGraph.from_edges(
        src[remain], dst[remain], None if weights is None else weights[remain], node_count=n, directed=g.directed
    )
    pos = np.stack([src[picked], dst[picked]], axis=1) if k else np.empty((0, 2), dtype=np.int64)

    existing = set((src * n + dst).tolist())
    negatives = set()
    tries, budget = 0, max_tries_per_edge * k + 1000
    while len(negatives) < k:
        if tries >= budget:
            raise SplitError(f"Could only draw {len(negatives)} of {k} non-edges after {tries} tries; graph too dense.")
        tries += 1
        u, v = (int(x) for x in rng.integers(0, n, size=2))
        if u == v:
            continue
        if not g.directed and u > v:
            u, v = v, u
        if u * n + v in existing or (u, v) in negatives:
            continue
        negatives.add((u, v))
    neg = np.asarray(sorted(negatives), dtype=np.int64).reshape(-1, 2)

    logger.info(f"--- Link split (seed {seed}): {k} positive / {neg.shape[0]} negative test pairs, "
                f"{train_graph.edge_count} stored train edges ---")
    return LinkSplit(train_graph=train_graph, pos_test=pos, neg_test=neg, split_seed=seed)
