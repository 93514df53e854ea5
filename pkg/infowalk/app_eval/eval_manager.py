# File: infowalk/app_eval/eval_manager.py
import logging
from typing import Callable, Dict, Tuple

import numpy as np
import pandas as pd
from sklearn.metrics import roc_auc_score

from infowalk.app_learner import EmbeddingStore
from infowalk.app_utils import derive_seed

from .link_split import LinkSplit

logger = logging.getLogger(__name__)


def pair_scores(vectors: np.ndarray, pairs: np.ndarray) -> np.ndarray:
    if pairs.size == 0:
        return np.empty(0, dtype=np.float64)
    return np.einsum("ij,ij->i", vectors[pairs[:, 0]], vectors[pairs[:, 1]])


def auc_from_scores(pos: np.ndarray, neg: np.ndarray) -> float:
    """P(pos > neg) + 0.5 * P(tie), the area under the ROC curve."""
    pos, neg = np.asarray(pos, dtype=np.float64), np.asarray(neg, dtype=np.float64)
    if pos.size == 0 or neg.size == 0:
        raise ValueError("AUC needs at least one positive and one negative score.")
    labels = np.concatenate([np.ones(pos.size), np.zeros(neg.size)])
    return float(roc_auc_score(labels, np.concatenate([pos, neg])))


def auc_pairwise(pos: np.ndarray, neg: np.ndarray) -> float:
    """All-pairs comparison; quadratic, for checking auc_from_scores."""
    pos, neg = np.asarray(pos, dtype=np.float64), np.asarray(neg, dtype=np.float64)
    diff = pos[:, None] - neg[None, :]
    return float(((diff > 0).sum() + 0.5 * (diff == 0).sum()) / diff.size)


def auc_from_vectors(emb: np.ndarray, split: LinkSplit) -> float:
    """AUC of dot-product scores of the held-out edges against the sampled non-edges."""
    return auc_from_scores(pair_scores(emb, split.pos_test), pair_scores(emb, split.neg_test))


def auc_score(store: EmbeddingStore, split: LinkSplit, vectors: str = "in") -> float:
    return auc_from_vectors(store.node_vectors(vectors), split)


def repeat_eval(run_trial: Callable[[int, int], float], trials: int, seed: int) -> Tuple[pd.DataFrame, Dict[str, float]]:
    """
    Runs run_trial(trial, trial_seed) for trials independent seeds: trial 0
    uses seed itself, later trials seeds derived from it.

    :return: A (trial, seed, auc) frame and a {'mean', 'std'} summary (population std).
    """
    if trials < 1:
        raise ValueError(f"trials must be at least 1, got {trials}.")
    rows = []
    for trial in range(trials):
        trial_seed = seed if trial == 0 else derive_seed(seed, "eval", trial)
        auc = float(run_trial(trial, trial_seed))
        logger.info(f"--- Trial {trial + 1}/{trials}: AUC {auc:.4f} ---")
        rows.append({"trial": trial, "seed": trial_seed, "auc": auc})
    frame = pd.DataFrame(rows)
    summary = {"mean": float(frame["auc"].mean()), "std": float(frame["auc"].std(ddof=0))}
    return frame, summary


def results_frame(frame: pd.DataFrame, summary: Dict[str, float]) -> pd.DataFrame:
    """Per-trial rows followed by mean and std summary rows."""
    tail = pd.DataFrame([
        {"trial": "mean", "seed": "", "auc": summary["mean"]},
        {"trial": "std", "seed": "", "auc": summary["std"]},
    ])
    return pd.concat([frame.astype({"trial": object, "seed": object}), tail], ignore_index=True)
