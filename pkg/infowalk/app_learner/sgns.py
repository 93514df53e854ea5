# File: infowalk/app_learner/sgns.py
from typing import Sequence, Tuple

import numpy as np
from scipy.special import expit, log_expit

from .embedding_store import EmbeddingStore


def sgns_objective(c: np.ndarray, o_pos: np.ndarray, o_negs: np.ndarray) -> float:
    """Negative log-likelihood of one context vector against its target and negatives."""
    o_negs = np.atleast_2d(o_negs)
    loss = -log_expit(c @ o_pos)
    if o_negs.size:
        loss -= log_expit(-(o_negs @ c)).sum()
    return float(loss)


def sgns_gradients(c: np.ndarray, o_pos: np.ndarray, o_negs: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Gradients of sgns_objective.

    :return: (d/dc, d/do_pos, d/do_negs) with d/do_negs shaped like o_negs.
    """
    o_negs = np.atleast_2d(o_negs)
    pos_err = expit(c @ o_pos) - 1.0
    grad_c = pos_err * o_pos
    grad_pos = pos_err * c
    if o_negs.size:
        neg_err = expit(o_negs @ c)
        grad_c = grad_c + neg_err @ o_negs
        grad_negs = np.outer(neg_err, c)
    else:
        grad_negs = np.zeros_like(o_negs)
    return grad_c, grad_pos, grad_negs


def sgns_pair_update(store: EmbeddingStore, center_row: int, context_row: int, negatives: Sequence[int], lr: float):
    """
    One gradient step on a (context, center) pair. The context input row and
    the output rows of the center and the negatives move together, all from
    the values before the step. Negatives equal to the center are skipped.
    """
    negs = [r for r in negatives if r != center_row]
    rows = np.asarray([center_row] + negs, dtype=np.int64)
    labels = np.zeros(rows.size)
    labels[0] = 1.0

    c = store.phi_in[context_row].copy()
    outs = store.phi_out[rows]
    g = lr * (labels - expit(outs @ c))
    store.phi_in[context_row] += g @ outs
    np.add.at(store.phi_out, rows, np.outer(g, c))
