# File: infowalk/app_stats/walk_stats.py
import math
from collections import Counter
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence

import numpy as np

# variances at or below this are treated as zero
VARIANCE_EPS = 1e-12


def _xlog2x(x: float) -> float:
    return x * math.log2(x) if x > 0 else 0.0


@dataclass(slots=True)
class WalkInfoState:
    """
    Constant-size information summary of one ongoing walk.

    H is the entropy (bits) of the node-occurrence distribution of the path
    so far and L its length. The E_* fields are running means over the
    per-step series (H_1, L_1), ..., (H_L, L_L).
    """
    H: float = 0.0
    L: int = 1
    E_H: float = 0.0
    E_L: float = 1.0
    E_HL: float = 0.0
    E_H2: float = 0.0
    E_L2: float = 1.0

    @classmethod
    def start(cls) -> "WalkInfoState":
        """State of a walk that holds only its source node."""
        return cls()

    def as_tuple(self):
        return (self.H, self.L, self.E_H, self.E_L, self.E_HL, self.E_H2, self.E_L2)

    def advance(self, n_before: int) -> "WalkInfoState":
        """Appends one node seen n_before times already; returns the new state."""
        H_new = entropy_step(self, n_before, self.L)
        return corr_update(self, H_new, self.L + 1)


def entropy_full(path: Sequence[int]) -> float:
    """Entropy in bits of the node-occurrence distribution of a path."""
    if len(path) == 0:
        raise ValueError("Entropy of an empty path is undefined.")
    L = len(path)
    counts = np.fromiter(Counter(path).values(), dtype=np.float64)
    probs = counts / L
    return float(max(0.0, -np.sum(probs * np.log2(probs))))


def entropy_step(state: WalkInfoState, n_before: int, L_before: int) -> float:
    """
    Entropy after appending one node to a walk, in O(1).

    :param state: Current state; only state.H is read.
    :param n_before: Occurrences of the appended node before the append (0 if unseen).
    :param L_before: Walk length before the append.
    :return: H of the extended walk.
    """
    if n_before < 0 or L_before < 1:
        raise ValueError(f"Invalid counts: n_before={n_before}, L_before={L_before}.")
    if n_before > L_before:
        raise ValueError(f"n_before={n_before} exceeds walk length {L_before}.")
    L = L_before
    log2_t = _xlog2x(L) - _xlog2x(L + 1) + _xlog2x(n_before + 1) - _xlog2x(n_before)
    H_new = (state.H * L - log2_t) / (L + 1)
    # rounding can leave a tiny negative value on one-symbol walks
    return H_new if H_new > 0.0 else 0.0


def corr_update(state: WalkInfoState, H_new: float, L_new: int) -> WalkInfoState:
    """Folds the step (H_new, L_new) into the running means; p = L_new."""
    if L_new != state.L + 1:
        raise ValueError(f"L_new must be {state.L + 1}, got {L_new}.")
    p = L_new
    keep = (p - 1) / p
    return replace(
        state,
        H=H_new,
        L=L_new,
        E_H=keep * state.E_H + H_new / p,
        E_L=keep * state.E_L + L_new / p,
        E_HL=keep * state.E_HL + (H_new * L_new) / p,
        E_H2=keep * state.E_H2 + (H_new * H_new) / p,
        E_L2=keep * state.E_L2 + (L_new * L_new) / p,
    )


def _r_squared_from_means(E_H, E_L, E_HL, E_H2, E_L2) -> Optional[float]:
    var_h = E_H2 - E_H * E_H
    var_l = E_L2 - E_L * E_L
    if var_h <= VARIANCE_EPS or var_l <= VARIANCE_EPS:
        return None
    cov = E_HL - E_H * E_L
    r2 = (cov * cov) / (var_h * var_l)
    return min(1.0, max(0.0, r2))


def r_squared(state: WalkInfoState) -> Optional[float]:
    """
    Squared correlation between the entropy and length series.
    Returns None when undefined (fewer than two steps or a zero variance).
    """
    if state.L < 2:
        return None
    return _r_squared_from_means(state.E_H, state.E_L, state.E_HL, state.E_H2, state.E_L2)


def _terminate(L: int, r2: Optional[float], mu: float, l_min: int, l_max: int) -> bool:
    if L >= l_max:
        return True
    if L < l_min or r2 is None:
        return False
    return r2 < mu


def should_terminate(state: WalkInfoState, mu: float, l_min: int = 5, l_max: int = 80) -> bool:
    return _terminate(state.L, r_squared(state), mu, l_min, l_max)


# --- full-path reference versions ---

def entropy_series(path: Sequence[int]) -> List[float]:
    """H of every prefix of the path, each evaluated from its full count table."""
    counts: Counter = Counter()
    series = []
    for i, node in enumerate(path, start=1):
        counts[node] += 1
        probs = np.fromiter(counts.values(), dtype=np.float64) / i
        series.append(float(max(0.0, -np.sum(probs * np.log2(probs)))))
    return series


def r_squared_full(path: Sequence[int]) -> Optional[float]:
    if len(path) < 2:
        return None
    H = np.asarray(entropy_series(path), dtype=np.float64)
    L = np.arange(1, len(path) + 1, dtype=np.float64)
    return _r_squared_from_means(H.mean(), L.mean(), (H * L).mean(), (H * H).mean(), (L * L).mean())


def should_terminate_full(path: Sequence[int], mu: float, l_min: int = 5, l_max: int = 80) -> bool:
    return _terminate(len(path), r_squared_full(path), mu, l_min, l_max)
