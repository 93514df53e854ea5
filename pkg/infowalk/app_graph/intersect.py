# File: infowalk/app_graph/intersect.py
from bisect import bisect_left
from typing import List, Sequence, Union

import numpy as np

IdList = Union[Sequence[int], np.ndarray]

_EMPTY = np.empty(0, dtype=np.int64)


class ContractViolation(ValueError):
    pass


def _as_ids(values: IdList) -> np.ndarray:
    arr = np.asarray(values, dtype=np.int64)
    if arr.ndim != 1:
        raise ContractViolation("Id lists must be one-dimensional.")
    return arr


def _check_sorted(arr: np.ndarray, name: str):
    if arr.size > 1 and not np.all(arr[1:] > arr[:-1]):
        raise ContractViolation(f"Operand '{name}' is not strictly sorted ascending.")


def intersect_linear(a: IdList, b: IdList, check: bool = __debug__) -> np.ndarray:
    """Linear-merge intersection of two strictly sorted id lists."""
    a, b = _as_ids(a), _as_ids(b)
    if check:
        _check_sorted(a, "a")
        _check_sorted(b, "b")
    if a.size == 0 or b.size == 0:
        return _EMPTY.copy()
    return np.intersect1d(a, b, assume_unique=True)


def _gallop(large: List[int], target: int, lo: int) -> int:
    """First index >= lo whose value is not below target: doubling steps, then a bounded bisection."""
    n = len(large)
    if lo >= n or large[lo] >= target:
        return lo
    step = 1
    prev, hi = lo, lo + 1
    while hi < n and large[hi] < target:
        prev = hi
        step *= 2
        hi = lo + step
    return bisect_left(large, target, prev + 1, min(hi, n))


def intersect_galloping(a: IdList, b: IdList, check: bool = __debug__) -> np.ndarray:
    """
    Intersects two strictly sorted id lists.

    Equal-sized operands go through the linear merge. Otherwise the smaller
    list is walked in order and each id gallops forward through the larger
    one from where the previous id stopped, so the cost grows with the
    smaller list times the log of the gaps it skips.
    """
    a, b = _as_ids(a), _as_ids(b)
    if check:
        _check_sorted(a, "a")
        _check_sorted(b, "b")
    if a.size == 0 or b.size == 0:
        return _EMPTY.copy()
    if a.size == b.size:
        return intersect_linear(a, b, check=False)

    small, large = (a, b) if a.size < b.size else (b, a)
    # cheap range rejection before searching
    if small[-1] < large[0] or large[-1] < small[0]:
        return _EMPTY.copy()

    haystack = large.tolist()
    found: List[int] = []
    pos = 0
    for x in small.tolist():
        pos = _gallop(haystack, x, pos)
        if pos == len(haystack):
            break
        if haystack[pos] == x:
            found.append(x)
            pos += 1
    return np.asarray(found, dtype=np.int64)


def intersect_count(a: IdList, b: IdList, check: bool = __debug__) -> int:
    return int(intersect_galloping(a, b, check=check).size)
