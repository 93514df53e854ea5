import numpy as np
import pytest
from hypothesis import given, strategies as st

from infowalk.app_graph import ContractViolation, intersect_count, intersect_galloping, intersect_linear
from infowalk.app_graph.intersect import _gallop

sorted_ids = st.sets(st.integers(min_value=0, max_value=500), max_size=120).map(sorted)


def test_example_intersection():
    assert intersect_galloping([1, 3, 5, 7, 9, 11], [3, 4, 5, 100]).tolist() == [3, 5]
    assert intersect_count([1, 3, 5, 7, 9, 11], [3, 4, 5, 100]) == 2


def test_empty_and_disjoint_ranges():
    assert intersect_galloping([], [1, 2, 3]).size == 0
    assert intersect_galloping([1, 2], []).size == 0
    assert intersect_galloping([1, 2], [10, 11, 12]).size == 0


def test_equal_sizes_use_linear_merge():
    assert intersect_galloping([1, 2, 3], [2, 3, 4]).tolist() == [2, 3]


def test_unsorted_operand_is_rejected():
    with pytest.raises(ContractViolation):
        intersect_galloping([3, 1], [1, 2, 3], check=True)
    with pytest.raises(ContractViolation):
        intersect_linear([1, 2], [2, 2], check=True)


@given(sorted_ids, sorted_ids)
def test_galloping_matches_linear_merge(a, b):
    fast = intersect_galloping(a, b, check=True)
    assert fast.tolist() == intersect_linear(a, b, check=True).tolist()
    assert fast.tolist() == sorted(set(a) & set(b))


@given(sorted_ids, sorted_ids)
def test_intersection_is_symmetric_and_sorted(a, b):
    ab = intersect_galloping(a, b)
    assert ab.tolist() == intersect_galloping(b, a).tolist()
    assert np.all(np.diff(ab) > 0)


def test_gallop_stops_at_first_value_not_below_target():
    large = list(range(0, 200, 2))
    assert _gallop(large, 0, 0) == 0
    assert _gallop(large, 7, 0) == 4
    assert _gallop(large, 8, 0) == 4
    assert _gallop(large, 150, 60) == 75
    assert _gallop(large, 10_000, 3) == len(large)
    # never moves backwards past its start
    assert _gallop(large, 2, 50) == 50


@given(st.lists(st.integers(min_value=0, max_value=1_000_000), min_size=1, max_size=40, unique=True))
def test_sparse_ids_gallop_through_a_long_list(picks):
    large = np.arange(0, 1_000_001, 3, dtype=np.int64)
    small = sorted(picks)
    expected = [x for x in small if x % 3 == 0]
    assert intersect_galloping(small, large, check=True).tolist() == expected
