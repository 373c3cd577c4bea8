import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fpcil import rng


def test_same_seed_same_path_is_identical():
    a = rng.stream(42, "x", 3).normal(size=16)
    b = rng.stream(42, "x", 3).normal(size=16)
    assert np.array_equal(a, b)


def test_different_paths_differ():
    a = rng.stream(42, "x", 3).normal(size=16)
    b = rng.stream(42, "x", 4).normal(size=16)
    c = rng.stream(42, "y", 3).normal(size=16)
    assert not np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_different_seeds_differ():
    a = rng.stream(1).normal(size=8)
    b = rng.stream(2).normal(size=8)
    assert not np.array_equal(a, b)


def test_string_and_int_components_are_distinct_dimensions():
    # "3" the string hashes, 3 the int is used directly
    a = rng.stream(0, "3").normal(size=4)
    b = rng.stream(0, 3).normal(size=4)
    assert not np.array_equal(a, b)


def test_negative_path_component_rejected():
    with pytest.raises(ValueError):
        rng.stream(0, -1)


def test_known_draw_frozen():
    # pin the generator choice itself: if the bit generator or derivation
    # ever changes, this value changes and the break is visible
    gen = rng.stream(1234, "freeze-check")
    assert gen.integers(0, 1_000_000) == 567691


@given(st.lists(st.integers(), max_size=40), st.integers(min_value=0, max_value=2**31))
def test_fisher_yates_is_a_permutation(items, seed):
    out = rng.fisher_yates(items, rng.stream(seed, "shuffle"))
    assert sorted(out) == sorted(items)


def test_fisher_yates_deterministic_and_nonmutating():
    items = list(range(20))
    snapshot = list(items)
    a = rng.fisher_yates(items, rng.stream(7, "s"))
    b = rng.fisher_yates(items, rng.stream(7, "s"))
    assert a == b
    assert items == snapshot
    assert a != items  # 20! leaves essentially no chance of the identity


def test_fisher_yates_uniformity_smoke():
    # all 6 permutations of 3 items should appear with roughly equal counts
    from collections import Counter

    counts = Counter(tuple(rng.fisher_yates([0, 1, 2], rng.stream(n, "u"))) for n in range(1200))
    assert len(counts) == 6
    assert min(counts.values()) > 120
