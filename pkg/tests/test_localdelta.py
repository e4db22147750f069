import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from localdep.core import PairedSample, load_sample, order_by_x
from localdep.localdelta import (RowMeanVector, adjacent_l1, deviation_matrix, local_delta_mean,
                                 row_means, scalar_mean)


def test_deviation_matrix_hand():
    s = load_sample([(0, 0), (1, 1)])
    assert deviation_matrix(s, 0.5).entries.tolist() == [[0, 0], [0, 0]]
    assert deviation_matrix(s, 2).entries.tolist() == [[0, 1], [1, 0]]
    assert not deviation_matrix(load_sample([(0, 5), (0, 5)]), 3).entries.any()


def test_deviation_window_is_strict():
    s = load_sample([(0, 0), (1, 1)])
    assert not deviation_matrix(s, 1.0).window.any()


@pytest.mark.parametrize("delta", [0, -1.0, float("nan")])
def test_deviation_matrix_rejects_bad_delta(delta):
    with pytest.raises(ValueError):
        deviation_matrix(load_sample([(0, 0), (1, 1)]), delta)


def test_row_means_hand():
    s = load_sample([(0, 0), (1, 1)])
    assert row_means(deviation_matrix(s, 2)).means.tolist() == [1, 1]
    w = row_means(deviation_matrix(s, 0.5))
    assert np.isnan(w.means).all() and w.neighbor_counts.tolist() == [0, 0]
    three = load_sample([(0, 0), (0.1, 1), (0.2, 0)])
    w = row_means(deviation_matrix(three, 0.15))
    assert w.means.tolist() == [1, 1, 1]
    assert w.neighbor_counts.tolist() == [1, 2, 1]


def test_row_means_count_equal_y_neighbours():
    # a zero entry inside the window must still count as a neighbour
    s = load_sample([(0, 3), (0.1, 3), (0.2, 5)])
    w = row_means(deviation_matrix(s, 0.15))
    assert w.means.tolist() == [0.0, 1.0, 2.0]


def test_scalar_mean():
    assert scalar_mean(RowMeanVector(np.array([1.0, 1.0]), np.array([1, 1]))) == 1
    assert scalar_mean(RowMeanVector(np.array([1.0, np.nan, 3.0]), np.array([2, 0, 1]))) == 2
    with pytest.raises(ValueError, match="no δ-neighbors at this scale"):
        scalar_mean(RowMeanVector(np.array([np.nan, np.nan]), np.array([0, 0])))


def test_adjacent_l1_hand():
    assert adjacent_l1(load_sample([(1, 1), (2, 3), (3, 2)])) == 1.5
    assert adjacent_l1(load_sample([(1, 4), (3, 4), (2, 4)])) == 0
    assert adjacent_l1(load_sample([(1, 1), (2, 2), (3, 3)])) == 1


pairs = st.lists(st.tuples(st.floats(-10, 10), st.floats(-10, 10)), min_size=2, max_size=25)


@settings(max_examples=50, deadline=None)
@given(pairs, st.floats(0.01, 5), st.floats(0.01, 5))
def test_deviation_matrix_monotone_in_delta(rows, d1, d2):
    s = load_sample(rows)
    lo, hi = sorted((d1, d2))
    a, b = deviation_matrix(s, lo), deviation_matrix(s, hi)
    assert np.all(a.entries <= b.entries)
    m = a.entries
    assert np.array_equal(m, m.T) and not np.diag(m).any()


@settings(max_examples=50, deadline=None)
@given(pairs)
def test_wide_delta_gives_unmasked_means(rows):
    s = load_sample(rows)
    w = row_means(deviation_matrix(s, 100.0))
    n = s.n
    for i in range(n):
        others = [abs(s.ys[i] - s.ys[j]) for j in range(n) if j != i]
        assert w.means[i] == pytest.approx(sum(others) / len(others), rel=1e-12, abs=1e-12)


def boundary_aware_adjacent(ys_in_x_order):
    """Per-point average of adjacent |Δy|, one neighbour at each end, then the mean."""
    d = [abs(b - a) for a, b in zip(ys_in_x_order, ys_in_x_order[1:])]
    n = len(ys_in_x_order)
    per_point = [d[0]] + [(d[i - 1] + d[i]) / 2 for i in range(1, n - 1)] + [d[-1]]
    return math.fsum(per_point) / n


def test_delta_link_equispaced(rng):
    for _ in range(20):
        n = int(rng.integers(3, 60))
        gap = float(rng.uniform(0.1, 3))
        xs = rng.permutation(n) * gap + rng.uniform(-5, 5)
        ys = rng.normal(size=n)
        s = PairedSample(xs, ys)
        y_sorted = order_by_x(s, 0).y_ordered.tolist()
        assert local_delta_mean(s, 1.5 * gap) == boundary_aware_adjacent(y_sorted)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-1000, 1000), min_size=2, max_size=40, unique=True), st.integers(0, 10))
def test_adjacent_l1_invariant_under_increasing_x_maps(ints, seed):
    xs = np.asarray(ints, dtype=float)
    ys = np.sin(np.arange(len(xs)) * 1.7)
    a = adjacent_l1(PairedSample(xs, ys), seed)
    b = adjacent_l1(PairedSample(np.arctan(xs / 1000) * 7 - 1, ys), seed + 1)
    assert a == b
