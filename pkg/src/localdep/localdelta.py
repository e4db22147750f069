"""δ-localized deviation matrix, its row means and the nearest-neighbour limit."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import PairedSample, order_by_x


@dataclass(frozen=True, eq=False)
class LocalDeviationMatrix:
    """``entries[i, j] = |y_i - y_j|`` where ``|x_i - x_j| < delta``, else 0.

    ``window`` keeps the off-diagonal in-window mask: an entry of 0 can mean
    either "outside the window" or "equal y", and row means need to tell them
    apart.
    """

    entries: np.ndarray
    window: np.ndarray
    delta: float

    @property
    def n(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True, eq=False)
class RowMeanVector:
    # NaN marks an empty window
    means: np.ndarray
    neighbor_counts: np.ndarray

    def present(self) -> np.ndarray:
        return self.neighbor_counts > 0


def deviation_matrix(s: PairedSample, delta: float) -> LocalDeviationMatrix:
    if not delta > 0:
        raise ValueError("δ must be positive")
    dx = np.abs(s.xs[:, None] - s.xs[None, :])
    window = dx < delta
    np.fill_diagonal(window, False)
    entries = np.where(window, np.abs(s.ys[:, None] - s.ys[None, :]), 0.0)
    return LocalDeviationMatrix(entries, window, float(delta))


def row_means(m: LocalDeviationMatrix) -> RowMeanVector:
    counts = m.window.sum(axis=1)
    sums = m.entries.sum(axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        means = np.where(counts > 0, sums / counts, np.nan)
    return RowMeanVector(means, counts)


def scalar_mean(w: RowMeanVector) -> float:
    """Average of the row means, skipping rows whose window is empty."""
    present = w.means[w.present()]
    if present.size == 0:
        raise ValueError("no δ-neighbors at this scale")
    return math.fsum(present.tolist()) / present.size


def local_delta_mean(s: PairedSample, delta: float) -> float:
    """Full pipeline: matrix, row means, scalar."""
    return scalar_mean(row_means(deviation_matrix(s, delta)))


def adjacent_l1(s: PairedSample, tie_seed: int | None = 0) -> float:
    """Mean absolute difference of consecutive y concomitants after sorting by x."""
    y = order_by_x(s, tie_seed).y_ordered
    gaps = np.abs(np.diff(y))
    return math.fsum(gaps.tolist()) / (s.n - 1)
