"""ε-neighbourhood local averages and the L¹ residual ζₙ(ε).

Neighbourhoods live on the PIT scale: ``j`` is a neighbour of ``i`` when
``j != i`` and ``|u_j - u_i| <= ε`` (closed window). Because the predicate is
monotone along sorted u, each neighbourhood is a contiguous run of the
u-sorted order, so everything here is a sort plus binary searches.

Window sums are accumulated exactly (as scaled integers) and rounded once,
which makes every local average equal to ``math.fsum(window) / count``
regardless of summation order. The brute-force oracle relies on this to
match bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import accumulate
from typing import Union

import numpy as np

from .core import PairedSample, UnitSquareSample

LIMIT = "limit"

Sample = Union[UnitSquareSample, PairedSample]


@dataclass(frozen=True, eq=False)
class EpsilonNeighborhoods:
    """Neighbour sets stored as windows ``order[lo[p]:hi[p]]`` of the u-sorted order.

    Position ``p`` in sorted order belongs to sample index ``order[p]``; the
    window includes that index itself, which ``neighbor_set`` drops.
    """

    epsilon: float | str
    order: np.ndarray
    lo: np.ndarray
    hi: np.ndarray

    @property
    def n(self) -> int:
        return len(self.order)

    def _position(self) -> np.ndarray:
        pos = np.empty_like(self.order)
        pos[self.order] = np.arange(self.n)
        return pos

    def sizes(self) -> np.ndarray:
        """Neighbour counts in sample order."""
        size_sorted = self.hi - self.lo - 1
        return size_sorted[self._position()]

    def neighbor_set(self, i: int) -> set[int]:
        p = self._position()[i]
        members = self.order[self.lo[p]:self.hi[p]]
        return {int(j) for j in members if j != i}

    @property
    def neighbor_sets(self) -> list[set[int]]:
        return [self.neighbor_set(i) for i in range(self.n)]


@dataclass(frozen=True)
class ResidualEstimate:
    zeta: float
    xi: float
    epsilon: float | str
    n: int
    n_used: int
    calibrated: bool = True


def _coords(sample: Sample) -> tuple[np.ndarray, np.ndarray, bool]:
    if isinstance(sample, UnitSquareSample):
        return sample.us, sample.vs, True
    return sample.xs, sample.ys, False


def _first_true(pred, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    # vectorised bisection for a predicate that is False...False True...True on [lo, hi]
    lo, hi = lo.copy(), hi.copy()
    while np.any(lo < hi):
        mid = (lo + hi) // 2
        ok = pred(mid)
        hi = np.where(ok, mid, hi)
        lo = np.where(ok, lo, mid + 1)
    return lo


def _windows(su: np.ndarray, eps: float) -> tuple[np.ndarray, np.ndarray]:
    n = len(su)
    pos = np.arange(n)
    # abs(a - b) == abs(b - a) in IEEE arithmetic, so both sides use the exact
    # float predicate of the brute-force scan
    lo = _first_true(lambda q: su[pos] - su[q] <= eps, np.zeros(n, dtype=np.int64), pos)
    # last q with su[q] - su[p] <= eps, found as first q where it fails
    hi = _first_true(lambda q: ~(su[np.minimum(q, n - 1)] - su[pos] <= eps) | (q >= n),
                     pos, np.full(n, n, dtype=np.int64))
    return lo, hi


def neighborhoods(u: Sample, epsilon: float) -> EpsilonNeighborhoods:
    if not epsilon > 0:
        raise ValueError("ε must be positive")
    us, _, _ = _coords(u)
    order = np.argsort(us, kind="stable")
    lo, hi = _windows(us[order], float(epsilon))
    return EpsilonNeighborhoods(float(epsilon), order, lo, hi)


def adjacent_neighborhoods(u: Sample) -> EpsilonNeighborhoods:
    """Immediate predecessor and successor in u-order (ties in u broken by index)."""
    us, _, _ = _coords(u)
    n = len(us)
    order = np.argsort(us, kind="stable")
    pos = np.arange(n)
    return EpsilonNeighborhoods(LIMIT, order, np.maximum(pos - 1, 0), np.minimum(pos + 2, n))


def local_average(v_values, nb: EpsilonNeighborhoods, i: int) -> float | None:
    """Mean of ``v_j`` over the neighbours of ``i``; ``None`` for an empty set."""
    members = sorted(nb.neighbor_set(i))
    if not members:
        return None
    v = np.asarray(v_values, dtype=np.float64)
    return math.fsum(v[members].tolist()) / len(members)


def _scaled_ints(values: list[float]) -> tuple[list[int], int]:
    ratios = [x.as_integer_ratio() for x in values]
    scale = max(q for _, q in ratios)  # all denominators are powers of two
    return [p * (scale // q) for p, q in ratios], scale


def _residuals(vs: np.ndarray, nb: EpsilonNeighborhoods) -> list[float]:
    """|local average - v_i| in sample order; NaN where the neighbourhood is empty."""
    sorted_v = vs[nb.order].tolist()
    ints, scale = _scaled_ints(sorted_v)
    prefix = [0, *accumulate(ints)]
    out = [math.nan] * nb.n
    for p, (a, b) in enumerate(zip(nb.lo.tolist(), nb.hi.tolist())):
        count = b - a - 1
        if count == 0:
            continue
        total = (prefix[b] - prefix[a] - ints[p]) / scale  # single correctly rounded step
        out[nb.order[p]] = abs(total / count - sorted_v[p])
    return out


def xi_from_zeta(zeta: float) -> float:
    """1 - 4ζ, using E|V - EV| = 1/4 for a uniform V."""
    if zeta < 0:
        raise ValueError("ζ must be non-negative")
    return 1.0 - 4.0 * zeta


def _estimate(sample: Sample, nb: EpsilonNeighborhoods) -> ResidualEstimate:
    _, vs, calibrated = _coords(sample)
    devs = [d for d in _residuals(vs, nb) if not math.isnan(d)]
    if not devs:
        raise ValueError("ε below sample resolution")
    zeta = math.fsum(devs) / len(devs)
    return ResidualEstimate(zeta, xi_from_zeta(zeta), nb.epsilon, nb.n, len(devs), calibrated)


def zeta_hat(u: Sample, epsilon: float) -> ResidualEstimate:
    """ζₙ(ε): mean of |V̄ᵢ(ε) - Vᵢ| over points that have at least one neighbour.

    A PairedSample is accepted too; the result is then flagged
    ``calibrated=False`` because the factor 4 in ξ assumes uniform marginals.
    """
    return _estimate(u, neighborhoods(u, epsilon))


def zeta_limit(u: Sample) -> ResidualEstimate:
    """ζₙ with each neighbourhood shrunk to the rank-adjacent points."""
    return _estimate(u, adjacent_neighborhoods(u))
