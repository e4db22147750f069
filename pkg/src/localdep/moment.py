"""L² residual ζ⁽²⁾, its normalisation η⁽²⁾ and the variance decomposition.

Conditional means E[V | U] come from one of two estimators:

* ``cond_mean_knn``: leave-one-out average over the k nearest conditioning
  values (distance ties go to the smaller index);
* ``cond_mean_binned``: regressogram over equal-width right-closed cells,
  each point included in its own cell mean. This makes
  ``Var(v) = Var(fit) + mean((v - fit)**2)`` an exact finite-sample identity.

Both accept a :class:`UnitSquareSample` (cells partition [0, 1]) or a raw
:class:`PairedSample` (cells partition [min x, max x]). Variances are
population-style (divide by n).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .core import PairedSample, UnitSquareSample

Sample = Union[UnitSquareSample, PairedSample]


@dataclass(frozen=True, eq=False)
class ConditionalMeanFit:
    estimates: np.ndarray
    method: str
    param: int
    leave_one_out: bool


@dataclass(frozen=True)
class L2Report:
    zeta2: float
    eta2: float
    var_v: float
    between: float
    within: float


def _coords(sample: Sample) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(sample, UnitSquareSample):
        return sample.us, sample.vs
    return sample.xs, sample.ys


def default_k(n: int) -> int:
    return min(max(1, math.ceil(math.sqrt(n))), n - 1)


def default_bins(n: int) -> int:
    return min(max(1, math.ceil(n ** (1.0 / 3.0))), n)


def cond_mean_knn(u: Sample, k: int) -> ConditionalMeanFit:
    us, vs = _coords(u)
    n = len(us)
    if not 1 <= k <= n - 1:
        raise ValueError(f"k must lie in [1, {n - 1}], got {k}")
    idx = np.arange(n)

    # right run: u_j >= u_i in (u asc, index asc) order, i itself skipped
    right = np.lexsort((idx, us))
    right_u = us[right]
    # left run: u_j < u_i in (u desc, index asc) order, so both runs are sorted by (distance, index)
    left = np.lexsort((idx, -us))
    left_u = us[left]

    pr = np.searchsorted(right_u, us, side="left")
    pl = np.searchsorted(-left_u, -us, side="right")

    def skip_self(p):
        hit = (p < n) & (right[np.minimum(p, n - 1)] == idx)
        return p + hit

    pr = skip_self(pr)
    total = np.zeros(n)
    inf = np.inf
    for _ in range(k):
        r_ok = pr < n
        l_ok = pl < n
        rj = right[np.minimum(pr, n - 1)]
        lj = left[np.minimum(pl, n - 1)]
        dr = np.where(r_ok, us[rj] - us, inf)
        dl = np.where(l_ok, us - us[lj], inf)
        take_right = (dr < dl) | ((dr == dl) & (rj < lj))
        total += np.where(take_right, vs[rj], vs[lj])
        pr = np.where(take_right, skip_self(pr + 1), pr)
        pl = np.where(take_right, pl, pl + 1)
    return ConditionalMeanFit(total / k, "knn", k, True)


def bin_index(u: Sample, bins: int) -> np.ndarray:
    """Cell of each conditioning value; cells are right-closed, the first one closed."""
    if isinstance(u, UnitSquareSample):
        scaled = u.us
    else:
        lo, hi = u.xs.min(), u.xs.max()
        scaled = (u.xs - lo) / (hi - lo) if hi > lo else np.ones_like(u.xs)
    cell = np.ceil(scaled * bins).astype(np.int64) - 1
    return np.clip(cell, 0, bins - 1)


def cond_mean_binned(u: Sample, bins: int) -> ConditionalMeanFit:
    _, vs = _coords(u)
    n = len(vs)
    if not 1 <= bins <= n:
        raise ValueError(f"bins must lie in [1, {n}], got {bins}")
    cell = bin_index(u, bins)
    sums = np.bincount(cell, weights=vs, minlength=bins)
    counts = np.bincount(cell, minlength=bins)
    means = sums / np.maximum(counts, 1)
    return ConditionalMeanFit(means[cell], "binned", bins, False)


def _pop_var(a: np.ndarray) -> float:
    centred = a - math.fsum(a.tolist()) / len(a)
    return math.fsum((centred * centred).tolist()) / len(a)


def l2_report(u: Sample, fit: ConditionalMeanFit) -> L2Report:
    _, vs = _coords(u)
    if len(fit.estimates) != len(vs):
        raise ValueError("fit and sample lengths differ")
    var_v = _pop_var(vs)
    if var_v == 0.0:
        raise ValueError("degenerate: V constant")
    resid = vs - fit.estimates
    within = math.fsum((resid * resid).tolist()) / len(vs)
    between = _pop_var(fit.estimates)
    return L2Report(within, 1.0 - within / var_v, var_v, between, within)


def eta2_knn(u: Sample, k: int | None = None) -> L2Report:
    n = len(_coords(u)[0])
    return l2_report(u, cond_mean_knn(u, default_k(n) if k is None else k))


def eta2_binned(u: Sample, bins: int | None = None) -> L2Report:
    n = len(_coords(u)[0])
    return l2_report(u, cond_mean_binned(u, default_bins(n) if bins is None else bins))


def r_squared_ols(s: Sample) -> float:
    """Squared Pearson correlation, i.e. R² of the least-squares line of y on x."""
    x, y = _coords(s)
    xc = x - x.mean()
    yc = y - y.mean()
    sxx = float(xc @ xc)
    syy = float(yc @ yc)
    if sxx == 0.0 or syy == 0.0:
        raise ValueError("degenerate: zero variance")
    sxy = float(xc @ yc)
    return min(1.0, sxy * sxy / (sxx * syy))
