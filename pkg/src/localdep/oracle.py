"""Quadratic reference implementations, written for obviousness rather than speed.

They share only the x-ordering (and its tie-break seed) with the fast paths,
so any disagreement points at the statistic computation itself.
"""

from __future__ import annotations

import math

from .core import PairedSample, UnitSquareSample, order_by_x

QUADRATIC_GUARD = 5_000


class GuardError(ValueError):
    """Raised when a quadratic oracle is asked for more points than its guard allows."""


def _check_guard(n: int, force: bool) -> None:
    if n > QUADRATIC_GUARD and not force:
        raise GuardError(f"n={n} exceeds the O(n²) oracle guard of {QUADRATIC_GUARD}; pass force=True")


def xi_bruteforce(s: PairedSample, tie_seed: int | None = 0, force: bool = False) -> float:
    _check_guard(s.n, force)
    n = s.n
    y = order_by_x(s, tie_seed).y_ordered.tolist()

    r = [sum(1 for b in y if b <= a) for a in y]
    l = [sum(1 for b in y if b >= a) for a in y]
    numerator = 0
    for i in range(n - 1):
        numerator += abs(r[i + 1] - r[i])

    has_ties = any(y[i] == y[j] for i in range(n) for j in range(i + 1, n))
    if not has_ties:
        return (n * n - 1 - 3 * numerator) / (n * n - 1)
    denom = 2 * sum(li * (n - li) for li in l)
    if denom == 0:
        raise ValueError("degenerate: Y constant")
    return (denom - n * numerator) / denom


def zeta_bruteforce(u: UnitSquareSample | PairedSample, epsilon: float, force: bool = False) -> float:
    if not epsilon > 0:
        raise ValueError("ε must be positive")
    if isinstance(u, UnitSquareSample):
        us, vs = u.us.tolist(), u.vs.tolist()
    else:
        us, vs = u.xs.tolist(), u.ys.tolist()
    n = len(us)
    _check_guard(n, force)

    devs = []
    for i in range(n):
        neighbours = [vs[j] for j in range(n) if j != i and abs(us[j] - us[i]) <= epsilon]
        if neighbours:
            devs.append(abs(math.fsum(neighbours) / len(neighbours) - vs[i]))
    if not devs:
        raise ValueError("ε below sample resolution")
    return math.fsum(devs) / len(devs)
