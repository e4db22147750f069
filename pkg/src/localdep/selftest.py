"""Fast sanity checks run by ``localdep selftest``."""

from __future__ import annotations

import numpy as np

from .chatterjee import chatterjee_xi, chatterjee_xi_large
from .core import PairedSample, UnitSquareSample, empirical_pit, load_sample
from .epsresid import zeta_hat, zeta_limit
from .localdelta import adjacent_l1
from .moment import cond_mean_binned, l2_report
from .oracle import xi_bruteforce, zeta_bruteforce


def _differential(seed: int, cases: int = 50) -> int:
    rng = np.random.default_rng(seed)
    mismatches = 0
    for t in range(cases):
        n = int(rng.integers(2, 80))
        x = rng.integers(0, 6, n).astype(float) if t % 2 else rng.random(n)
        y = rng.integers(0, 4, n).astype(float) if t % 3 == 0 else rng.random(n)
        s = PairedSample(x, y)
        outcome = []
        for fn in (chatterjee_xi_large, xi_bruteforce):
            try:
                r = fn(s, t)
                outcome.append(getattr(r, "xi", r))
            except ValueError as exc:
                outcome.append(str(exc))
        mismatches += outcome[0] != outcome[1]
        pit = empirical_pit(s)
        eps = float(rng.uniform(0.5 / n, 0.5))
        outcome = []
        for fn in (lambda: zeta_hat(pit, eps).zeta, lambda: zeta_bruteforce(pit, eps)):
            try:
                outcome.append(fn())
            except ValueError as exc:
                outcome.append(str(exc))
        mismatches += outcome[0] != outcome[1]
    return mismatches


def run_selftest(seed: int = 0) -> list[tuple[str, bool, str]]:
    results = []

    xi = chatterjee_xi(load_sample([(1, 10), (2, 20), (3, 30)])).xi
    results.append(("xi monotone n=3", xi == 0.25, f"xi={xi!r}"))

    xi = chatterjee_xi(load_sample([(1, 10), (2, 30), (3, 20)])).xi
    results.append(("xi permuted n=3", xi == -0.125, f"xi={xi!r}"))

    grid = [0.25, 0.5, 0.75]
    z = zeta_limit(UnitSquareSample(grid, grid)).zeta
    results.append(("zeta_limit n=3", abs(z - 1 / 6) < 1e-15, f"zeta={z!r}"))

    a = adjacent_l1(load_sample([(1, 1), (2, 3), (3, 2)]))
    results.append(("adjacent_l1", a == 1.5, f"value={a!r}"))

    s = PairedSample([0.2, 0.4, 0.6, 0.8], [1, 2, 3, 4])
    rep = l2_report(s, cond_mean_binned(s, 2))
    results.append(("eta2 binned", abs(rep.eta2 - 0.8) < 1e-15, f"eta2={rep.eta2!r}"))

    bad = _differential(seed)
    results.append(("oracle differential (100 comparisons)", bad == 0, f"{bad} mismatches"))
    return results
