"""Acceptance criteria, one test per criterion.

Run alone with ``pytest tests/test_acceptance.py -v``; the terminal summary
lists one PASS/FAIL line per criterion.
"""

import math
import time

import numpy as np
import pytest

from localdep.chatterjee import chatterjee_xi, chatterjee_xi_large
from localdep.core import PairedSample, empirical_pit
from localdep.epsresid import zeta_hat, zeta_limit
from localdep.experiments import Params, bench, converge, sweep, time_call
from localdep.localdelta import local_delta_mean
from localdep.moment import cond_mean_binned, default_bins, eta2_binned, l2_report, r_squared_ols
from localdep.oracle import GuardError, xi_bruteforce, zeta_bruteforce
from localdep.synth import FUNCTIONS, GeneratorSpec, gen

SEED = 20261019


def _random_instance(rng, t):
    n = int(rng.integers(2, 201))
    x = rng.integers(0, max(2, n // 3), n).astype(float) if t % 2 else rng.normal(size=n)
    y = rng.integers(0, max(2, n // 4), n).astype(float) if t % 4 < 2 else rng.random(n)
    return PairedSample(x, y)


def _outcome(fn):
    try:
        return fn()
    except ValueError as exc:
        return f"error: {exc}"


def test_ac01_oracle_equivalence(criterion):
    rng = np.random.default_rng(SEED)
    t0 = time.perf_counter()
    xi_bad = zeta_bad = ties = 0
    for t in range(200):
        s = _random_instance(rng, t)
        ties += len(np.unique(s.ys)) < s.n
        xi_bad += _outcome(lambda: chatterjee_xi_large(s, t).xi) != _outcome(lambda: xi_bruteforce(s, t))
        u = empirical_pit(s)
        eps = float(rng.choice([0.5 / s.n, 1.5 / s.n, rng.uniform(0, 0.5), 1.0]))
        zeta_bad += _outcome(lambda: zeta_hat(u, eps).zeta) != _outcome(lambda: zeta_bruteforce(u, eps))
    elapsed = time.perf_counter() - t0
    criterion("AC1 oracle equivalence", xi_bad == 0 and zeta_bad == 0 and elapsed < 10,
              f"200 instances ({ties} with y-ties): xi mismatches={xi_bad}, zeta mismatches={zeta_bad}, "
              f"{elapsed:.2f}s (< 10s)")


def test_ac02_monotone_maximum(criterion):
    exact = {}
    for n in (3, 10, 100, 10**6):
        s = gen(GeneratorSpec("functional", n, SEED, f="identity"))
        exact[n] = chatterjee_xi(s).xi == (n - 2) / (n + 1)
    xis = {f: zeta_limit(empirical_pit(gen(GeneratorSpec("functional", 10_000, SEED, f=f)))).xi
           for f in sorted(FUNCTIONS)}
    passed = all(exact.values()) and all(v >= 0.95 for v in xis.values())
    criterion("AC2 monotone maximum", passed,
              f"xi == (n-2)/(n+1) exactly: {exact}; zeta_limit xi at n=1e4: "
              + ", ".join(f"{f}={v:.4f}" for f, v in xis.items()))


def test_ac03_independence(criterion):
    n = 10_000
    t0 = time.perf_counter()
    xis, zetas = [], []
    for seed in range(20):
        s = gen(GeneratorSpec("independent", n, SEED + seed)).to_paired()
        xis.append(chatterjee_xi(s, seed).xi)
        # ζₙ(ε) with ε shrinking slowly in n; see the README for why the rank-adjacent limit is not used
        zetas.append(zeta_hat(empirical_pit(s), n ** -0.5).zeta)
    elapsed = time.perf_counter() - t0
    mx, mz = float(np.mean(xis)), float(np.mean(zetas))
    criterion("AC3 independence", abs(mx) <= 0.02 and abs(mz - 0.25) <= 0.02 and elapsed < 30,
              f"mean xi={mx:+.5f} (|.| <= 0.02), mean zeta(eps=n^-1/2)={mz:.5f} (within 0.02 of 0.25), "
              f"{elapsed:.2f}s (< 30s)")


def test_ac04_epsilon_collapse(criterion):
    rng = np.random.default_rng(SEED + 4)
    bad = 0
    for _ in range(100):
        n = int(rng.integers(2, 2000))
        u = empirical_pit(PairedSample(rng.normal(size=n), rng.normal(size=n)))
        bad += zeta_hat(u, 1.5 / n).zeta != zeta_limit(u).zeta
    criterion("AC4 epsilon-collapse identity", bad == 0, f"{bad}/100 samples differ (exact equality)")


def test_ac05_law_of_total_variance(criterion):
    rng = np.random.default_rng(SEED + 5)
    worst, checks = 0.0, 0
    for t in range(100):
        n = int(rng.integers(2, 1500))
        x = rng.random(n) if t % 2 else rng.normal(size=n)
        y = rng.standard_t(3, n) * 10 ** rng.uniform(-3, 3)
        sample = empirical_pit(PairedSample(x, y)) if t % 3 == 0 else PairedSample(x, y)
        for b in sorted({1, 2, math.ceil(math.sqrt(n)), n} & set(range(1, n + 1))):
            rep = l2_report(sample, cond_mean_binned(sample, b))
            worst = max(worst, abs(rep.between + rep.within - rep.var_v) / rep.var_v)
            checks += 1
    criterion("AC5 law of total variance", worst <= 1e-12,
              f"{checks} binned fits, worst relative gap {worst:.2e} (<= 1e-12)")


def test_ac06_gaussian_r2(criterion):
    n = 200_000
    t0 = time.perf_counter()
    lines, ok = [], True
    for rho in (0.3, 0.6, 0.9):
        s = gen(GeneratorSpec("bivariate_normal", n, SEED, rho))
        r2 = r_squared_ols(s)
        eta2 = eta2_binned(s, default_bins(n)).eta2
        ok &= abs(r2 - rho**2) <= 0.01 and abs(eta2 - rho**2) <= 0.02
        lines.append(f"rho={rho}: R2={r2:.4f} eta2={eta2:.4f} (rho^2={rho**2:.2f})")
    elapsed = time.perf_counter() - t0
    criterion("AC6 Gaussian R2 equivalence", ok and elapsed < 60, "; ".join(lines) + f"; {elapsed:.2f}s")


@pytest.mark.slow
def test_ac07_rho_sweep(criterion):
    n, reps = 100_000, 10
    grid = [round(0.2 * i, 1) for i in range(6)]
    t0 = time.perf_counter()
    table = sweep(grid, n, reps, SEED, ["xi"], Params(), workers=4)
    elapsed = time.perf_counter() - t0
    rows = {r["rho"]: r for r in table.rows}
    ok = (all(r["status"] == "ok" for r in table.rows)
          and abs(rows[0.0]["mean"]) <= 0.02
          and rows[1.0]["mean"] == (n - 2) / (n + 1)
          and rows[1.0]["sd"] == 0.0
          and elapsed < 300)
    report = ", ".join(f"rho={r['rho']}: xi={r['mean']:.4f} dev={r['deviation']:+.4f}" for r in table.rows)
    criterion("AC7 rho-sweep endpoints", ok, f"{report}; {elapsed:.1f}s (< 300s)")


def test_ac08_delta_link(criterion):
    rng = np.random.default_rng(SEED + 8)
    bad = 0
    for _ in range(50):
        n = int(rng.integers(2, 300))
        gap = float(rng.uniform(0.01, 10))
        order = rng.permutation(n)
        s = PairedSample(order * gap + rng.uniform(-100, 100), rng.standard_cauchy(n))
        y = s.ys[np.argsort(s.xs)].tolist()
        d = [abs(b - a) for a, b in zip(y, y[1:])]
        per_point = [d[0]] + [(d[i - 1] + d[i]) / 2 for i in range(1, n - 1)] + [d[-1]]
        direct = math.fsum(per_point) / n
        bad += local_delta_mean(s, 1.5 * gap) != direct
    criterion("AC8 delta->0 link", bad == 0, f"{bad}/50 equispaced samples differ (exact equality)")


def test_ac09_invariance(criterion):
    rng = np.random.default_rng(SEED + 9)
    rank_bad = affine_bad = 0
    for _ in range(30):
        n = int(rng.integers(2, 400))
        xs = rng.choice(10**6, n, replace=False).astype(float)
        ys = rng.choice(10**6, n, replace=False).astype(float)
        a, b = PairedSample(xs, ys), PairedSample(np.exp(xs / 1e6) - 3, np.sqrt(ys) * 5 + 1)
        pa, pb = empirical_pit(a), empirical_pit(b)
        rank_bad += not (np.array_equal(pa.us, pb.us) and np.array_equal(pa.vs, pb.vs))
        rank_bad += chatterjee_xi(a).xi != chatterjee_xi(b).xi
        rank_bad += zeta_limit(pa).zeta != zeta_limit(pb).zeta
        if n >= 3:
            base = eta2_binned(a).eta2
            for scale in (-2.0, 0.25, 1024.0):
                affine_bad += eta2_binned(PairedSample(xs, scale * ys)).eta2 != base
    args = ([0.0, 0.5, 1.0], 5000, 6, SEED, ["xi", "zeta_limit", "eta2_binned", "eta2_knn"], Params())
    det = sweep(*args, workers=1).rows == sweep(*args, workers=8).rows
    spec = GeneratorSpec("independent", 4000, SEED)
    det &= converge(spec, [0.1], [500, 5000], 4, workers=1).rows == converge(spec, [0.1], [500, 5000], 4, workers=8).rows
    criterion("AC9 invariance suite", rank_bad == 0 and affine_bad == 0 and det,
              f"rank-invariance failures={rank_bad}, eta2 scale-invariance failures={affine_bad}, "
              f"1 vs 8 workers bit-identical={det}")


@pytest.mark.slow
def test_ac10_performance(criterion):
    table, checks = bench([100_000, 1_000_000], ["xi_large"], SEED, Params(), repeat=5)
    t_small, t_large = (r["seconds"] for r in table.rows)
    (scaling,) = checks
    s = gen(GeneratorSpec("independent", 10**6, SEED)).to_paired()
    try:
        xi_bruteforce(s)
        refused = False
    except GuardError:
        refused = True
    criterion("AC10 performance", t_large < 2.0 and scaling["passed"] and refused,
              f"xi_large n=1e6: {t_large:.3f}s (< 2s); n=1e5: {t_small:.4f}s; "
              f"ratio {scaling['ratio']:.2f} (<= 15); O(n^2) oracle refused at n=1e6: {refused}")
