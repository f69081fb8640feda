"""Acceptance criteria, one test each, at their stated tolerances and time limits.

Every test prints a single PASS/FAIL line; the lines are repeated together at
the end of the pytest run.
"""
import io
import math
import sys
import time

import numpy as np
import pytest

from ptkl import bootstrap as bs
from ptkl import cli
from ptkl import polya_tree as pt
from ptkl.mc_harness import estimate_batch
from ptkl.sampling import RngStream
from ptkl.special import digamma, log_gamma, trigamma
from ptkl.validation import bayesian_bootstrap_reports, polya_tree_reports

EULER = 0.5772156649015329
SEED = 42


def worst(reports, key):
    return max(reports, key=key)


@pytest.fixture(scope="module")
def tree_reports():
    start = time.perf_counter()
    reports = polya_tree_reports(SEED, 1, 200_000, levels=6, alpha=1.0, delta=2.0)
    return reports, time.perf_counter() - start


def test_criterion_1_special_functions(record_criterion):
    start = time.perf_counter()
    grid = np.geomspace(1e-3, 1e6, 400)
    rec_psi = max(abs(digamma(x + 1) - digamma(x) - 1 / x) for x in grid)
    rec_tri = max(abs(trigamma(x + 1) - trigamma(x) + 1 / x**2) for x in grid)
    dup = max(abs(digamma(2 * x) - 0.5 * digamma(x) - 0.5 * digamma(x + 0.5) - math.log(2)) for x in grid)
    fd = 0.0
    for x in grid:
        h = 1e-5 * x
        est = (log_gamma(x + h) - log_gamma(x - h)) / (2 * h)
        fd = max(fd, abs(est - digamma(x)) / abs(digamma(x)))
    elapsed = time.perf_counter() - start
    ok = max(rec_psi, rec_tri, dup) <= 1e-10 and fd <= 1e-6 and elapsed < 1.0
    record_criterion(1, ok, f"recurrences {rec_psi:.1e}/{rec_tri:.1e}, duplication {dup:.1e} (<=1e-10), "
                            f"finite-difference rel {fd:.1e} (<=1e-6), {elapsed:.2f}s (<1s)")


def test_criterion_2_forward_closed_forms(tree_reports, record_criterion):
    reports, elapsed = tree_reports
    fwd = [r for r in reports if r.label.startswith("pt_forward")]
    ok = len(fwd) == 4 and all(r.passed for r in fwd) and elapsed < 60.0
    z = worst(fwd, lambda r: abs(r.z_mean))
    rel = worst(fwd, lambda r: r.rel_err_var)
    record_criterion(2, ok, f"4 families, M=6, 2e5 draws: max |z_mean| {abs(z.z_mean):.2f} (<=4), "
                            f"max var rel err {rel.rel_err_var:.3f} (<=0.1), {elapsed:.1f}s (<60s)")


def test_criterion_3_reverse_closed_forms(tree_reports, record_criterion):
    reports, elapsed = tree_reports
    rev = [r for r in reports if r.label.startswith("pt_reverse")]
    reading = rev[0].label.rsplit("var=", 1)[1].rstrip("]")
    ok = len(rev) == 4 and all(r.passed and abs(r.z_var) <= 5 for r in rev)
    z = worst(rev, lambda r: abs(r.z_mean))
    rel = worst(rev, lambda r: r.rel_err_var)
    zv = worst(rev, lambda r: abs(r.z_var))
    record_criterion(3, ok, f"reading={reading}: max |z_mean| {abs(z.z_mean):.2f} (<=4), "
                            f"max var rel err {rel.rel_err_var:.3f} (<=0.1), max |z_var| {abs(zv.z_var):.2f} (<=5)")


def test_criterion_4_corollary_bound(record_criterion):
    start = time.perf_counter()
    cases = failures = 0
    for alpha in (0.5, 1.0, 2.0):
        for delta in (1.5, 2.0, 3.0):
            for rho in (pt.RhoFamily.polynomial(delta), pt.RhoFamily.geometric(delta)):
                cases += 1
                failures += not pt.mean_kl_forward(pt.PolyaTreeSpec(alpha, rho, 30)) <= pt.corollary_bound(alpha, rho)
    elapsed = time.perf_counter() - start
    record_criterion(4, cases == 18 and failures == 0 and elapsed < 1.0,
                     f"{cases - failures}/{cases} cases with mean(M=30) <= bound, {elapsed:.3f}s (<1s)")


def test_criterion_5_figure_orderings(record_criterion):
    start = time.perf_counter()
    rows = pt.moment_table(pt.figure_grid(alpha=1.0, delta=2.0, max_levels=10))
    ordered = all(r.mean_fwd >= r.mean_rev for r in rows)
    disc = [r.mean_fwd for r in rows if r.family == "discrete"]
    ratios = [(disc[m] - disc[m - 1]) / (disc[m - 1] - disc[m - 2]) for m in range(5, 10)]  # M = 6..10
    doubling = all(1.8 <= q <= 2.2 for q in ratios)
    flat = {}
    for rho in (pt.RhoFamily.polynomial(2.0), pt.RhoFamily.geometric(2.0)):
        m25 = pt.mean_kl_forward(pt.PolyaTreeSpec(1.0, rho, 25))
        m30 = pt.mean_kl_forward(pt.PolyaTreeSpec(1.0, rho, 30))
        flat[rho.kind] = abs(m30 - m25)
    elapsed = time.perf_counter() - start
    ok = ordered and doubling and all(d <= 1e-6 for d in flat.values()) and elapsed < 1.0
    record_criterion(5, ok, f"mean_fwd>=mean_rev {ordered}; discrete increment ratios "
                            f"{min(ratios):.3f}..{max(ratios):.3f} (in [1.8,2.2]); |mean(M=30)-mean(M=25)| "
                            f"polynomial {flat['polynomial']:.2e}, geometric {flat['geometric']:.2e} (<=1e-6); "
                            f"{elapsed:.3f}s (<1s)")


def test_criterion_6_frequentist_bootstrap(record_criterion):
    start = time.perf_counter()
    two = bs.DiscreteModel.uniform(2)
    exact = bs.enumerate_freq_bootstrap_reverse_mean(two)
    exact_ok = abs(exact - 0.5 * math.log(2)) <= 1e-12 and exact <= math.log(1.5)
    model = bs.DiscreteModel.uniform(100)
    _, rev, zeros = estimate_batch(lambda stream, k: bs.multinomial_kl_batch(stream, model, k), 100_000, 1, SEED)
    bound = math.log(2 - 1 / 100)
    target = (1 - 1 / 100) ** 100
    elapsed = time.perf_counter() - start
    ok = exact_ok and rev.mean <= bound and abs(zeros.mean - target) <= 0.01 and elapsed < 30.0
    record_criterion(6, ok, f"n=2 exact {exact:.12f} (1/2 log 2 to 1e-12, <= log 1.5); n=100 mean "
                            f"{rev.mean:.6f} <= {bound:.6f}; zero fraction {zeros.mean:.4f} vs {target:.4f} "
                            f"(+-0.01); {elapsed:.1f}s (<30s)")


def test_criterion_7_bayesian_bootstrap(record_criterion):
    start = time.perf_counter()
    reports = bayesian_bootstrap_reports(SEED, 1, 200_000)
    big = bs.DiscreteModel.uniform(10_000)
    mid = bs.DiscreteModel.uniform(1000)
    linear = bs.AlphaSchedule("linear", 1.0)
    fwd_lim = abs(bs.bb_mean_forward(big, linear) - EULER)
    rev_lim = abs(bs.bb_mean_reverse(big, linear) - (1 - EULER))
    var_f, var_r = bs.bb_var_forward(mid, linear), bs.bb_var_reverse(mid, linear)
    elapsed = time.perf_counter() - start
    mc_ok = len(reports) == 54 and all(r.passed for r in reports)
    ok = mc_ok and fwd_lim <= 1e-4 and rev_lim <= 1e-4 and max(var_f, var_r) < 1e-3 and elapsed < 90.0
    z = worst(reports, lambda r: abs(r.z_mean))
    rel = worst(reports, lambda r: r.rel_err_var)
    record_criterion(7, ok, f"{sum(r.passed for r in reports)}/{len(reports)} MC comparisons pass "
                            f"(max |z| {abs(z.z_mean):.2f}, max var rel {rel.rel_err_var:.3f}); limits off by "
                            f"{fwd_lim:.1e}/{rev_lim:.1e} (<=1e-4); variances at n=1e3 {var_f:.1e}/{var_r:.1e} "
                            f"(<1e-3); {elapsed:.1f}s (<90s)")


def test_criterion_8_gap_sign(record_criterion):
    start = time.perf_counter()
    stream = RngStream(SEED, 8)
    negatives = {}
    minima = {}
    for n in (2, 5, 50):
        w = stream.generator.dirichlet(np.ones(n), size=100_000)
        gap = bs.kl_gap(w)
        negatives[n] = int((gap < 0).sum())
        minima[n] = float(gap.min())
    at_uniform = max(abs(bs.kl_gap(np.full(n, 1.0 / n))) for n in (2, 5, 50))
    elapsed = time.perf_counter() - start
    ok = not any(negatives.values()) and at_uniform < 1e-12 and elapsed < 10.0
    detail = ", ".join(f"n={n}: {negatives[n]} negative (min {minima[n]:.3g})" for n in negatives)
    record_criterion(8, ok, f"{detail}; |gap| at uniform {at_uniform:.1e} (<1e-12); {elapsed:.1f}s (<10s)")


def test_criterion_9_determinism(tmp_path, record_criterion):
    outputs, statuses = [], []
    for k in range(2):
        target = tmp_path / f"validate{k}.csv"
        statuses.append(cli.main(["validate", "--seed", "42", "--workers", "4", "--out", str(target)]))
        outputs.append(target.read_bytes())
    same = outputs[0] == outputs[1]
    record_criterion(9, same, f"two validate runs (seed 42, 4 workers): {len(outputs[0])} bytes each, "
                              f"identical={same}, exit status {statuses}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
