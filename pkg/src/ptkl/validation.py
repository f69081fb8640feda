"""Closed-form moments checked against Monte Carlo, one report per configuration."""
import math


from . import bootstrap as bs
from . import kernels
from . import polya_tree as pt
from .mc_harness import compare, compare_bound, compare_frequency, derive_seed, estimate_batch

# Name of the reading of the reverse-KL variance expression that is in use.
PROP2_READING = "literal"


def polya_tree_reports(seed, workers, draws, levels=6, alpha=1.0, delta=2.0):
    reports = []
    for rho in pt.standard_families(delta):
        spec = pt.PolyaTreeSpec(alpha, rho, levels)
        shapes = spec.level_shapes()
        tag = f"{rho},M={levels},alpha={alpha:g}"
        fwd, rev = estimate_batch(
            lambda stream, k: kernels.pt_kl_batch(stream.generator, shapes, k),
            draws, workers, derive_seed(seed, f"pt[{tag}]"),
        )
        reports.append(
            compare(fwd, pt.mean_kl_forward(spec), pt.var_kl_forward(spec), f"pt_forward[{tag}]")
        )
        reports.append(
            compare(rev, pt.mean_kl_reverse(spec), pt.var_kl_reverse(spec),
                    f"pt_reverse[{tag},var={PROP2_READING}]")
        )
    return reports


def bayesian_bootstrap_reports(seed, workers, draws, ns=(2, 10, 100), alphas=(0.5, 1.0, 2.0),
                               schedules=bs.SCHEDULES):
    reports = []
    for kind in schedules:
        for alpha in alphas:
            schedule = bs.AlphaSchedule(kind, alpha)
            for n in ns:
                model = bs.DiscreteModel.uniform(n)
                tag = f"{kind},alpha={alpha:g},n={n}"
                fwd, rev = estimate_batch(
                    lambda stream, k: bs.dirichlet_kl_batch(stream, model, schedule, k),
                    draws, workers, derive_seed(seed, f"bb[{tag}]"),
                )
                reports.append(compare(fwd, bs.bb_mean_forward(model, schedule),
                                       bs.bb_var_forward(model, schedule), f"bb_forward[{tag}]"))
                reports.append(compare(rev, bs.bb_mean_reverse(model, schedule),
                                       bs.bb_var_reverse(model, schedule), f"bb_reverse[{tag}]"))
    return reports


def frequentist_reports(seed, workers, draws, ns=(2, 5, 10, 100)):
    reports = []
    for n in ns:
        model = bs.DiscreteModel.uniform(n)
        tag = f"n={n}"
        fwd, rev, zeros = estimate_batch(
            lambda stream, k: bs.multinomial_kl_batch(stream, model, k),
            draws, workers, derive_seed(seed, f"freq[{tag}]"),
        )
        reports.append(compare_bound(rev, bs.freq_bootstrap_mean_reverse_bound(model),
                                     f"freq_reverse_bound[{tag}]"))
        if n <= bs.ENUMERATION_MAX_N:
            reports.append(compare(rev, bs.enumerate_freq_bootstrap_reverse_mean(model), None,
                                   f"freq_reverse_exact[{tag}]"))
        # a cell is empty with probability (1 - 1/n)^n; all cells are hit with n!/n^n
        reports.append(compare(zeros, (1.0 - 1.0 / n) ** n, None, f"freq_zero_fraction[{tag}]"))
        undefined = 1.0 - math.exp(math.lgamma(n + 1) - n * math.log(n))
        reports.append(compare_frequency(fwd, undefined, f"freq_forward_infinite[{tag}]"))
    return reports


def validation_reports(seed=42, workers=1, draws=200_000, freq_draws=100_000):
    return (
        polya_tree_reports(seed, workers, draws)
        + bayesian_bootstrap_reports(seed, workers, draws)
        + frequentist_reports(seed, workers, freq_draws)
    )


def all_passed(reports):
    return all(r.passed for r in reports)


__all__ = [
    "PROP2_READING",
    "all_passed",
    "bayesian_bootstrap_reports",
    "frequentist_reports",
    "polya_tree_reports",
    "validation_reports",
]

