"""Streaming Monte Carlo moments with mergeable accumulators.

Work is split across ``workers`` streams ``RngStream(seed, 0..workers-1)``;
each worker owns its stream and accumulator, and the per-worker summaries are
merged pairwise in worker order. Results therefore depend on the seed and the
worker count, never on thread scheduling.
"""
import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError
from .polya_tree import fmt
from .sampling import RngStream

_CHUNK = 1 << 16


@dataclass(frozen=True)
class MomentSummary:
    """Count, mean and central moment sums (m2, m3, m4) of the finite values
    seen, plus the number of infinite values set aside."""

    count: int = 0
    mean: float = 0.0
    m2: float = 0.0
    m3: float = 0.0
    m4: float = 0.0
    inf_count: int = 0

    @classmethod
    def from_values(cls, values):
        x = np.asarray(values, dtype=np.float64).ravel()
        if np.isnan(x).any():
            raise DomainError("statistic produced NaN")
        finite = np.isfinite(x)
        inf_count = int(x.size - finite.sum())
        x = x[finite]
        if x.size == 0:
            return cls(inf_count=inf_count)
        mean = float(x.mean())
        d = x - mean
        d2 = d * d
        return cls(
            count=int(x.size),
            mean=mean,
            m2=float(d2.sum()),
            m3=float((d2 * d).sum()),
            m4=float((d2 * d2).sum()),
            inf_count=inf_count,
        )

    def update(self, value):
        return self.merge(MomentSummary.from_values([value]))

    def merge(self, other):
        na, nb = self.count, other.count
        inf_count = self.inf_count + other.inf_count
        if nb == 0:
            return MomentSummary(na, self.mean, self.m2, self.m3, self.m4, inf_count)
        if na == 0:
            return MomentSummary(nb, other.mean, other.m2, other.m3, other.m4, inf_count)
        n = na + nb
        delta = other.mean - self.mean
        d_n = delta / n
        d_n2 = d_n * d_n
        mean = self.mean + nb * d_n
        m2 = self.m2 + other.m2 + delta * d_n * na * nb
        m3 = (
            self.m3 + other.m3
            + delta * d_n2 * na * nb * (na - nb)
            + 3.0 * d_n * (na * other.m2 - nb * self.m2)
        )
        m4 = (
            self.m4 + other.m4
            + delta * d_n2 * d_n * na * nb * (na * na - na * nb + nb * nb)
            + 6.0 * d_n2 * (na * na * other.m2 + nb * nb * self.m2)
            + 4.0 * d_n * (na * other.m3 - nb * self.m3)
        )
        return MomentSummary(n, mean, m2, m3, m4, inf_count)

    @property
    def variance(self):
        return self.m2 / (self.count - 1) if self.count >= 2 else math.nan

    @property
    def sem(self):
        """Standard error of the mean."""
        return math.sqrt(self.variance / self.count) if self.count >= 2 else math.nan

    @property
    def variance_se(self):
        """Normal-approximation standard error of the sample variance."""
        n = self.count
        if n < 4:
            return math.nan
        mu4 = self.m4 / n
        s2 = self.variance
        return math.sqrt(max(mu4 - s2 * s2 * (n - 3) / (n - 1), 0.0) / n)

    @property
    def inf_fraction(self):
        total = self.count + self.inf_count
        return self.inf_count / total if total else math.nan


def merge_all(summaries):
    """Pairwise tree reduction, preserving order."""
    items = list(summaries)
    if not items:
        return MomentSummary()
    while len(items) > 1:
        nxt = [items[i].merge(items[i + 1]) for i in range(0, len(items) - 1, 2)]
        if len(items) % 2:
            nxt.append(items[-1])
        items = nxt
    return items[0]


def _shares(n_draws, workers):
    base, extra = divmod(n_draws, workers)
    return [base + (w < extra) for w in range(workers)]


def _run_workers(job, n_draws, workers, seed):
    if n_draws < 2:
        raise DomainError("n_draws must be >= 2")
    if workers < 1:
        raise DomainError("workers must be >= 1")
    streams = [RngStream(seed, w) for w in range(workers)]
    shares = _shares(n_draws, workers)
    if workers == 1:
        return [job(streams[0], shares[0])]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(job, streams, shares))


def estimate(sampler, statistic, n_draws, workers=1, seed=42):
    """Moments of ``statistic(sampler(stream))`` over ``n_draws`` independent draws."""

    def job(stream, k):
        return MomentSummary.from_values([statistic(sampler(stream)) for _ in range(k)])

    return merge_all(_run_workers(job, n_draws, workers, seed))


def estimate_batch(batch, n_draws, workers=1, seed=42):
    """Like :func:`estimate`, for a vectorised ``batch(stream, k)`` that returns
    ``k`` statistic values (shape ``(k,)``) or ``k`` rows of several statistics
    (shape ``(k, c)``). Returns one summary, or a list of ``c`` summaries."""

    def job(stream, k):
        parts = []
        for start in range(0, k, _CHUNK):
            vals = np.asarray(batch(stream, min(_CHUNK, k - start)), dtype=np.float64)
            vals = vals.reshape(vals.shape[0], -1)
            parts.append([MomentSummary.from_values(vals[:, c]) for c in range(vals.shape[1])])
        if not parts:
            return None
        return [merge_all(col) for col in zip(*parts)]

    per_worker = [r for r in _run_workers(job, n_draws, workers, seed) if r is not None]
    merged = [merge_all(col) for col in zip(*per_worker)]
    return merged[0] if len(merged) == 1 else merged


def derive_seed(seed, label):
    """A 64-bit seed for one labelled experiment, stable across runs and platforms."""
    words = [int(seed) & 0xFFFFFFFF, int(seed) >> 32] + list(label.encode())
    return int(np.random.SeedSequence(words).generate_state(1, np.uint64)[0])


# -- comparisons ----------------------------------------------------------------


REPORT_HEADER = (
    "label", "n_draws", "closed_mean", "emp_mean", "z_mean",
    "closed_var", "emp_var", "rel_err_var", "inf_count", "pass",
)


@dataclass(frozen=True)
class ComparisonReport:
    label: str
    closed_mean: float
    closed_var: Optional[float]
    summary: MomentSummary
    z_mean: float
    rel_err_var: Optional[float]
    z_var: Optional[float]
    mean_ok: bool
    var_ok: bool
    kind: str = "moments"

    @property
    def passed(self):
        return self.mean_ok and self.var_ok

    @property
    def n_draws(self):
        return self.summary.count + self.summary.inf_count

    def csv_row(self):
        s = self.summary
        emp_mean = s.inf_fraction if self.kind == "frequency" else s.mean
        return [
            self.label, self.n_draws, fmt(self.closed_mean), fmt(emp_mean), fmt(self.z_mean),
            fmt(self.closed_var), fmt(s.variance if s.count >= 2 else None),
            fmt(self.rel_err_var), s.inf_count, "true" if self.passed else "false",
        ]


def compare(summary, closed_mean, closed_var=None, label="", z_tol=4.0, rel_tol=0.10):
    """Empirical moments against closed forms: |z| <= z_tol for the mean,
    relative error <= rel_tol for the variance (when one is given)."""
    if summary.count < 100:
        raise DomainError("need at least 100 finite draws to compare")
    z_mean = (summary.mean - closed_mean) / summary.sem if summary.sem > 0 else (
        0.0 if summary.mean == closed_mean else math.copysign(math.inf, summary.mean - closed_mean)
    )
    rel = z_var = None
    var_ok = True
    if closed_var is not None:
        emp = summary.variance
        rel = abs(emp - closed_var) / closed_var if closed_var > 0 else abs(emp)
        se = summary.variance_se
        z_var = (emp - closed_var) / se if se > 0 else 0.0
        var_ok = rel <= rel_tol
    return ComparisonReport(
        label, float(closed_mean), None if closed_var is None else float(closed_var),
        summary, z_mean, rel, z_var, abs(z_mean) <= z_tol, var_ok,
    )


def compare_bound(summary, bound, label=""):
    """Passes when the empirical mean does not exceed ``bound``."""
    z = (summary.mean - bound) / summary.sem if summary.sem > 0 else 0.0
    return ComparisonReport(
        label, float(bound), None, summary, z, None, None, summary.mean <= bound, True, kind="bound"
    )


def compare_frequency(summary, expected, label="", z_tol=4.0):
    """Fraction of infinite statistic values against its expected probability."""
    total = summary.count + summary.inf_count
    se = math.sqrt(expected * (1.0 - expected) / total)
    freq = summary.inf_fraction
    z = (freq - expected) / se if se > 0 else (0.0 if freq == expected else math.inf)
    return ComparisonReport(
        label, float(expected), None, summary, z, None, None, abs(z) <= z_tol, True, kind="frequency"
    )


def write_reports(reports, fh):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(REPORT_HEADER)
    for r in reports:
        writer.writerow(r.csv_row())
