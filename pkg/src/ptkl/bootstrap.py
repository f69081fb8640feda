"""Random reweighings of a discrete base measure f0 = sum_i p_i delta(xi_i).

Two weight laws are covered: the frequentist bootstrap, n w ~ Mult(n, p), and
the generalised Bayesian bootstrap, w ~ Dir(alpha_n p). Atom locations never
enter a KL divergence, so they are carried as labels only.
"""
import csv
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .errors import DomainError
from .polya_tree import fmt
from .sampling import check_simplex
from .special import _digamma as psi0
from .special import _trigamma as psi1

ENUMERATION_MAX_N = 12
SCHEDULES = ("constant", "linear", "quadratic")


@dataclass(frozen=True, eq=False)
class DiscreteModel:
    p: np.ndarray
    atoms: Optional[Sequence] = None

    def __post_init__(self):
        p = check_simplex(self.p, strict=True, tol=1e-12)
        p = p.copy()
        p.flags.writeable = False
        object.__setattr__(self, "p", p)
        if self.atoms is not None and len(self.atoms) != p.size:
            raise DomainError("need one atom label per weight")

    @classmethod
    def uniform(cls, n, atoms=None):
        if n < 1:
            raise DomainError("n must be >= 1")
        return cls(np.full(n, 1.0 / n), atoms)

    @property
    def n(self):
        return self.p.size

    @property
    def neg_entropy(self):
        """H(p) = sum p_i log p_i (sign convention of the moment formulas)."""
        return float(np.dot(self.p, np.log(self.p)))


@dataclass(frozen=True)
class AlphaSchedule:
    """Dirichlet precision as a function of the number of atoms."""

    kind: str
    alpha: float = 1.0

    def __post_init__(self):
        if self.kind not in SCHEDULES:
            raise DomainError(f"schedule must be one of {SCHEDULES}, got {self.kind!r}")
        if not (self.alpha > 0.0 and math.isfinite(self.alpha)):
            raise DomainError("schedule alpha must be finite and > 0")

    def __call__(self, n):
        if self.kind == "constant":
            return self.alpha
        if self.kind == "linear":
            return self.alpha * n
        return self.alpha * n * n


def _pair(p, w):
    p = np.asarray(p, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    if p.shape != w.shape:
        raise DomainError(f"dimension mismatch: p{p.shape} vs w{w.shape}")
    return p, w


def kl_forward_discrete(p, w):
    """sum p_i log(p_i / w_i); +inf as soon as some w_i = 0."""
    p, w = _pair(p, w)
    if np.any(w == 0.0):
        return math.inf
    return float(np.dot(p, np.log(p) - np.log(w)))


def kl_reverse_discrete(p, w):
    """sum w_i log(w_i / p_i) with 0 log 0 = 0."""
    p, w = _pair(p, w)
    nz = w > 0.0
    return float(np.dot(w[nz], np.log(w[nz]) - np.log(p[nz])))


# 2u - (2 + u) log(1 + u) = sum_{k>=3} (-1)^k (k - 2) / (k (k - 1)) u^k, highest power first
_GAP_SERIES = [(-1.0) ** k * (k - 2) / (k * (k - 1)) for k in range(19, 2, -1)] + [0.0, 0.0, 0.0]


def _gap_terms(nw):
    """2u - (2 + u) log(1 + u) at u = nw - 1, by series near u = 0 where it is O(u^3)."""
    u = nw - 1.0
    near = np.abs(u) <= 0.05
    out = np.polyval(_GAP_SERIES, np.where(near, u, 0.0))
    far = ~near
    out[far] = 2.0 * u[far] - (2.0 + u[far]) * np.log(nw[far])
    return out


def kl_gap(w):
    """KL(f0 || f) - KL(f || f0) for uniform p, -sum (1/n + w_i) log w_i - 2 log n.

    Evaluated in the centred variables u_i = n w_i - 1, where it reads
    (1/n) sum {2 u_i - (2 + u_i) log(1 + u_i)}; this keeps the value accurate
    close to the uniform vector. A 2-D ``w`` is read as one weight vector per row.
    """
    w = np.asarray(w, dtype=np.float64)
    if w.ndim not in (1, 2) or w.shape[-1] == 0 or not np.all(w > 0.0):
        raise DomainError("kl_gap is defined on the interior of the simplex")
    n = w.shape[-1]
    gap = _gap_terms(n * w).sum(axis=-1) / n
    return float(gap) if w.ndim == 1 else gap


# -- frequentist bootstrap ----------------------------------------------------


def freq_bootstrap_mean_reverse_bound(model):
    """Jensen bound on E{KL(f || f0)} under n w ~ Mult(n, p)."""
    p = model.p
    return float(np.dot(p, np.log(p + (1.0 - p) / model.n))) - model.neg_entropy


def enumerate_freq_bootstrap_reverse_mean(model):
    """Exact E{KL(f || f0)} under n w ~ Mult(n, p), summing over all count vectors."""
    if model.n > ENUMERATION_MAX_N:
        raise DomainError(f"enumeration is limited to n <= {ENUMERATION_MAX_N}")
    return float(kernels.enumerate_multinomial_reverse_mean(np.asarray(model.p), model.n))


# -- generalised Bayesian bootstrap ---------------------------------------------


def _precision(model, schedule):
    return float(schedule(model.n))


def bb_mean_forward(model, schedule):
    a = _precision(model, schedule)
    p = model.p
    total = sum(pi * (psi0(a * pi) - psi0(a)) for pi in p)
    return model.neg_entropy - total


def bb_var_forward(model, schedule):
    a = _precision(model, schedule)
    return sum(pi * pi * psi1(a * pi) for pi in model.p) - psi1(a)


def bb_mean_reverse(model, schedule):
    a = _precision(model, schedule)
    total = sum(pi * (psi0(a * pi + 1.0) - psi0(a + 1.0)) for pi in model.p)
    return total - model.neg_entropy


# Second moments of Dirichlet(a p) weights used by the reverse-KL variance.
# Each w_i is marginally Be(a p_i, a (1 - p_i)).


def var_w(pi, a):
    return pi * (1.0 - pi) / (a + 1.0)


def cov_w(pi, pj, a):
    return -pi * pj / (a + 1.0)


def var_wlogw(pi, a):
    first = pi * (a * pi + 1.0) / (a + 1.0) * (
        psi1(a * pi + 2.0) - psi1(a + 2.0) + (psi0(a * pi + 2.0) - psi0(a + 2.0)) ** 2
    )
    return first - pi**2 * (psi0(a * pi + 1.0) - psi0(a + 1.0)) ** 2


def cov_wlogw_w(pi, a):
    """Cov(w_i log w_i, w_i)."""
    return pi * (a * pi + 1.0) / (a + 1.0) * (psi0(a * pi + 2.0) - psi0(a + 2.0)) - pi**2 * (
        psi0(a * pi + 1.0) - psi0(a + 1.0)
    )


def cov_wlogw_wj(pi, pj, a):
    """Cov(w_i log w_i, w_j), i != j."""
    return pi * pj * (-psi0(a * pi + 1.0) / (a + 1.0) + psi0(a + 1.0) - a * psi0(a + 2.0) / (a + 1.0))


def cov_wlogw_wlogw(pi, pj, a):
    """Cov(w_i log w_i, w_j log w_j), i != j."""
    joint = a * pi * pj / (a + 1.0) * (
        (psi0(a * pi + 1.0) - psi0(a + 2.0)) * (psi0(a * pj + 1.0) - psi0(a + 2.0)) - psi1(a + 2.0)
    )
    return joint - pi * pj * (psi0(a * pi + 1.0) - psi0(a + 1.0)) * (psi0(a * pj + 1.0) - psi0(a + 1.0))


def bb_var_reverse(model, schedule):
    """Var{KL(f || f0)} from the pairwise second moments of (w_i, w_i log w_i).

    The cross terms carry both ``log p_j Cov(w_i log w_i, w_j)`` and
    ``log p_i Cov(w_j log w_j, w_i)``; for uniform p these coincide.
    """
    a = _precision(model, schedule)
    p = model.p
    log_p = np.log(p)
    n = p.size
    diag = 0.0
    for i in range(n):
        diag += var_wlogw(p[i], a) + log_p[i] ** 2 * var_w(p[i], a) - 2.0 * log_p[i] * cov_wlogw_w(p[i], a)
    if n == 1:
        return float(diag)
    if np.all(p == p[0]):
        # all pairs are identical
        pi = p[0]
        pair = (
            cov_wlogw_wlogw(pi, pi, a)
            + log_p[0] ** 2 * cov_w(pi, pi, a)
            - 2.0 * log_p[0] * cov_wlogw_wj(pi, pi, a)
        )
        return float(diag + n * (n - 1) * pair)
    off = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            off += (
                cov_wlogw_wlogw(p[i], p[j], a)
                + log_p[i] * log_p[j] * cov_w(p[i], p[j], a)
                - log_p[j] * cov_wlogw_wj(p[i], p[j], a)
                - log_p[i] * cov_wlogw_wj(p[j], p[i], a)
            )
    return float(diag + 2.0 * off)


def bb_limit_values(alpha):
    """n -> infinity limits of the forward and reverse means for alpha_n = alpha n,
    uniform p."""
    if not alpha > 0.0:
        raise DomainError("alpha must be > 0")
    return math.log(alpha) - psi0(alpha), psi0(alpha + 1.0) - math.log(alpha)


# -- sampling -------------------------------------------------------------------


def dirichlet_kl_batch(stream, model, schedule, n_draws):
    """``(n_draws, 2)`` forward/reverse KL under w ~ Dir(alpha_n p)."""
    conc = _precision(model, schedule) * np.asarray(model.p)
    return kernels.dirichlet_kl_batch(stream.generator, conc, np.log(model.p), int(n_draws))


def multinomial_kl_batch(stream, model, n_draws):
    """``(n_draws, 3)``: forward KL (+inf when a weight is zero), reverse KL and
    the fraction of zero weights, under n w ~ Mult(n, p)."""
    p = np.asarray(model.p)
    counts = stream.generator.multinomial(model.n, p, size=int(n_draws))
    w = counts / model.n
    log_p = np.log(p)
    zero = counts == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        log_w = np.log(w)
        fwd = np.where(zero.any(axis=1), math.inf, ((log_p - log_w) * p).sum(axis=1))
        rev = np.where(zero, 0.0, w * (log_w - log_p)).sum(axis=1)
    return np.column_stack((fwd, rev, zero.mean(axis=1)))


# -- tables -------------------------------------------------------------------

BOOTSTRAP_HEADER = ("alpha_n_schedule", "n", "mean_fwd", "sd_fwd", "mean_rev", "sd_rev")


@dataclass(frozen=True)
class BootstrapRow:
    schedule: str
    n: int
    mean_fwd: float
    sd_fwd: float
    mean_rev: float
    sd_rev: float


def bootstrap_table(ns, schedules):
    rows = []
    for schedule in schedules:
        for n in ns:
            model = DiscreteModel.uniform(n)
            rows.append(
                BootstrapRow(
                    schedule.kind,
                    n,
                    bb_mean_forward(model, schedule),
                    math.sqrt(max(bb_var_forward(model, schedule), 0.0)),
                    bb_mean_reverse(model, schedule),
                    math.sqrt(max(bb_var_reverse(model, schedule), 0.0)),
                )
            )
    return rows


def write_bootstrap_csv(rows, fh):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(BOOTSTRAP_HEADER)
    for r in rows:
        writer.writerow([r.schedule, r.n, fmt(r.mean_fwd), fmt(r.sd_fwd), fmt(r.mean_rev), fmt(r.sd_rev)])
