"""Finite Polya trees centred on a distribution F0.

A draw is stored as the log branch probabilities of every set in the dyadic
partition, level-major: level m occupies ``log_probs[2**m - 2 : 2**(m+1) - 2]``
and within a level the sets are ordered left to right, so entries ``2i`` and
``2i + 1`` are a sibling pair whose probabilities sum to one.
"""
import csv
import math
from dataclasses import dataclass
from statistics import NormalDist
from typing import Callable, Optional

import numpy as np

from . import kernels
from .errors import DomainError
from .special import _digamma as psi0
from .special import _trigamma as psi1
from .special import riemann_zeta

LOG2 = math.log(2.0)
MAX_LEVELS = 30

FAMILIES = ("discrete", "singular", "polynomial", "geometric")


@dataclass(frozen=True)
class RhoFamily:
    """Precision function rho(m) scaling the level-m beta shapes."""

    kind: str
    delta: Optional[float] = None

    def __post_init__(self):
        if self.kind not in FAMILIES:
            raise DomainError(f"unknown rho family {self.kind!r}")
        if self.kind in ("polynomial", "geometric"):
            if self.delta is None or not self.delta > 1.0 or not math.isfinite(self.delta):
                raise DomainError(f"{self.kind} family needs a finite delta > 1")
            object.__setattr__(self, "delta", float(self.delta))
        elif self.delta is not None:
            raise DomainError(f"{self.kind} family takes no delta")

    @classmethod
    def discrete(cls):
        return cls("discrete")

    @classmethod
    def singular(cls):
        return cls("singular")

    @classmethod
    def polynomial(cls, delta):
        return cls("polynomial", delta)

    @classmethod
    def geometric(cls, delta):
        return cls("geometric", delta)

    @classmethod
    def from_name(cls, name, delta=None):
        name = name.lower()
        return cls(name, delta if name in ("polynomial", "geometric") else None)

    @property
    def continuous(self):
        return self.kind in ("polynomial", "geometric")

    def __call__(self, m):
        if m < 1:
            raise DomainError("levels start at 1")
        if self.kind == "discrete":
            return 0.5**m
        if self.kind == "singular":
            return 1.0
        if self.kind == "polynomial":
            return float(m) ** self.delta
        return self.delta**m

    def __str__(self):
        return self.kind if self.delta is None else f"{self.kind}({self.delta:g})"


@dataclass(frozen=True)
class Centring:
    """A continuous centring distribution: quantile, cdf and density."""

    name: str
    quantile: Callable[[float], float]
    cdf: Callable[[float], float]
    pdf: Callable[[float], float]


def _uniform_cdf(x):
    return min(max(x, 0.0), 1.0)


def _uniform_pdf(x):
    return 1.0 if 0.0 <= x <= 1.0 else 0.0


_NORMAL = NormalDist()

UNIFORM = Centring("uniform", lambda u: u, _uniform_cdf, _uniform_pdf)
STANDARD_NORMAL = Centring("normal", _NORMAL.inv_cdf, _NORMAL.cdf, _NORMAL.pdf)


@dataclass(frozen=True)
class PolyaTreeSpec:
    """PT_M(alpha, rho, F0): level-m branching probabilities ~ Be(a_m, a_m),
    a_m = alpha * rho(m)."""

    alpha: float
    rho: RhoFamily
    levels: int
    centring: Optional[Centring] = None

    def __post_init__(self):
        if not (self.alpha > 0.0 and math.isfinite(self.alpha)):
            raise DomainError(f"alpha must be finite and > 0, got {self.alpha!r}")
        if not isinstance(self.rho, RhoFamily):
            raise DomainError("rho must be a RhoFamily")
        if int(self.levels) != self.levels or not 1 <= self.levels <= MAX_LEVELS:
            raise DomainError(f"levels must be an integer in 1..{MAX_LEVELS}")
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "levels", int(self.levels))

    def shape(self, m):
        return self.alpha * self.rho(m)

    def level_shapes(self):
        return np.array([self.shape(m) for m in range(1, self.levels + 1)])


class PolyaTreeDraw:
    """Realised log branch probabilities of one finite tree."""

    __slots__ = ("levels", "log_probs")

    def __init__(self, levels, log_probs):
        log_probs = np.array(log_probs, dtype=np.float64)
        if log_probs.shape != (2 ** (levels + 1) - 2,):
            raise DomainError(f"a {levels}-level tree needs {2 ** (levels + 1) - 2} entries")
        log_probs.flags.writeable = False
        self.levels = levels
        self.log_probs = log_probs

    @classmethod
    def from_left_probs(cls, left):
        """Build from per-level left-child probabilities ``Y_{m,2j-1}``."""
        parts = []
        for m, ys in enumerate(left, start=1):
            ys = np.asarray(ys, dtype=np.float64)
            if ys.shape != (2 ** (m - 1),):
                raise DomainError(f"level {m} needs {2 ** (m - 1)} left probabilities")
            if np.any((ys <= 0.0) | (ys >= 1.0)):
                raise DomainError("branch probabilities must lie in (0, 1)")
            parts.append(np.column_stack((np.log(ys), np.log1p(-ys))).ravel())
        return cls(len(parts), np.concatenate(parts))

    def level(self, m):
        return self.log_probs[2**m - 2 : 2 ** (m + 1) - 2]

    def branch_probs(self, m):
        return np.exp(self.level(m))

    def leaf_log_masses(self, m=None):
        """log F(B_mj) for j = 1..2^m (default m = M)."""
        m = self.levels if m is None else m
        mass = np.zeros(1)
        for k in range(1, m + 1):
            mass = np.repeat(mass, 2) + self.level(k)
        return mass

    def complement_flip(self):
        """The draw with every sibling pair swapped (Y -> 1 - Y on left children)."""
        return PolyaTreeDraw(self.levels, self.log_probs.reshape(-1, 2)[:, ::-1].ravel())


def ancestor_index(m, j, k):
    """Index of the level-k ancestor of B_mj, by repeated j -> ceil(j / 2)."""
    if not (1 <= k <= m and 1 <= j <= 2**m):
        raise IndexError(f"no set B_{m},{j} with an ancestor at level {k}")
    for _ in range(m - k):
        j = (j + 1) // 2
    return j


def partition_bounds(spec, m, j):
    """Endpoints of B_mj = (F0^-1((j-1)/2^m), F0^-1(j/2^m)], infinite at the ends."""
    if spec.centring is None:
        raise DomainError("partition bounds need a centring distribution")
    if not (m >= 1 and 1 <= j <= 2**m):
        raise IndexError(f"no set B_{m},{j}")
    lo = -math.inf if j == 1 else spec.centring.quantile((j - 1) / 2**m)
    hi = math.inf if j == 2**m else spec.centring.quantile(j / 2**m)
    return lo, hi


def sample_tree(spec, stream):
    return PolyaTreeDraw(
        spec.levels, kernels.pt_sample_logs(stream.generator, spec.level_shapes())
    )


def kl_forward(draw):
    """KL(f0 || f). Depends on the branch probabilities only, never on F0."""
    total = 0.0
    for m in range(1, draw.levels + 1):
        total -= draw.level(m).sum() * 0.5**m
    return total - draw.levels * LOG2


def kl_reverse(draw):
    """KL(f || f0), accumulating log-masses in one top-down pass."""
    mass = np.zeros(1)
    total = 0.0
    for m in range(1, draw.levels + 1):
        logs = draw.level(m)
        mass = np.repeat(mass, 2) + logs
        total += np.dot(np.exp(mass), logs)
    return total + draw.levels * LOG2


def density_at(spec, draw, x):
    """f(x) = prod_m Y_{m, j_m(x)} * 2^M * f0(x)."""
    if spec.centring is None:
        raise DomainError("density evaluation needs a centring distribution")
    levels = draw.levels
    f0 = spec.centring.pdf(x)
    if f0 == 0.0:
        return 0.0
    u = spec.centring.cdf(x)
    leaf = min(max(math.ceil(u * 2**levels), 1), 2**levels)
    log_mass = 0.0
    for m in range(1, levels + 1):
        log_mass += draw.level(m)[ancestor_index(levels, leaf, m) - 1]
    return math.exp(log_mass + levels * LOG2) * f0


# -- closed-form moments ------------------------------------------------------


def mean_kl_forward(spec):
    total = 0.0
    for a in spec.level_shapes():
        total += psi0(2.0 * a) - psi0(a) - LOG2
    return total


def var_kl_forward(spec):
    total = 0.0
    for m, a in enumerate(spec.level_shapes(), start=1):
        total += 0.5**m * (psi1(a) - 2.0 * psi1(2.0 * a))
    return total


def corollary_bound(alpha, family):
    """Upper bound on the M -> infinity limit of the forward-KL mean."""
    if not isinstance(family, RhoFamily) or not family.continuous:
        raise DomainError("the bound exists only for polynomial and geometric families")
    if not alpha > 0.0:
        raise DomainError("alpha must be > 0")
    d = family.delta
    if family.kind == "polynomial":
        return riemann_zeta(d) / (4.0 * alpha) + riemann_zeta(d * d) / alpha**2
    return (alpha * (d + 1.0) + 4.0) / (4.0 * alpha**2 * (d * d - 1.0))


def mean_kl_reverse(spec):
    total = 0.0
    for a in spec.level_shapes():
        total += lambda2(a) + LOG2
    return total


# Helpers of the reverse-KL variance, all functions of the level shape a.
# E[Y log Y] = lambda2 / 2 for Y ~ Be(a, a); lambda3..lambda6 enter the
# mixed moments of Y, log Y and log(1 - Y).


def lambda2(a):
    return psi0(a + 1.0) - psi0(2.0 * a + 1.0)


def lambda3(a):
    return psi0(a + 2.0) - psi0(2.0 * a + 2.0)


def lambda4(a):
    return psi0(a + 1.0) - psi0(2.0 * a + 2.0)


def lambda5(a):
    return psi1(a + 2.0) - psi1(2.0 * a + 2.0) + (psi0(a + 2.0) - psi0(2.0 * a + 2.0)) ** 2


def lambda6(a):
    return (psi0(a + 1.0) - psi0(2.0 * a + 2.0)) ** 2 - psi1(2.0 * a + 2.0)


def var_kl_reverse_terms(spec):
    """The two sums ``(A, B)`` whose total is Var{KL(f || f0)}.

    Transcribed term by term; in the cross-level block the ``-lambda2(m)
    lambda2(j)`` product sits inside the braces multiplied by the ancestor
    prefactor.
    """
    a = spec.level_shapes()
    levels = a.size
    lam2 = [lambda2(x) for x in a]
    # stay[k] = (a_k + 1) / (2 a_k + 1), split[k] = a_k / (2 a_k + 1)
    stay = [(x + 1.0) / (2.0 * x + 1.0) for x in a]
    split = [x / (2.0 * x + 1.0) for x in a]
    prefix = np.concatenate(([1.0], np.cumprod(stay)))  # prefix[k] = prod_{i<k} stay[i]

    big_a = 0.0
    for m in range(levels):
        big_a += prefix[m + 1] * lambda5(a[m]) - 0.5 ** (m + 1) * lam2[m] ** 2

    big_b = 0.0
    for m in range(levels):
        term = split[m] * prefix[m] * lambda6(a[m]) - 0.5 ** (m + 1) * lam2[m] ** 2
        for j in range(m):
            term += split[j] * prefix[j] * lam2[m] ** 2 - 0.5 ** (j + 1) * lam2[m] ** 2
        cross = 0.0
        l3 = lambda3(a[m])
        l4 = lambda4(a[m])
        for j in range(m + 1, levels):
            cross += stay[m] * l3 * lam2[j] + split[m] * l4 * lam2[j] - lam2[m] * lam2[j]
        term += 2.0 * prefix[m] * cross
        big_b += term
    return float(big_a), float(big_b)


def var_kl_reverse(spec):
    big_a, big_b = var_kl_reverse_terms(spec)
    return big_a + big_b


# -- tables -------------------------------------------------------------------


@dataclass(frozen=True)
class MomentRow:
    family: str
    levels: int
    alpha: float
    delta: Optional[float]
    mean_fwd: float
    var_fwd: float
    mean_rev: float
    var_rev: float
    bound: Optional[float]


MOMENT_HEADER = ("family", "M", "alpha", "delta", "mean_fwd", "var_fwd", "mean_rev", "var_rev", "bound")


def moment_row(spec):
    rho = spec.rho
    return MomentRow(
        family=rho.kind,
        levels=spec.levels,
        alpha=spec.alpha,
        delta=rho.delta,
        mean_fwd=mean_kl_forward(spec),
        var_fwd=var_kl_forward(spec),
        mean_rev=mean_kl_reverse(spec),
        var_rev=var_kl_reverse(spec),
        bound=corollary_bound(spec.alpha, rho) if rho.continuous else None,
    )


def moment_table(grid):
    """One row per ``(rho, M, alpha)`` triple of ``grid``."""
    return [moment_row(PolyaTreeSpec(alpha, rho, levels)) for rho, levels, alpha in grid]


def standard_families(delta):
    return [
        RhoFamily.discrete(),
        RhoFamily.singular(),
        RhoFamily.polynomial(delta),
        RhoFamily.geometric(delta),
    ]


def figure_grid(alpha=1.0, delta=2.0, max_levels=10):
    """Every family at M = 1..max_levels, for fixed alpha and delta."""
    return [
        (rho, levels, alpha)
        for rho in standard_families(delta)
        for levels in range(1, max_levels + 1)
    ]


def fmt(x):
    """12 significant digits; empty for a missing value."""
    return "" if x is None else f"{x:.12g}"


def write_moment_csv(rows, fh):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(MOMENT_HEADER)
    for r in rows:
        writer.writerow(
            [r.family, r.levels, fmt(r.alpha), fmt(r.delta),
             fmt(r.mean_fwd), fmt(r.var_fwd), fmt(r.mean_rev), fmt(r.var_rev), fmt(r.bound)]
        )
