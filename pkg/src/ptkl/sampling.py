"""Seedable variate generation: gamma, beta, Dirichlet and multinomial.

Streams are counter-based: a Philox generator keyed by ``(master_seed,
stream_id)``, so any number of workers can derive independent streams from one
seed without coordinating.
"""
import math
import os

import numpy as np

from . import kernels
from .errors import DomainError

DEFAULT_SEED = 42
SEED_ENV = "PTKL_SEED"
_U64 = 2**64


def default_seed():
    """Seed from ``$PTKL_SEED`` when set, else 42."""
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw.strip() == "":
        return DEFAULT_SEED
    seed = int(raw, 0)
    if not 0 <= seed < _U64:
        raise DomainError(f"{SEED_ENV} must be an unsigned 64-bit integer")
    return seed


class RngStream:
    """One independent random stream, owned by a single worker at a time."""

    def __init__(self, master_seed=DEFAULT_SEED, stream_id=0):
        master_seed = int(master_seed)
        stream_id = int(stream_id)
        if not (0 <= master_seed < _U64 and 0 <= stream_id < _U64):
            raise DomainError("master_seed and stream_id must be unsigned 64-bit integers")
        self.master_seed = master_seed
        self.stream_id = stream_id
        # Philox-4x64 key is 128 bits: low word seed, high word stream id
        self.generator = np.random.Generator(
            np.random.Philox(key=master_seed | (stream_id << 64))
        )

    def __repr__(self):
        return f"RngStream(master_seed={self.master_seed}, stream_id={self.stream_id})"

    def uniform(self, size=None):
        return self.generator.random(size)

    def spawn(self, n):
        """``n`` sibling streams with consecutive ids after this one."""
        return [RngStream(self.master_seed, self.stream_id + 1 + i) for i in range(n)]


def _positive(name, value):
    value = float(value)
    if not (value > 0.0 and math.isfinite(value)):
        raise DomainError(f"{name} must be finite and > 0, got {value!r}")
    return value


def sample_log_gamma(stream, shape, size=None):
    """log of Gamma(shape, 1) variates, exact even where the variate underflows."""
    shape = _positive("shape", shape)
    if size is None:
        return float(kernels.log_gamma_fill(stream.generator, np.array([shape]))[0])
    return kernels.log_gamma_fill(stream.generator, np.full(size, shape))


def sample_gamma(stream, shape, size=None):
    """Gamma(shape, scale 1) variates.

    Shapes below one go through G(a) = G(a + 1) U^(1/a) evaluated in log space.
    """
    return np.exp(sample_log_gamma(stream, shape, size))


def sample_beta_log(stream, a, b):
    """One Be(a, b) draw as ``(y, log y, log(1 - y))``.

    The logs come from the two underlying gamma variates, so they stay finite
    and accurate even when ``y`` rounds to 0 or 1.
    """
    a = _positive("a", a)
    b = _positive("b", b)
    log_y, log_1my = kernels.log_beta_fill(stream.generator, a, b, 1)[0]
    return math.exp(log_y), float(log_y), float(log_1my)


def sample_dirichlet_log(stream, concentration):
    """log weights of one Dirichlet draw."""
    conc = np.asarray(concentration, dtype=np.float64)
    if conc.ndim != 1 or conc.size < 2:
        raise DomainError("concentration must be a vector of length >= 2")
    if not (np.all(conc > 0.0) and np.all(np.isfinite(conc))):
        raise DomainError("concentration entries must be finite and > 0")
    lg = kernels.log_gamma_fill(stream.generator, conc)
    return lg - np.logaddexp.reduce(lg)


def sample_dirichlet(stream, concentration):
    """One Dirichlet draw: normalised gamma variates on the simplex."""
    w = np.exp(sample_dirichlet_log(stream, concentration))
    return w / w.sum()


def check_simplex(p, strict=False, tol=1e-9):
    p = np.asarray(p, dtype=np.float64)
    if p.ndim != 1 or p.size < 1:
        raise DomainError("probability vector must be one-dimensional and non-empty")
    if not np.all(np.isfinite(p)):
        raise DomainError("probability vector has non-finite entries")
    if strict and not np.all(p > 0.0):
        raise DomainError("probability vector must be strictly positive")
    if np.any(p < 0.0):
        raise DomainError("probability vector has negative entries")
    if abs(p.sum() - 1.0) > tol:
        raise DomainError(f"probability vector sums to {p.sum()!r}, not 1")
    return p


def sample_multinomial_weights(stream, n, p, size=None):
    """Frequentist-bootstrap weights: counts of ``Mult(n, p)`` divided by ``n``."""
    n = int(n)
    if n < 1:
        raise DomainError("n must be a positive integer")
    p = check_simplex(p)
    counts = stream.generator.multinomial(n, p / p.sum(), size=size)
    return counts / n
