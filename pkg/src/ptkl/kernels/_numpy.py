"""Pure-numpy kernels, vectorised across draws.

Same contracts as the numba kernels; the variates are drawn in a different
order, so the two backends agree in distribution but not bit for bit.
"""
import math

import numpy as np

_LOG2 = math.log(2.0)
_CHUNK = 8192


def _log_gamma_ge1(gen, a):
    """Marsaglia-Tsang on an array of shapes >= 1, redrawing rejects in bulk."""
    d = a - 1.0 / 3.0
    c = 1.0 / np.sqrt(9.0 * d)
    out = np.empty_like(d)
    todo = np.arange(d.size)
    while todo.size:
        x = gen.standard_normal(todo.size)
        v = 1.0 + c[todo] * x
        pos = v > 0.0
        vs = np.where(pos, v, 1.0)
        v3 = vs**3
        u = gen.random(todo.size)
        x2 = x * x
        with np.errstate(divide="ignore"):
            ok = pos & (
                (u < 1.0 - 0.0331 * x2 * x2)
                | (np.log(u) < 0.5 * x2 + d[todo] * (1.0 - v3 + np.log(v3)))
            )
        hit = todo[ok]
        out[hit] = np.log(d[hit]) + 3.0 * np.log(vs[ok])
        todo = todo[~ok]
    return out


def log_gamma_fill(gen, shapes):
    shapes = np.asarray(shapes, dtype=np.float64)
    flat = shapes.ravel()
    small = flat < 1.0
    out = _log_gamma_ge1(gen, np.where(small, flat + 1.0, flat))
    if small.any():
        u = gen.random(int(small.sum()))
        out[small] += np.log1p(-u) / flat[small]
    return out.reshape(shapes.shape)


def _log_beta(lg1, lg2):
    lse = np.logaddexp(lg1, lg2)
    return lg1 - lse, lg2 - lse


def log_beta_fill(gen, a, b, size):
    lg = log_gamma_fill(gen, np.broadcast_to(np.array([a, b]), (size, 2)))
    ly, l1my = _log_beta(lg[:, 0], lg[:, 1])
    return np.column_stack((ly, l1my))


def pt_sample_logs(gen, level_shapes):
    parts = []
    for m, a in enumerate(level_shapes, start=1):
        pairs = log_beta_fill(gen, a, a, 2 ** (m - 1))
        parts.append(pairs.ravel())
    return np.concatenate(parts)


def _pt_kl_chunk(gen, level_shapes, n):
    fwd = np.zeros(n)
    rev = np.zeros(n)
    mass = np.zeros((n, 1))
    for m, a in enumerate(level_shapes, start=1):
        half = 2 ** (m - 1)
        lg = log_gamma_fill(gen, np.full((n, half, 2), a))
        ly, l1my = _log_beta(lg[..., 0], lg[..., 1])
        logs = np.stack((ly, l1my), axis=-1).reshape(n, 2 * half)
        mass = np.repeat(mass, 2, axis=1) + logs
        fwd -= logs.sum(axis=1) * 0.5**m
        rev += (np.exp(mass) * logs).sum(axis=1)
    levels = len(level_shapes)
    return np.column_stack((fwd - levels * _LOG2, rev + levels * _LOG2))


def pt_kl_batch(gen, level_shapes, n_draws):
    chunks = [
        _pt_kl_chunk(gen, level_shapes, min(_CHUNK, n_draws - start))
        for start in range(0, n_draws, _CHUNK)
    ]
    return np.concatenate(chunks) if chunks else np.empty((0, 2))


def dirichlet_kl_batch(gen, concentration, log_p, n_draws):
    out = np.empty((n_draws, 2))
    step = max(1, _CHUNK * 8 // concentration.size)
    for start in range(0, n_draws, step):
        n = min(step, n_draws - start)
        lg = log_gamma_fill(gen, np.broadcast_to(concentration, (n, concentration.size)))
        lw = lg - np.logaddexp.reduce(lg, axis=1, keepdims=True)
        out[start : start + n, 0] = (np.exp(log_p) * (log_p - lw)).sum(axis=1)
        out[start : start + n, 1] = (np.exp(lw) * (lw - log_p)).sum(axis=1)
    return out


def enumerate_multinomial_reverse_mean(p, n):
    """Exact E[sum w log(w/p)] for n*w ~ Mult(n, p), one count vector at a time."""
    from itertools import combinations

    k = p.size
    log_p = np.log(p)
    log_fact = np.concatenate(([0.0], np.cumsum(np.log(np.arange(1, n + 1)))))
    total = 0.0
    # stars and bars: each combination of k-1 bar positions is one count vector
    for bars in combinations(range(n + k - 1), k - 1):
        edges = np.array((-1,) + bars + (n + k - 1,))
        counts = np.diff(edges) - 1
        nz = counts > 0
        w = counts[nz] / n
        log_prob = log_fact[n] + np.sum(counts * log_p - log_fact[counts])
        total += math.exp(log_prob) * np.sum(w * (np.log(w) - log_p[nz]))
    return total
