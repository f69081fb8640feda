"""numba kernels. Each takes a ``numpy.random.Generator`` and consumes it
sequentially, so a given generator state always yields the same output."""
import math

import numba
import numpy as np

_njit = numba.njit(cache=True, nogil=True)
_LOG2 = math.log(2.0)


@_njit
def _log_gamma_ge1(gen, a):
    # Marsaglia-Tsang squeeze/accept, returning log(d * v) directly
    d = a - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    while True:
        x = gen.standard_normal()
        v = 1.0 + c * x
        if v <= 0.0:
            continue
        v3 = v * v * v
        u = gen.random()
        x2 = x * x
        if u < 1.0 - 0.0331 * x2 * x2:
            return math.log(d) + 3.0 * math.log(v)
        if math.log(u) < 0.5 * x2 + d * (1.0 - v3 + math.log(v3)):
            return math.log(d) + 3.0 * math.log(v)


@_njit
def log_gamma_variate(gen, a):
    if a >= 1.0:
        return _log_gamma_ge1(gen, a)
    # G(a) = G(a + 1) * U^(1/a), kept in log space
    lg = _log_gamma_ge1(gen, a + 1.0)
    return lg + math.log1p(-gen.random()) / a


@_njit
def log_gamma_fill(gen, shapes):
    out = np.empty(shapes.size)
    flat = shapes.ravel()
    for i in range(flat.size):
        out[i] = log_gamma_variate(gen, flat[i])
    return out.reshape(shapes.shape)


@_njit
def _log_beta_pair(gen, a, b):
    lg1 = log_gamma_variate(gen, a)
    lg2 = log_gamma_variate(gen, b)
    hi = max(lg1, lg2)
    lse = hi + math.log1p(math.exp(-abs(lg1 - lg2)))
    return lg1 - lse, lg2 - lse


@_njit
def log_beta_fill(gen, a, b, size):
    out = np.empty((size, 2))
    for i in range(size):
        out[i, 0], out[i, 1] = _log_beta_pair(gen, a, b)
    return out


@_njit
def pt_sample_logs(gen, level_shapes):
    levels = level_shapes.size
    out = np.empty(2 ** (levels + 1) - 2)
    for m in range(1, levels + 1):
        off = 2**m - 2
        a = level_shapes[m - 1]
        for i in range(2 ** (m - 1)):
            out[off + 2 * i], out[off + 2 * i + 1] = _log_beta_pair(gen, a, a)
    return out


@_njit
def pt_kl_batch(gen, level_shapes, n_draws):
    levels = level_shapes.size
    width = 2**levels
    prev = np.zeros(width)
    cur = np.zeros(width)
    out = np.empty((n_draws, 2))
    for r in range(n_draws):
        prev[0] = 0.0
        fwd = 0.0
        rev = 0.0
        for m in range(1, levels + 1):
            a = level_shapes[m - 1]
            scale = 0.5**m
            level_sum = 0.0
            for i in range(2 ** (m - 1)):
                ly, l1my = _log_beta_pair(gen, a, a)
                level_sum += ly + l1my
                left = prev[i] + ly
                right = prev[i] + l1my
                cur[2 * i] = left
                cur[2 * i + 1] = right
                rev += math.exp(left) * ly + math.exp(right) * l1my
            fwd -= level_sum * scale
            prev, cur = cur, prev
        out[r, 0] = fwd - levels * _LOG2
        out[r, 1] = rev + levels * _LOG2
    return out


@_njit
def dirichlet_kl_batch(gen, concentration, log_p, n_draws):
    n = concentration.size
    lg = np.empty(n)
    out = np.empty((n_draws, 2))
    for r in range(n_draws):
        hi = -np.inf
        for i in range(n):
            lg[i] = log_gamma_variate(gen, concentration[i])
            if lg[i] > hi:
                hi = lg[i]
        acc = 0.0
        for i in range(n):
            acc += math.exp(lg[i] - hi)
        lse = hi + math.log(acc)
        fwd = 0.0
        rev = 0.0
        for i in range(n):
            lw = lg[i] - lse
            fwd += math.exp(log_p[i]) * (log_p[i] - lw)
            rev += math.exp(lw) * (lw - log_p[i])
        out[r, 0] = fwd
        out[r, 1] = rev
    return out


@_njit
def enumerate_multinomial_reverse_mean(p, n):
    """Exact E[sum w log(w/p)] for n*w ~ Mult(n, p) by walking every count
    vector of n trials over k cells."""
    k = p.size
    log_fact = np.zeros(n + 1)
    for i in range(2, n + 1):
        log_fact[i] = log_fact[i - 1] + math.log(i)
    log_p = np.log(p)
    c = np.zeros(k, dtype=np.int64)
    c[0] = n
    t = n
    h = 0
    total = 0.0
    while True:
        log_prob = log_fact[n]
        value = 0.0
        for i in range(k):
            ci = c[i]
            if ci > 0:
                log_prob += ci * log_p[i] - log_fact[ci]
                w = ci / n
                value += w * (math.log(w) - log_p[i])
        total += math.exp(log_prob) * value
        if c[k - 1] == n:
            break
        if t > 1:
            h = 0
        h += 1
        t = c[h - 1]
        c[h - 1] = 0
        c[0] = t - 1
        c[h] += 1
    return total
