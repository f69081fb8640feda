"""Hot loops, dispatched to numba or pure numpy according to ``PTKL_BACKEND``.

Both implementations expose the same functions:

``log_gamma_fill(gen, shapes)``
    one log-gamma variate per entry of ``shapes``.
``log_beta_fill(gen, a, b, size)``
    ``(size, 2)`` array of ``(log y, log(1 - y))`` for ``y ~ Be(a, b)``.
``pt_sample_logs(gen, level_shapes)``
    flat level-major log branch probabilities of one Polya tree.
``pt_kl_batch(gen, level_shapes, n_draws)``
    ``(n_draws, 2)`` forward and reverse KL of independent tree draws.
``dirichlet_kl_batch(gen, concentration, log_p, n_draws)``
    ``(n_draws, 2)`` forward and reverse KL of Dirichlet reweighings.
``enumerate_multinomial_reverse_mean(p, n)``
    exact reverse-KL mean of the multinomial bootstrap.
"""
from .._jit import BACKEND

if BACKEND == "numba":
    from ._numba import (
        dirichlet_kl_batch,
        enumerate_multinomial_reverse_mean,
        log_beta_fill,
        log_gamma_fill,
        pt_kl_batch,
        pt_sample_logs,
    )
else:
    from ._numpy import (
        dirichlet_kl_batch,
        enumerate_multinomial_reverse_mean,
        log_beta_fill,
        log_gamma_fill,
        pt_kl_batch,
        pt_sample_logs,
    )

__all__ = [
    "BACKEND",
    "dirichlet_kl_batch",
    "enumerate_multinomial_reverse_mean",
    "log_beta_fill",
    "log_gamma_fill",
    "pt_kl_batch",
    "pt_sample_logs",
]
