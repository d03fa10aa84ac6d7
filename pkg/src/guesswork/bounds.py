"""Closed-form comparators: Massey and Arikan lower bounds, entropy ansatz."""

import math

import numpy as np

from ._validation import check_model, check_word_length
from .estimate import GuessworkEstimate, Method
from .source import SymbolDistribution


def _entropy_params(H):
    if H.n is None:
        raise ValueError("entropy value has no alphabet size attached")
    return {"m": H.m, "n": H.n, "order": H.order}


def massey_lower(H):
    """Massey's bound ``b**H / 4 + 1`` for any order's word entropy."""
    log_g = float(np.logaddexp(H.nats - math.log(4.0), 0.0))
    return GuessworkEstimate(log_g, H.m, H.n, Method.MASSEY, params=_entropy_params(H))


def arikan_lower(dist, m):
    """Arikan's bound ``(sum_i sqrt p_i)**(2m) / (1 + m ln n)``, first order only."""
    dist = check_model(dist)
    if not isinstance(dist, SymbolDistribution):
        raise TypeError("Arikan's bound is defined for first-order distributions only")
    m = check_word_length(m)
    n = dist.n
    log_g = 2 * m * math.log(np.sqrt(dist.probs).sum()) - math.log1p(m * math.log(n))
    return GuessworkEstimate(log_g, m, n, Method.ARIKAN, params={"m": m, "n": n})


def entropy_ansatz(H):
    """``(b**H + 1) / 2``; exact for uniform symbols, a heuristic otherwise."""
    log_g = float(np.logaddexp(H.nats, 0.0)) - math.log(2.0)
    return GuessworkEstimate(log_g, H.m, H.n, Method.ENTROPY_ANSATZ, params=_entropy_params(H))
