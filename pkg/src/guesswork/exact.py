"""Guesswork by full enumeration of all ``n**m`` words.

These are the ground-truth oracles for every estimator. Words are ranked
by decreasing probability and ``G = sum p(w) * rank(w)``; ties may be broken
in any order without changing the value.
"""

import math

import numpy as np

from ._validation import check_enumerable, check_model, check_word_length
from .estimate import GuessworkEstimate, Method
from .source import MarkovSource, SymbolDistribution

_CHUNK = 1 << 22


def guesswork_uniform(n, m):
    """Zero-order guesswork ``(n**m + 1) / 2``, evaluated in log space."""
    n = check_word_length(n, "n")
    m = check_word_length(m)
    log_nm = m * math.log(n)
    log_g = log_nm + math.log1p(math.exp(-log_nm)) - math.log(2.0)
    return GuessworkEstimate(log_g, m, n, Method.EXACT, params={"m": m, "n": n})


def _first_order_log_products(log_p, m):
    v = log_p
    for _ in range(m - 1):
        v = (v[:, None] + log_p[None, :]).ravel()
    return v


def _second_order_log_products(log_init, log_P, m):
    n = log_init.size
    v = log_init
    for _ in range(m - 1):
        # index of a word is i1*n^(k-1) + ... + ik, so its last symbol is idx % n
        last = np.arange(v.size) % n
        v = (v[:, None] + log_P[last, :]).ravel()
    return v


def _log_ranked_sum(log_products):
    """``ln sum_k exp(lp_k) * k`` with ``lp`` sorted in decreasing order."""
    lp = log_products[np.isfinite(log_products)]
    if lp.size == 0:
        raise ValueError("every word has probability zero")
    lp = np.sort(lp)[::-1]
    top = lp[0]
    total = 0.0
    for start in range(0, lp.size, _CHUNK):
        block = lp[start:start + _CHUNK]
        ranks = np.arange(start + 1, start + 1 + block.size, dtype=float)
        total += float(np.dot(np.exp(block - top), ranks))
    return top + math.log(total)


def guesswork_exact_first(dist, m, cap=None):
    """Exact first-order guesswork of words of length ``m``.

    Raises :class:`~guesswork.EnumerationCapError` when ``n**m`` exceeds the
    enumeration cap (``GUESSWORK_ENUM_CAP`` or 1e8 by default).
    """
    dist = check_model(dist)
    if not isinstance(dist, SymbolDistribution):
        raise TypeError("first-order enumeration needs a SymbolDistribution")
    m = check_word_length(m)
    check_enumerable(dist.n, m, cap)
    lp = _first_order_log_products(np.log(dist.probs), m)
    return GuessworkEstimate(
        _log_ranked_sum(lp), m, dist.n, Method.EXACT, params={"m": m, "n": dist.n}
    )


def guesswork_exact_second(source, m, cap=None):
    """Exact second-order guesswork; zero-probability words contribute nothing."""
    source = check_model(source)
    if not isinstance(source, MarkovSource):
        raise TypeError("second-order enumeration needs a MarkovSource")
    m = check_word_length(m)
    check_enumerable(source.n, m, cap)
    with np.errstate(divide="ignore"):
        log_init = np.log(source.require_initial())
        log_P = np.log(source.transitions)
    lp = _second_order_log_products(log_init, log_P, m)
    return GuessworkEstimate(
        _log_ranked_sum(lp), m, source.n, Method.EXACT, params={"m": m, "n": source.n}
    )


def guesswork_exact(model, m, cap=None):
    """Dispatch to the first- or second-order oracle by model type."""
    model = check_model(model)
    if isinstance(model, MarkovSource):
        return guesswork_exact_second(model, m, cap)
    return guesswork_exact_first(model, m, cap)
