"""Quantified and randomly sampled guesswork estimates.

Each word's ``x = -ln p(word)`` is binned into ``m * N`` subranges of width
``delta`` starting at ``offset``. Guesswork then follows from the bin counts
alone::

    G^Q = sum_j c_j * (C_j + (c_j + 1) / 2) * P_j

where ``C_j`` counts the words in more probable bins and ``P_j`` is the
probability at the centre of bin ``j``. Counts are stored as natural logs
because ``n**m`` quickly leaves the float range.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from ._sampler import WordSampler
from ._validation import check_enumerable, check_model, check_positive_int, check_word_length
from .estimate import GuessworkEstimate, Method
from .exact import _first_order_log_products, _second_order_log_products
from .source import MarkovSource

# quantile of the standard normal used for the 99 % replicate interval
Z_99 = 2.58

BACKENDS = ("full", "convolve", "dp-chain")

# bin indices within this many bin widths below a boundary snap up to it
_EDGE_SNAP = 1e-9


@dataclass(frozen=True)
class LogProductHistogram:
    """Word counts per ``-ln p`` subrange, stored as natural logs.

    Bin ``j`` covers ``[offset + j*delta, offset + (j+1)*delta)``.
    ``log_zero_mass`` is the log of the (scaled) number of words that landed
    in no bin: zero-probability words, or truncated tail mass for a normal
    model. ``log_q`` is the half-width of the rigorous multiplicative
    interval on guesswork in log space, or ``None`` if there is none.
    """

    delta: float
    offset: float
    log_counts: np.ndarray
    log_total: float
    m: int
    n: int
    order: int
    N: int
    backend: str
    log_zero_mass: float = -math.inf
    log_q: float = None

    def __post_init__(self):
        lc = np.array(self.log_counts, dtype=float)
        lc.setflags(write=False)
        object.__setattr__(self, "log_counts", lc)
        if self.delta < 0:
            raise ValueError("bin width must be non-negative")
        if self.delta == 0 and lc.size != 1:
            raise ValueError("a zero-width histogram must have exactly one bin")
        mass = np.logaddexp(logsumexp(lc) if lc.size else -math.inf, self.log_zero_mass)
        if abs(mass - self.log_total) > 1e-9 * max(1.0, abs(self.log_total)):
            raise ValueError(
                f"histogram mass exp({mass:.12g}) != n**m = exp({self.log_total:.12g})"
            )

    @property
    def counts(self):
        with np.errstate(over="ignore"):
            return np.exp(self.log_counts)

    @property
    def zero_mass(self):
        return math.exp(self.log_zero_mass) if self.log_zero_mass > -math.inf else 0.0

    @property
    def total_weight(self):
        return math.exp(self.log_total)

    def log_bin_probabilities(self):
        j = np.arange(self.log_counts.size)
        return -(self.offset + (j + 0.5) * self.delta)

    def edges(self):
        return self.offset + self.delta * np.arange(self.log_counts.size + 1)


def _word_range(model, m):
    """``(offset, log of the max/min word-probability ratio)``."""
    if isinstance(model, MarkovSource):
        log_hi, log_lo = model.word_log_bounds(m)
        return -log_hi, log_hi - log_lo
    p = model.probs
    return -m * math.log(p[0]), m * (math.log(p[0]) - math.log(p[-1]))


def log_quantization_interval(model, m, N, backend="full"):
    """Natural log of the interval factor ``Q`` (see :func:`quantization_interval`)."""
    model = check_model(model)
    m = check_word_length(m)
    N = check_positive_int(N, "N")
    _, log_ratio = _word_range(model, m)
    # first order: ln(p1/pn) / 2N; second order: ln(bound ratio) / 2mN
    log_q = log_ratio / (2 * m * N)
    if backend in ("convolve", "dp-chain"):
        log_q *= m
    elif backend not in ("full",):
        raise ValueError(f"unknown backend {backend!r}")
    return log_q


def quantization_interval(model, m, N, backend="full"):
    """Multiplicative factor ``Q`` with ``G in [G^Q / Q, G^Q * Q]``.

    First order gives ``Q_1 = (p_1/p_n)**(1/2N)``. Second order gives
    ``Q_2 = (max p / min p)**(1/2mN) * (max P / min+ P)**((m-1)/2mN)``,
    with ``min+`` over non-zero transitions. Backends that quantise per
    symbol or per chain step accumulate a half bin per factor, giving
    ``Q**m``. A degenerate (uniform) range gives 1.
    """
    return math.exp(log_quantization_interval(model, m, N, backend))


def _bin_index(x, delta, nbins):
    idx = np.floor(x / delta + _EDGE_SNAP)
    return np.clip(idx, 0, nbins - 1).astype(np.int64)


def _log_bincount(idx, nbins):
    counts = np.bincount(idx, minlength=nbins).astype(float)
    with np.errstate(divide="ignore"):
        return np.log(counts)


def _single_bin(model, m, N, backend, log_total=None):
    offset, _ = _word_range(model, m)
    log_total = m * math.log(model.n) if log_total is None else log_total
    order = 2 if isinstance(model, MarkovSource) else 1
    return LogProductHistogram(0.0, offset, [log_total], log_total, m, model.n, order, N,
                               backend, log_q=0.0)


def histogram_enumerate(model, m, N, backend="full", cap=None):
    """Bin every word of length ``m`` into ``m * N`` subranges.

    ``full`` enumerates all ``n**m`` words and bins their exact
    log-probabilities. ``convolve`` (first order) bins each symbol once and
    self-convolves the per-symbol histogram ``m`` times. ``dp-chain``
    (second order) runs a dynamic programme over (position, last symbol,
    bin). The two fast backends round each factor to the bin grid, so their
    interval widens from ``Q`` to ``Q**m``.
    """
    model = check_model(model)
    m = check_word_length(m)
    N = check_positive_int(N, "N")
    order = 2 if isinstance(model, MarkovSource) else 1
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}; choose from {BACKENDS}")
    if backend == "convolve" and order != 1:
        raise TypeError("the convolve backend needs a first-order model")
    if backend == "dp-chain" and order != 2:
        raise TypeError("the dp-chain backend needs a second-order model")
    offset, log_ratio = _word_range(model, m)
    if log_ratio == 0:
        if backend == "full":
            check_enumerable(model.n, m, cap)
        if order == 2:
            return _single_bin_chain(model, m, N, backend)
        return _single_bin(model, m, N, backend)
    nbins = m * N
    delta = log_ratio / nbins
    log_q = log_quantization_interval(model, m, N, backend)
    log_total = m * math.log(model.n)
    if backend == "full":
        check_enumerable(model.n, m, cap)
        if order == 1:
            x = _first_order_log_products(model.log_ratios(), m)
            zero = 0
        else:
            with np.errstate(divide="ignore"):
                lp = _second_order_log_products(
                    np.log(model.require_initial()), np.log(model.transitions), m
                )
            finite = np.isfinite(lp)
            zero = lp.size - int(finite.sum())
            x = -lp[finite] - offset
            tol = 1e-9 * max(1.0, log_ratio)
            if x.size and (x.min() < -tol or x.max() > log_ratio + tol):
                raise ValueError("word probability outside the second-order bound range")
        lc = _log_bincount(_bin_index(x, delta, nbins), nbins)
        log_zero = math.log(zero) if zero else -math.inf
        return LogProductHistogram(delta, offset, lc, log_total, m, model.n, order, N,
                                   backend, log_zero, log_q)
    if backend == "convolve":
        lc, shift = _convolve_first(model, m, N, delta, nbins)
        log_zero = -math.inf
    else:
        lc, shift, log_zero = _dp_chain(model, m, N, delta, nbins)
    # per-factor rounding puts bin j's centre at offset + (j + m/2) * delta
    return LogProductHistogram(delta, offset + shift, lc, log_total, m, model.n, order, N,
                               backend, log_zero, log_q)


def _single_bin_chain(model, m, N, backend):
    # every non-zero word has the same probability; count them by DP
    support = (model.transitions > 0).astype(float) / model.n
    v = (np.asarray(model.require_initial()) > 0).astype(float) / model.n
    for _ in range(m - 1):
        v = v @ support
    frac = float(v.sum())
    log_total = m * math.log(model.n)
    log_count = log_total + math.log(frac)
    log_zero = log_total + math.log1p(-frac) if frac < 1 else -math.inf
    offset, _ = _word_range(model, m)
    return LogProductHistogram(0.0, offset, [log_count], log_total, m, model.n, 2, N,
                               backend, log_zero, 0.0)


def _step_index(x, delta, span):
    # rounding each factor to its bin centre keeps the error within delta/2;
    # the top index is capped so a factor at the very edge keeps that bound
    top = max(int(math.ceil(span / delta - 1e-9)) - 1, 0)
    idx = np.floor(x / delta + _EDGE_SNAP)
    return np.clip(idx, 0, top).astype(np.int64)


def _convolve_first(model, m, N, delta, nbins):
    x = model.log_ratios()
    k = _step_index(x, delta, x[-1])
    h = np.bincount(k, minlength=N).astype(float) / model.n
    c = np.array([1.0])
    log_scale = 0.0
    for _ in range(m):
        c = np.convolve(c, h)
        s = c.max()
        c /= s
        log_scale += math.log(s)
    lc = np.full(nbins, -math.inf)
    with np.errstate(divide="ignore"):
        lc[: c.size] = np.log(c) + log_scale + m * math.log(model.n)
    return lc, (m - 1) * delta / 2


def _dp_chain(model, m, N, delta, nbins):
    n = model.n
    p = np.asarray(model.require_initial())
    P = model.transitions
    nz = P > 0
    pmax = p[p > 0].max()
    Pmax, Pmin = P[nz].max(), P[nz].min()
    with np.errstate(divide="ignore"):
        x0 = np.log(pmax) - np.log(p)
        xP = np.log(Pmax) - np.log(P)
    k0 = _step_index(np.where(p > 0, x0, 0.0), delta, math.log(pmax / p[p > 0].min()))
    kP = _step_index(np.where(nz, xP, 0.0), delta, math.log(Pmax / Pmin))
    state = np.zeros((n, nbins))
    live = np.flatnonzero(p > 0)
    state[live, k0[live]] = 1.0 / n
    shifts = np.unique(kP[nz])
    masks = {int(s): ((kP == s) & nz).astype(float) / n for s in shifts}
    log_scale = 0.0
    for _ in range(m - 1):
        new = np.zeros_like(state)
        for s, M in masks.items():
            if s >= nbins:
                continue
            new[:, s:] += M.T @ state[:, : nbins - s]
        top = new.max()
        if top == 0:
            raise ValueError("every word has probability zero")
        new /= top
        log_scale += math.log(top)
        state = new
    h = state.sum(axis=0)
    log_total = m * math.log(n)
    with np.errstate(divide="ignore"):
        lc = np.log(h) + log_scale + log_total
    log_nonzero = logsumexp(lc) - log_total
    log_zero = log_total + math.log(-math.expm1(log_nonzero)) if log_nonzero < -1e-15 else -math.inf
    return lc, (m - 1) * delta / 2, log_zero


def histogram_sample(model, m, N, S, seed=None, rng=None):
    """Histogram from ``m * S`` uniformly random words, scaled to ``n**m``.

    Every word is equally likely to be drawn. Zero-probability words count
    towards the ``m * S`` denominator but fall in no bin. Pass either an
    integer ``seed`` or a numpy ``Generator``.
    """
    model = check_model(model)
    m = check_word_length(m)
    N = check_positive_int(N, "N")
    S = check_positive_int(S, "S")
    order = 2 if isinstance(model, MarkovSource) else 1
    offset, log_ratio = _word_range(model, m)
    log_total = m * math.log(model.n)
    if log_ratio == 0:
        if order == 1:
            return LogProductHistogram(0.0, offset, [log_total], log_total, m, model.n, 1, N,
                                       "sample")
        nbins, delta = 1, 0.0
    else:
        nbins = m * N
        delta = log_ratio / nbins
    if rng is None:
        rng = np.random.default_rng(seed)
    words = m * S
    counts = np.zeros(nbins)
    zero = 0
    sampler = WordSampler(model, m)
    for x in sampler.chunks(words, rng):
        ok = np.isfinite(x)
        zero += x.size - int(ok.sum())
        if nbins == 1:
            counts[0] += ok.sum()
        else:
            counts += np.bincount(_bin_index(x[ok], delta, nbins), minlength=nbins)
    scale = log_total - math.log(words)
    with np.errstate(divide="ignore"):
        lc = np.log(counts) + scale
    log_zero = math.log(zero) + scale if zero else -math.inf
    if zero == words:
        lc = np.full(nbins, -math.inf)
        log_zero = log_total
    return LogProductHistogram(delta, offset, lc, log_total, m, model.n, order, N, "sample",
                               log_zero)


def log_guesswork_from_histogram(hist):
    lc = hist.log_counts
    if not np.any(np.isfinite(lc)):
        raise ValueError("histogram holds no words")
    # log of C_j, the number of words in bins before j
    cum = np.logaddexp.accumulate(lc)
    log_C = np.concatenate(([-math.inf], cum[:-1]))
    log_rank = np.logaddexp(log_C, np.logaddexp(lc - math.log(2.0), -math.log(2.0)))
    terms = lc + log_rank + hist.log_bin_probabilities()
    return float(logsumexp(terms[np.isfinite(lc)]))


_BACKEND_METHOD = {"sample": Method.SAMPLE, "normal": Method.NORMAL_BINNED}


def guesswork_from_histogram(hist):
    """Guesswork estimate ``G^Q`` from bin counts.

    When the histogram carries a rigorous bound (enumerated backends) the
    estimate's interval is ``[G^Q / Q, G^Q * Q]``.
    """
    log_g = log_guesswork_from_histogram(hist)
    interval = None
    if hist.log_q is not None:
        interval = (log_g - hist.log_q, log_g + hist.log_q)
    method = _BACKEND_METHOD.get(hist.backend, Method.QUANTIFY)
    params = {"m": hist.m, "n": hist.n, "N": hist.N, "backend": hist.backend}
    return GuessworkEstimate(log_g, hist.m, hist.n, method, interval, params)


def guesswork_quantified(model, m, N, backend="full", cap=None):
    """Shorthand for ``guesswork_from_histogram(histogram_enumerate(...))``."""
    return guesswork_from_histogram(histogram_enumerate(model, m, N, backend, cap))


@dataclass(frozen=True)
class ReplicateSummary:
    """Mean, spread and 99 % interval of ``T`` independent sampled estimates.

    ``estimate.log_value`` is ``ln G^R`` and ``estimate.interval`` the
    confidence interval ``[1 - R, 1 + R] * G^R`` in log space (``-inf``
    lower end if ``R >= 1``).
    """

    estimate: GuessworkEstimate
    log_values: np.ndarray
    rel_std: float
    R: float

    @property
    def log_mean(self):
        return self.estimate.log_value

    @property
    def mean(self):
        return self.estimate.value

    @property
    def std(self):
        return self.rel_std * self.estimate.value

    @property
    def ci(self):
        lo, hi = self.estimate.interval
        return (math.exp(lo) if lo > -math.inf else 0.0, math.exp(hi))


def replicate_estimate(model, m, N, S, T, seed=None, n_jobs=None):
    """Repeat the sampled estimate ``T`` times on independent RNG substreams.

    ``R = 2.58 * s / (G^R * sqrt(T))`` with ``s`` the sample standard
    deviation of the replicates. Substreams come from
    ``SeedSequence(seed).spawn(T)``, so results do not depend on ``n_jobs``.
    ``seed`` may also be a ``SeedSequence``.
    """
    model = check_model(model)
    m = check_word_length(m)
    T = check_positive_int(T, "T")
    if T < 2:
        raise ValueError("at least two replicates are needed for a standard deviation")
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    children = seed.spawn(T)

    def one(child):
        hist = histogram_sample(model, m, N, S, rng=np.random.default_rng(child))
        return log_guesswork_from_histogram(hist)

    if n_jobs and n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            log_values = np.array(list(pool.map(one, children)))
    else:
        log_values = np.array([one(c) for c in children])
    ref = log_values.max()
    scaled = np.exp(log_values - ref)
    mean = scaled.mean()
    rel_std = float(scaled.std(ddof=1) / mean)
    R = Z_99 * rel_std / math.sqrt(T)
    log_mean = ref + math.log(mean)
    lo = log_mean + math.log1p(-R) if R < 1 else -math.inf
    hi = log_mean + math.log1p(R)
    params = {"m": m, "n": model.n, "N": N, "S": S, "T": T, "seed": seed.entropy}
    est = GuessworkEstimate(log_mean, m, model.n, Method.SAMPLE, (lo, hi), params)
    return ReplicateSummary(est, log_values, rel_std, R)
