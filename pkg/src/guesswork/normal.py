"""Normal (central-limit) approximations of guesswork.

Under the counting measure, i.e. every word equally likely, the shifted
log-probability ``x = ln(top) - ln p(word)`` of a first-order word is a sum
of ``m`` i.i.d. per-symbol terms. It is therefore close to
``Normal(mu1 * m, sigma1**2 * m)``. Substituting that density into the
quantified estimator gives four approximations of decreasing cost:

* ``guesswork_normal_binned``: bin counts from the normal CDF, then the
  usual histogram sum;
* ``guesswork_normal_integral``: the continuous double integral;
* ``guesswork_normal_closed``: an erf closed form, valid for large ``m``;
* ``guesswork_leading_term``: ``n**m * A * B**m / sqrt(m)``.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import logsumexp

from ._sampler import WordSampler
from ._validation import check_model, check_positive_int, check_word_length
from .estimate import GuessworkEstimate, Method
from .histogram import LogProductHistogram, guesswork_from_histogram
from .source import MarkovSource
from .special import erfcx, log_normal_mass

# upper tail of the outer normal beyond this many standard deviations is < 1e-12
_TAIL_Z = 7.1
_QUAD_RTOL = 1e-10


@dataclass(frozen=True)
class NormalLogModel:
    """Per-symbol counting-measure moments of ``x = ln(p_1 / p_symbol)``.

    ``log_range`` is the per-symbol span ``ln(p_1 / p_n)``. For chains,
    ``p1`` and ``log_range`` describe the transitions and ``log_head`` /
    ``range_head`` correct for the first symbol, so that the word top is
    ``m ln p1 + log_head`` and the word span ``m * log_range + range_head``.
    """

    mu1: float
    sigma1: float
    n: int
    p1: float
    log_range: float
    source: str = "analytic"
    log_head: float = 0.0
    range_head: float = 0.0
    samples: int = None
    zero_fraction: float = None
    order: int = 1

    def __post_init__(self):
        if self.mu1 < -1e-12 or self.sigma1 < 0:
            raise ValueError("moments of x = ln(p1/p) must be non-negative")

    def log_top(self, m):
        return m * math.log(self.p1) + self.log_head

    def word_range(self, m):
        return m * self.log_range + self.range_head

    def log_prefactor(self, m):
        """``ln[n**m * (n p1 exp(-(2 mu1 - sigma1**2)/2))**m]`` incl. chain head."""
        return (2 * m * math.log(self.n) + self.log_top(m)
                - m * self.mu1 + 0.5 * m * self.sigma1 ** 2)


def count_moments_analytic(dist):
    """Exact per-symbol mean and standard deviation of ``ln(p_1 / p_i)``.

    Moments are over symbols counted uniformly (not weighted by ``p_i``).
    """
    dist = check_model(dist)
    if isinstance(dist, MarkovSource):
        raise TypeError("analytic moments need a first-order distribution")
    x = dist.log_ratios()
    mu = float(x.mean())
    var = max(float(np.mean(x * x)) - mu * mu, 0.0)
    return NormalLogModel(mu, math.sqrt(var), dist.n, float(dist.probs[0]), float(x[-1]))


def count_moments_sampled(model, samples, m_probe, seed=None):
    """Estimate the moments from ``samples`` uniformly random words.

    ``mu1`` is the sample mean of ``x / m_probe`` and ``sigma1`` the sample
    standard deviation of ``x / sqrt(m_probe)``. For chains, ``x`` is
    measured from the word-probability upper bound and zero-probability
    words are discarded; their share is kept in ``zero_fraction``.
    """
    model = check_model(model)
    samples = check_positive_int(samples, "samples")
    if samples < 100:
        raise ValueError("at least 100 samples are needed")
    m = check_word_length(m_probe, "m_probe")
    rng = np.random.default_rng(seed)
    xs = np.concatenate(list(WordSampler(model, m).chunks(samples, rng)))
    ok = np.isfinite(xs)
    if not ok.any():
        raise ValueError("every sampled word has probability zero")
    x = xs[ok]
    mu = float(x.mean()) / m
    sigma = float(x.std(ddof=1)) / math.sqrt(m) if x.size > 1 else 0.0
    zero_fraction = 1.0 - x.size / xs.size
    if isinstance(model, MarkovSource):
        p = model.require_initial()
        pp = p[p > 0]
        nz = model.transitions[model.transitions > 0]
        log_range = math.log(nz.max() / nz.min())
        return NormalLogModel(
            mu, sigma, model.n, float(nz.max()), log_range, "sampled",
            log_head=math.log(pp.max()) - math.log(nz.max()),
            range_head=math.log(pp.max() / pp.min()) - log_range,
            samples=samples, zero_fraction=zero_fraction, order=2,
        )
    probs = model.probs
    return NormalLogModel(mu, sigma, model.n, float(probs[0]),
                          float(math.log(probs[0] / probs[-1])), "sampled",
                          samples=samples, zero_fraction=zero_fraction)


def _estimate(log_g, nm, m, method, **params):
    params.update(m=m, n=nm.n)
    return GuessworkEstimate(log_g, m, nm.n, method, params=params)


def normal_histogram(nm, m, N):
    """Bin counts ``n**m * P(Normal(mu1 m, sigma1**2 m) in bin)`` on ``[0, m N delta]``.

    Mass falling outside the word range is recorded as the histogram's
    ``log_zero_mass``.
    """
    m = check_word_length(m)
    N = check_positive_int(N, "N")
    log_total = m * math.log(nm.n)
    offset = -nm.log_top(m)
    span = nm.word_range(m)
    mean = nm.mu1 * m
    std = nm.sigma1 * math.sqrt(m)
    if span <= 0:
        return LogProductHistogram(0.0, offset, [log_total], log_total, m, nm.n, nm.order, N,
                                   "normal")
    nbins = m * N
    delta = span / nbins
    if std == 0:
        lc = np.full(nbins, -math.inf)
        lc[min(int(mean // delta), nbins - 1)] = log_total
        return LogProductHistogram(delta, offset, lc, log_total, m, nm.n, nm.order, N,
                                   "normal")
    edges = delta * np.arange(nbins + 1)
    log_mass = log_normal_mass(edges[:-1], edges[1:], mean, std)
    inside = logsumexp(log_mass)
    log_out = log_total + math.log(-math.expm1(inside)) if inside < 0 else -math.inf
    return LogProductHistogram(delta, offset, log_total + log_mass, log_total, m, nm.n,
                               nm.order, N, "normal", log_out)


def guesswork_normal_binned(nm, m, N=10):
    """Quantified estimate with normal-model bin counts."""
    est = guesswork_from_histogram(normal_histogram(nm, m, N))
    return _estimate(est.log_value, nm, int(m), Method.NORMAL_BINNED, N=N)


def _require_spread(nm):
    if not nm.sigma1 > 0:
        raise ValueError("the normal approximation needs sigma1 > 0")


def guesswork_normal_integral(nm, m):
    """Double-integral form, evaluated by adaptive quadrature.

    In unscaled coordinates the outer density is ``Normal((mu1 - sigma1**2) m,
    sigma1**2 m)`` and the inner integral is the normal CDF mass of
    ``Normal(mu1 m, sigma1**2 m)`` on ``[0, x]``. The upper limit is the
    word range, pushed out further if the outer tail beyond it exceeds 1e-12.
    """
    _require_spread(nm)
    m = check_word_length(m)
    s = nm.sigma1 * math.sqrt(m)
    outer = (nm.mu1 - nm.sigma1 ** 2) * m
    inner = nm.mu1 * m
    upper = max(nm.word_range(m), outer + _TAIL_Z * s)

    def log_f(x):
        z = (np.asarray(x) - outer) / s
        return -0.5 * z * z - math.log(s * math.sqrt(2 * math.pi)) + log_normal_mass(
            0.0, x, inner, s)

    grid = np.linspace(0.0, upper, 4001)[1:]
    values = log_f(grid)
    peak = int(np.argmax(values))
    top = float(values[peak])
    val, _ = integrate.quad(lambda x: math.exp(float(log_f(x)) - top), 0.0, upper,
                            points=[float(grid[peak])], epsabs=0.0, epsrel=_QUAD_RTOL,
                            limit=500)
    log_g = nm.log_prefactor(m) + top + math.log(val)
    return _estimate(log_g, nm, m, Method.NORMAL_INTEGRAL, upper=upper)


def _log_erf_bracket(nm, m):
    # ln[2 erf(a) - 1 - erf(b)^2] written with erfcx to survive erf(.) ~ 1
    a = nm.mu1 * math.sqrt(m) / (nm.sigma1 * math.sqrt(2.0))
    b = nm.sigma1 * math.sqrt(m) / 2.0
    xa, xb = float(erfcx(a)), float(erfcx(b))
    rest = 2.0 * xb - math.exp(-b * b) * xb * xb - 2.0 * math.exp(min(b * b - a * a, 700.0)) * xa
    if not rest > 0:
        raise ValueError(f"erf closed form is non-positive at m={m}; m is too small")
    return -b * b + math.log(rest)


def guesswork_normal_closed(nm, m):
    """erf closed form ``prefactor * [2 erf(a) - 1 - erf(b)**2] / 4`` for large ``m``.

    ``a = mu1 sqrt(m) / (sigma1 sqrt 2)``, ``b = sigma1 sqrt(m) / 2``.
    """
    _require_spread(nm)
    m = check_word_length(m)
    log_g = nm.log_prefactor(m) + math.log(0.25) + _log_erf_bracket(nm, m)
    return _estimate(log_g, nm, m, Method.NORMAL_ERF)


def leading_term_constants(nm):
    """``(A, B)`` of the asymptotic form ``G / n**m ~ A * B**m / sqrt(m)``.

    Raises ``ValueError`` unless ``mu1 / (sigma1 sqrt 2) > sigma1 / 2``.
    """
    if not nm.sigma1 > 0 or not nm.mu1 / (nm.sigma1 * math.sqrt(2.0)) > nm.sigma1 / 2.0:
        raise ValueError("leading-term regime needs mu1/(sigma1 sqrt 2) > sigma1/2")
    A = math.exp(nm.log_head) / (nm.sigma1 * math.sqrt(math.pi))
    B = nm.n * nm.p1 * math.exp(-(nm.mu1 - nm.sigma1 ** 2 / 4.0))
    return A, B


def guesswork_leading_term(nm, m):
    m = check_word_length(m)
    A, B = leading_term_constants(nm)
    log_g = m * math.log(nm.n) + math.log(A) + m * math.log(B) - 0.5 * math.log(m)
    return _estimate(log_g, nm, m, Method.LEADING_TERM, A=A, B=B)
