"""scikit-learn style wrappers around the functional API.

Every guesswork estimator is fitted on a language model and predicts
``ln G`` for an array of word lengths::

    est = QuantifiedGuesswork(n_bins=64, backend="convolve").fit(probs)
    est.predict([5, 10, 20])        # ln G
    est.predict_ratio([5, 10, 20])  # G / n**m

``fit`` accepts a :class:`~guesswork.SymbolDistribution`, a
:class:`~guesswork.MarkovSource`, a 1-d probability vector or a square
row-stochastic matrix. Parameters follow the usual ``get_params`` /
``set_params`` / ``clone`` protocol.
"""

import math

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_model, check_word_lengths
from .exact import guesswork_exact, guesswork_uniform
from .histogram import guesswork_quantified, replicate_estimate
from .normal import (
    count_moments_analytic,
    count_moments_sampled,
    guesswork_leading_term,
    guesswork_normal_binned,
    guesswork_normal_closed,
    guesswork_normal_integral,
)
from .powerlaw import fit_power_law
from .source import MarkovSource


class _GuessworkEstimator(BaseEstimator):

    def fit(self, X, y=None):
        self.model_ = check_model(X)
        self.n_symbols_ = self.model_.n
        self.order_ = 2 if isinstance(self.model_, MarkovSource) else 1
        self._fit_model()
        return self

    def _fit_model(self):
        pass

    def estimate(self, m):
        """List of :class:`~guesswork.GuessworkEstimate`, one per word length."""
        check_is_fitted(self, "model_")
        return [self._estimate_one(int(v)) for v in check_word_lengths(m)]

    def predict(self, m):
        """Natural log of the guesswork for each word length."""
        return np.array([e.log_value for e in self.estimate(m)])

    def predict_ratio(self, m):
        """``G / n**m`` for each word length."""
        m = check_word_lengths(m)
        return np.exp(self.predict(m) - m * math.log(self.n_symbols_))


class ExactGuesswork(_GuessworkEstimator):
    """Full enumeration; ``enum_cap`` overrides the default cap."""

    def __init__(self, enum_cap=None):
        self.enum_cap = enum_cap

    def _estimate_one(self, m):
        if self.order_ == 1 and self.model_.is_uniform:
            return guesswork_uniform(self.n_symbols_, m)
        return guesswork_exact(self.model_, m, self.enum_cap)


class QuantifiedGuesswork(_GuessworkEstimator):
    """Histogram estimate from enumerated bin counts."""

    def __init__(self, n_bins=64, backend="auto", enum_cap=None):
        self.n_bins = n_bins
        self.backend = backend
        self.enum_cap = enum_cap

    def _estimate_one(self, m):
        backend = self.backend
        if backend == "auto":
            backend = "convolve" if self.order_ == 1 else "dp-chain"
        return guesswork_quantified(self.model_, m, self.n_bins, backend, self.enum_cap)


class SampledGuesswork(_GuessworkEstimator):
    """Random-selection estimate averaged over ``replicates`` substreams.

    Each prediction is seeded from ``(random_state, m)``, so the value for
    a given word length does not depend on which other lengths are asked.
    """

    def __init__(self, n_bins=64, samples=100_000, replicates=20, random_state=1, n_jobs=None):
        self.n_bins = n_bins
        self.samples = samples
        self.replicates = replicates
        self.random_state = random_state
        self.n_jobs = n_jobs

    def _estimate_one(self, m):
        seed = np.random.SeedSequence([int(self.random_state or 0), m, self.order_])
        summary = replicate_estimate(self.model_, m, self.n_bins, self.samples,
                                     self.replicates, seed=seed, n_jobs=self.n_jobs)
        return summary.estimate


_NORMAL_METHODS = {
    "binned": None,
    "integral": guesswork_normal_integral,
    "erf": guesswork_normal_closed,
    "leading": guesswork_leading_term,
}


class NormalGuesswork(_GuessworkEstimator):
    """Normal approximation of the log-probability density.

    ``moments="analytic"`` takes exact first-order moments; ``"sampled"``
    estimates them from ``samples`` random words of length ``m_probe``.
    """

    def __init__(self, method="erf", n_bins=10, moments="analytic", samples=10_000,
                 m_probe=20, random_state=1):
        self.method = method
        self.n_bins = n_bins
        self.moments = moments
        self.samples = samples
        self.m_probe = m_probe
        self.random_state = random_state

    def _fit_model(self):
        if self.method not in _NORMAL_METHODS:
            raise ValueError(f"method must be one of {sorted(_NORMAL_METHODS)}")
        if self.moments == "analytic" and self.order_ == 1:
            self.normal_model_ = count_moments_analytic(self.model_)
        elif self.moments in ("analytic", "sampled"):
            self.normal_model_ = count_moments_sampled(self.model_, self.samples,
                                                       self.m_probe, self.random_state)
        else:
            raise ValueError("moments must be 'analytic' or 'sampled'")
        self.mu1_ = self.normal_model_.mu1
        self.sigma1_ = self.normal_model_.sigma1

    def _estimate_one(self, m):
        if self.method == "binned":
            return guesswork_normal_binned(self.normal_model_, m, self.n_bins)
        return _NORMAL_METHODS[self.method](self.normal_model_, m)


class PowerLawRegressor(RegressorMixin, BaseEstimator):
    """Least-squares fit of ``ln(G/n**m) = ln A + m ln B - ln(m)/2``.

    ``X`` holds word lengths (shape ``(k,)`` or ``(k, 1)``), ``y`` the log
    ratios ``ln(G/n**m)``.
    """

    def __init__(self, m_range=None):
        self.m_range = m_range

    def fit(self, X, y):
        m = np.asarray(X, dtype=float).reshape(-1)
        self.fit_ = fit_power_law(m, y, self.m_range)
        self.A_ = self.fit_.A
        self.B_ = self.fit_.B
        self.residual_ = self.fit_.residual
        return self

    def predict(self, X):
        check_is_fitted(self, "fit_")
        return self.fit_.log_ratio(np.asarray(X, dtype=float).reshape(-1))
