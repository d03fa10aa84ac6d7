"""Guesswork of words drawn from first- and second-order language models."""

from ._validation import EnumerationCapError
from .bounds import arikan_lower, entropy_ansatz, massey_lower
from .estimate import GuessworkEstimate, Method
from .estimators import (
    ExactGuesswork,
    NormalGuesswork,
    PowerLawRegressor,
    QuantifiedGuesswork,
    SampledGuesswork,
)
from .exact import guesswork_exact, guesswork_exact_first, guesswork_exact_second, guesswork_uniform
from .histogram import (
    LogProductHistogram,
    ReplicateSummary,
    guesswork_from_histogram,
    guesswork_quantified,
    histogram_enumerate,
    histogram_sample,
    log_guesswork_from_histogram,
    log_quantization_interval,
    quantization_interval,
    replicate_estimate,
)
from .normal import (
    NormalLogModel,
    count_moments_analytic,
    count_moments_sampled,
    guesswork_leading_term,
    guesswork_normal_binned,
    guesswork_normal_closed,
    guesswork_normal_integral,
    leading_term_constants,
    normal_histogram,
)
from .powerlaw import PowerLawFit, fit_power_law
from .source import (
    ConvergenceError,
    DigramCountTable,
    EntropyValue,
    MarkovSource,
    SymbolDistribution,
    english_digrams,
    english_source,
    entropy,
    load_digram_table,
    load_distribution,
    normalize_rows,
    parse_base,
    read_distribution,
    stationary_distribution,
)
from .special import erf, erfc, erfcx, log_erfc, log_ndtr, ndtr

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
