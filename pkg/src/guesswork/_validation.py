"""Input checks shared by the functional API and the estimator classes."""

import math
import numbers
import os

import numpy as np

DEFAULT_ENUM_CAP = 10**8
ENUM_CAP_ENV = "GUESSWORK_ENUM_CAP"


class EnumerationCapError(ValueError):
    """Raised when full enumeration of ``n**m`` words exceeds the cap."""


def enumeration_cap(cap=None):
    """Effective enumeration cap: explicit value, then env var, then default."""
    if cap is not None:
        return int(cap)
    env = os.environ.get(ENUM_CAP_ENV)
    if env:
        return int(float(env))
    return DEFAULT_ENUM_CAP


def check_enumerable(n, m, cap=None):
    limit = enumeration_cap(cap)
    # compare in log space: n**m can be astronomically large
    if m * math.log(n) > math.log(limit) + 1e-12:
        raise EnumerationCapError(
            f"n**m = {n}**{m} words exceeds the enumeration cap {limit}; "
            "use a histogram or sampling estimator instead"
        )


def check_word_length(m, name="m"):
    if isinstance(m, bool) or not isinstance(m, numbers.Integral):
        if isinstance(m, numbers.Real) and float(m).is_integer():
            m = int(m)
        else:
            raise TypeError(f"{name} must be an integer, got {m!r}")
    if m < 1:
        raise ValueError(f"{name} must be >= 1, got {m}")
    return int(m)


def check_positive_int(value, name):
    if isinstance(value, bool):
        raise TypeError(f"{name} must be an integer")
    if isinstance(value, numbers.Real) and float(value).is_integer():
        value = int(value)
    if not isinstance(value, numbers.Integral) or value < 1:
        raise ValueError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


def check_word_lengths(m):
    """Coerce a scalar or 1-d array-like of word lengths into an int array."""
    arr = np.atleast_1d(np.asarray(m))
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim != 1:
        raise ValueError("word lengths must be a scalar or a 1-d sequence")
    return np.array([check_word_length(v) for v in arr.tolist()], dtype=np.int64)


def check_probability_vector(p, name="probabilities", atol=1e-12):
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ValueError(f"{name} must be a non-empty 1-d vector")
    if not np.all(np.isfinite(p)) or np.any(p < 0):
        raise ValueError(f"{name} must be finite and non-negative")
    if abs(p.sum() - 1.0) > atol:
        raise ValueError(f"{name} must sum to 1 (got {p.sum():.15g})")
    return p


def check_stochastic_matrix(P, atol=1e-12):
    P = np.asarray(P, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1] or P.shape[0] == 0:
        raise ValueError("transition matrix must be square and non-empty")
    if not np.all(np.isfinite(P)) or np.any(P < 0) or np.any(P > 1):
        raise ValueError("transition entries must lie in [0, 1]")
    dev = np.abs(P.sum(axis=1) - 1.0)
    if np.any(dev > atol):
        raise ValueError(f"transition rows must sum to 1 (max deviation {dev.max():.3g})")
    return P


def check_model(model):
    """Return a :class:`SymbolDistribution` or :class:`MarkovSource`.

    1-d array-likes are loaded as first-order distributions and square
    2-d array-likes as row-stochastic matrices started in their stationary
    distribution.
    """
    from .source import MarkovSource, SymbolDistribution, load_distribution

    if isinstance(model, (SymbolDistribution, MarkovSource)):
        return model
    arr = np.asarray(model, dtype=float)
    if arr.ndim == 1:
        return load_distribution(arr)
    if arr.ndim == 2:
        return MarkovSource.from_transitions(arr)
    raise TypeError(f"cannot interpret {type(model).__name__} as a language model")
