"""Language models of order zero, one and two, plus their entropies.

A first-order model is a :class:`SymbolDistribution`, i.e. i.i.d. symbols
with probabilities sorted in decreasing order. A zero-order model is the
uniform special case. A second-order model is a :class:`MarkovSource`, a
digram chain with an initial symbol distribution.
"""

import math
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from ._validation import (
    check_probability_vector,
    check_stochastic_matrix,
    check_word_length,
)

_SUM_TOLERANCE = 1e-6
_STATIONARY_RESIDUAL = 1e-10
_POWER_MAX_ITER = 10**6
_POWER_TOL = 1e-12


class ConvergenceError(RuntimeError):
    """Raised when the stationary distribution cannot be found."""


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class SymbolDistribution:
    """Symbol probabilities sorted so that ``probs[0] >= probs[1] >= ...``.

    ``permutation[k]`` is the original (input) position of ``probs[k]``.
    """

    probs: np.ndarray
    permutation: np.ndarray = None
    labels: tuple = None

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise ValueError("a distribution needs at least one symbol")
        if np.any(p <= 0) or np.any(p > 1):
            raise ValueError("symbol probabilities must lie in (0, 1]")
        if np.any(np.diff(p) > 0):
            raise ValueError("probabilities must be sorted in decreasing order")
        if abs(p.sum() - 1.0) > 1e-12:
            raise ValueError(f"probabilities must sum to 1 (got {p.sum():.15g})")
        object.__setattr__(self, "probs", _frozen(p))
        perm = np.arange(p.size) if self.permutation is None else self.permutation
        perm = np.array(perm, dtype=np.int64)
        perm.setflags(write=False)
        object.__setattr__(self, "permutation", perm)
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def n(self):
        return self.probs.size

    @property
    def is_uniform(self):
        return bool(self.probs[0] == self.probs[-1])

    @classmethod
    def uniform(cls, n):
        n = check_word_length(n, "n")
        return cls(np.full(n, 1.0 / n))

    def log_ratios(self):
        """Per-symbol ``ln(p_1 / p_i)``, all >= 0."""
        return np.log(self.probs[0]) - np.log(self.probs)


def load_distribution(raw, normalize=False, labels=None):
    """Validate raw probabilities and sort them in decreasing order.

    A sum within 1e-6 of one is renormalised exactly. Larger deviations are
    rejected unless ``normalize`` is set.
    """
    p = np.asarray(raw, dtype=float).ravel()
    if p.size == 0:
        raise ValueError("empty probability list")
    if not np.all(np.isfinite(p)) or np.any(p <= 0):
        raise ValueError("probabilities must be finite and strictly positive")
    total = p.sum()
    if abs(total - 1.0) > _SUM_TOLERANCE and not normalize:
        raise ValueError(
            f"probabilities sum to {total:.9g}; pass normalize=True to rescale"
        )
    p = p / total
    order = np.argsort(-p, kind="stable")
    p = p[order]
    # the sorted copy can drift from 1 by an ulp; keep the invariant tight
    p = p / p.sum()
    if labels is not None:
        labels = tuple(np.asarray(labels, dtype=object)[order].tolist())
    return SymbolDistribution(p, permutation=order, labels=labels)


def read_distribution(source, normalize=False):
    """Read a distribution file: one probability per line, ``#`` comments."""
    text = _read_text(source)
    values = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            values.append(float(line))
        except ValueError:
            raise ValueError(f"line {lineno}: not a probability: {line!r}") from None
    return load_distribution(values, normalize=normalize)


def _read_text(source):
    if isinstance(source, Path) or (
        isinstance(source, str) and "\n" not in source and Path(source).is_file()
    ):
        return Path(source).read_text(encoding="utf-8")
    if hasattr(source, "read"):
        return source.read()
    return str(source)


@dataclass(frozen=True)
class DigramCountTable:
    """Square matrix of digram counts; ``counts[i, j]`` counts ``i`` then ``j``."""

    counts: np.ndarray
    labels: tuple

    def __post_init__(self):
        c = np.array(self.counts)
        if c.ndim != 2 or c.shape[0] != c.shape[1] or c.shape[0] == 0:
            raise ValueError("digram table must be square and non-empty")
        if not np.issubdtype(c.dtype, np.integer):
            if not np.all(np.isfinite(c)) or np.any(c != np.round(c)):
                raise ValueError("digram counts must be integers")
            c = c.astype(np.int64)
        if np.any(c < 0):
            raise ValueError("digram counts must be non-negative")
        dead = np.flatnonzero(c.sum(axis=1) == 0)
        if dead.size:
            raise ValueError(f"row(s) {dead.tolist()} have no outgoing transition")
        labels = tuple(self.labels) if self.labels is not None else tuple(
            str(i) for i in range(c.shape[0])
        )
        if len(labels) != c.shape[0]:
            raise ValueError("label count does not match table size")
        c.setflags(write=False)
        object.__setattr__(self, "counts", c)
        object.__setattr__(self, "labels", labels)

    @property
    def n(self):
        return self.counts.shape[0]

    def __getitem__(self, key):
        row, col = key
        if isinstance(row, str):
            row = self.labels.index(row)
        if isinstance(col, str):
            col = self.labels.index(col)
        return self.counts[row, col]


def _is_number(token):
    return re.fullmatch(r"[+-]?\d+(\.0*)?", token) is not None


def load_digram_table(source):
    """Parse a whitespace-separated count matrix.

    An optional first row of column labels and an optional first column of
    row labels are detected by their non-numeric tokens. ``source`` may be
    text, a path or a file object.
    """
    text = _read_text(source)
    rows = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            rows.append(line.split())
    if not rows:
        raise ValueError("empty digram table")
    header = None
    if not all(_is_number(t) for t in rows[0]):
        header = rows.pop(0)
    row_labels = []
    body = []
    for r in rows:
        if r and not _is_number(r[0]):
            row_labels.append(r[0])
            r = r[1:]
        if not all(_is_number(t) for t in r):
            raise ValueError(f"non-integer entry in row {r!r}")
        body.append([int(float(t)) for t in r])
    widths = {len(r) for r in body}
    if len(widths) != 1:
        raise ValueError("ragged digram table: rows have different lengths")
    if row_labels and len(row_labels) != len(body):
        raise ValueError("either all rows or none must carry a label")
    labels = header or (row_labels or None)
    if header and row_labels and tuple(header) != tuple(row_labels):
        raise ValueError("row and column labels disagree")
    return DigramCountTable(np.array(body, dtype=np.int64), labels)


def english_digrams():
    """The bundled English digram count table (26 x 26, letters A-Z)."""
    text = resources.files("guesswork").joinpath("data/english_digrams.txt").read_text(
        encoding="utf-8"
    )
    return load_digram_table(text)


@dataclass(frozen=True)
class MarkovSource:
    """Digram chain: ``transitions[i, j]`` is the probability that j follows i.

    ``initial`` is the distribution of the first symbol; ``None`` until set
    (see :meth:`with_stationary`).
    """

    transitions: np.ndarray
    initial: np.ndarray = None
    labels: tuple = None
    stationary: bool = False

    def __post_init__(self):
        P = check_stochastic_matrix(self.transitions)
        object.__setattr__(self, "transitions", _frozen(P))
        if self.initial is not None:
            p = check_probability_vector(self.initial, "initial distribution")
            if p.size != P.shape[0]:
                raise ValueError("initial distribution does not match the chain size")
            object.__setattr__(self, "initial", _frozen(p))
            if self.stationary:
                res = np.abs(P.T @ p - p).max()
                if res >= _STATIONARY_RESIDUAL:
                    raise ValueError(f"initial vector is not stationary (residual {res:.3g})")
        elif self.stationary:
            raise ValueError("a stationary source needs an initial distribution")
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def n(self):
        return self.transitions.shape[0]

    @classmethod
    def from_transitions(cls, transitions, labels=None):
        """Chain started in its stationary distribution."""
        P = check_stochastic_matrix(transitions)
        return cls(P, stationary_distribution(P), labels=labels, stationary=True)

    def with_initial(self, initial):
        return MarkovSource(self.transitions, initial, self.labels, stationary=False)

    def with_stationary(self):
        p = stationary_distribution(self.transitions)
        return MarkovSource(self.transitions, p, self.labels, stationary=True)

    def require_initial(self):
        if self.initial is None:
            raise ValueError("the source has no initial distribution; call with_stationary()")
        return self.initial

    def marginal(self):
        """Initial distribution as a first-order :class:`SymbolDistribution`.

        Zero-probability symbols are dropped since first-order models need
        strictly positive entries.
        """
        p = self.require_initial()
        keep = p > 0
        labels = None if self.labels is None else np.array(self.labels, dtype=object)[keep]
        return load_distribution(p[keep], labels=labels)

    def word_log_bounds(self, m):
        """``(log max, log min)`` word-probability bounds for length ``m``.

        Uses max/min of the initial entries times max/min of the non-zero
        transitions to the power ``m - 1``.
        """
        p = self.require_initial()
        nz = self.transitions[self.transitions > 0]
        pp = p[p > 0]
        hi = math.log(pp.max()) + (m - 1) * math.log(nz.max())
        lo = math.log(pp.min()) + (m - 1) * math.log(nz.min())
        return hi, lo


def normalize_rows(table):
    """Row-normalise digram counts into a transition matrix (no initial set)."""
    c = np.asarray(table.counts, dtype=float)
    P = c / c.sum(axis=1, keepdims=True)
    return MarkovSource(P, labels=table.labels)


def english_source():
    """English digram chain started in its stationary distribution."""
    return normalize_rows(english_digrams()).with_stationary()


def _residual(P, p):
    return float(np.abs(P.T @ p - p).max())


def stationary_distribution(transitions):
    """Solve ``(P^T - I) p = 0`` with ``sum(p) = 1``.

    A direct solve with the last equation replaced by the normalisation is
    tried first; if it is singular, produces negative entries or misses the
    residual bound, power iteration takes over.
    """
    P = check_stochastic_matrix(transitions)
    n = P.shape[0]
    A = P.T - np.eye(n)
    A[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    try:
        p = np.linalg.solve(A, b)
    except np.linalg.LinAlgError:
        p = None
    if p is not None and np.all(np.isfinite(p)) and p.min() > -1e-14:
        p = np.clip(p, 0.0, None)
        p /= p.sum()
        if _residual(P, p) < _STATIONARY_RESIDUAL:
            return p
    return _power_iteration(P)


def _power_iteration(P):
    n = P.shape[0]
    p = np.full(n, 1.0 / n)
    PT = P.T
    for _ in range(_POWER_MAX_ITER):
        q = PT @ p
        q /= q.sum()
        if np.abs(q - p).max() < _POWER_TOL:
            if _residual(P, q) < _STATIONARY_RESIDUAL:
                return q
            break
        p = q
    raise ConvergenceError(
        "power iteration did not converge; the chain may be periodic or reducible"
    )


_BASES = {"e": math.e, "2": 2.0, "10": 10.0}


def parse_base(base):
    """Accept ``'e'``, ``'2'``, ``'10'`` or any real > 1."""
    if isinstance(base, str):
        base = _BASES.get(base.strip().lower(), None) or float(base)
    base = float(base)
    if not base > 1:
        raise ValueError(f"logarithm base must exceed 1, got {base}")
    return base


@dataclass(frozen=True)
class EntropyValue:
    """Entropy of a word of length ``m`` in base-``base`` digits."""

    value: float
    base: float
    order: int
    m: int
    n: int = field(default=None, compare=False)

    @property
    def nats(self):
        return self.value * math.log(self.base)

    def to_base(self, base):
        base = parse_base(base)
        return EntropyValue(self.nats / math.log(base), base, self.order, self.m, self.n)


def _plogp(P):
    # sum_j P_ij ln(1/P_ij) with 0 ln(1/0) = 0
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(P > 0, -P * np.log(P), 0.0)
    return terms.sum(axis=-1)


def entropy(model, order, m, base=math.e):
    """Word entropy for the zero-, first- or second-order approximation.

    Order 1 on a :class:`MarkovSource` uses its initial distribution. Order 2
    follows the chain rule, propagating the symbol marginals through the
    chain one position at a time.
    """
    m = check_word_length(m)
    base = parse_base(base)
    if order not in (0, 1, 2):
        raise ValueError(f"order must be 0, 1 or 2, got {order!r}")
    if order == 0:
        nats = m * math.log(model.n)
    elif order == 1:
        p = model.initial if isinstance(model, MarkovSource) else model.probs
        if p is None:
            raise ValueError("the source has no initial distribution")
        nats = m * float(_plogp(np.asarray(p)))
    else:
        if not isinstance(model, MarkovSource):
            raise TypeError("second-order entropy needs a MarkovSource")
        P = model.transitions
        q = model.require_initial()
        row_h = _plogp(P)
        nats = float(_plogp(q))
        for _ in range(m - 1):
            nats += float(q @ row_h)
            q = P.T @ q
    return EntropyValue(nats / math.log(base), base, order, m, model.n)
