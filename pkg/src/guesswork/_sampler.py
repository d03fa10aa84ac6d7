"""Uniform word sampling under the counting measure.

Words are drawn as concatenated blocks of ``k`` symbols. A block index in
``[0, n**k)`` is uniform exactly when its ``k`` symbols are, so looking up
precomputed per-block log costs gives the same distribution as drawing
symbol by symbol with ``k`` times fewer random numbers.
"""

import math

import numpy as np

from .source import MarkovSource

# upper bound on the size of one block lookup table
_TABLE_LIMIT = 1 << 17
# random block indices drawn per chunk
_CHUNK_DRAWS = 1 << 21


def block_size(n, m, limit=_TABLE_LIMIT):
    if n == 1:
        return m
    k = max(1, int(math.floor(math.log(limit) / math.log(n) + 1e-12)))
    return min(k, m)


class WordSampler:
    """Draws ``x = ln(top) - ln(p(word))`` for uniformly random words.

    ``top`` is the word-probability upper bound used as histogram origin:
    ``p_1**m`` in first order, ``max(p) * max(P)**(m-1)`` in second order.
    Zero-probability words yield ``inf``.
    """

    def __init__(self, model, m, k=None):
        self.model = model
        self.m = m
        self.n = n = model.n
        self.k = block_size(n, m) if k is None else min(k, m)
        q, r = divmod(m, self.k)
        self.sizes = [self.k] * q + ([r] if r else [])
        self.order = 2 if isinstance(model, MarkovSource) else 1
        if self.order == 1:
            cost = model.log_ratios()
            self._tables = {b: self._sum_table(cost, b) for b in set(self.sizes)}
        else:
            with np.errstate(divide="ignore"):
                self._cost_init = -np.log(model.require_initial())
                self._cost_P = -np.log(model.transitions)
            self._cost_flat = self._cost_P.ravel()
            self._tables = {b: self._chain_table(b) for b in set(self.sizes)}
            log_hi, _ = model.word_log_bounds(m)
            self._top = log_hi

    def _sum_table(self, cost, b):
        t = np.zeros(1)
        for _ in range(b):
            t = (t[:, None] + cost[None, :]).ravel()
        return t

    def _chain_table(self, b):
        n = self.n
        t = np.zeros(n)
        for _ in range(b - 1):
            last = np.arange(t.size) % n
            t = (t[:, None] + self._cost_P[last, :]).ravel()
        return t

    def chunks(self, count, rng):
        """Yield arrays of ``x`` values totalling ``count`` words."""
        per_word = len(self.sizes)
        chunk = max(1, _CHUNK_DRAWS // per_word)
        done = 0
        while done < count:
            w = min(chunk, count - done)
            yield self._draw(w, rng)
            done += w

    def _draw(self, w, rng):
        n = self.n
        if self.order == 1:
            x = np.zeros(w)
            for b in sorted(set(self.sizes), reverse=True):
                cols = self.sizes.count(b)
                idx = rng.integers(0, n**b, size=(w, cols))
                x += self._tables[b][idx].sum(axis=1)
            return x
        x = None
        prev_last = None
        for b in self.sizes:
            idx = rng.integers(0, n**b, size=w)
            first = idx // n ** (b - 1)
            c = self._tables[b][idx]
            if prev_last is None:
                c = c + self._cost_init[first]
            else:
                c = c + self._cost_flat[prev_last * n + first]
            x = c if x is None else x + c
            prev_last = idx % n
        # cost = -ln p(word); shift so the top bound sits at zero
        return x + self._top
