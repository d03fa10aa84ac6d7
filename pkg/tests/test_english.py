"""English series from the enumerating backends (no sampling noise)."""

import math

import numpy as np
import pytest

from guesswork import fit_power_law, guesswork_quantified

MS = np.arange(9, 31)


@pytest.fixture(scope="module")
def series(english):
    first = english.marginal()
    out = {}
    for order, model, backend in ((1, first, "convolve"), (2, english, "dp-chain")):
        ests = [guesswork_quantified(model, int(m), 64, backend) for m in MS]
        out[order] = np.array([e.log_value - e.log_max for e in ests])
    return out


def test_second_order_decay_rate(series):
    fit = fit_power_law(MS, series[2], (9, 30))
    assert fit.B == pytest.approx(0.554, abs=0.02)
    assert np.max(np.abs(np.exp(fit.log_ratio(MS) - series[2]) - 1)) < 0.10


def test_first_order_decay_rate(series):
    fit = fit_power_law(MS, series[1], (9, 30))
    assert fit.B == pytest.approx(0.801, abs=0.015)


def test_order_gap_at_thirty(series):
    gap = (series[1][-1] - series[2][-1]) / math.log(10)
    assert 4.5 <= gap <= 5.5


def test_second_order_below_first(series):
    assert np.all(series[2] < series[1])
