import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from guesswork.special import erf, erfc, erfcx, log_erfc, log_ndtr, log_normal_mass, ndtr

mpmath.mp.dps = 40

GRID = np.concatenate([np.linspace(-6, 6, 1201), [-1e-8, 1e-8, 5.999, 6.0, 6.0001]])


def test_erf_zero():
    assert erf(0.0) == 0.0


def test_erf_one():
    assert abs(float(erf(1.0)) - 0.8427007929497149) < 1e-12


def test_erf_grid_absolute_error():
    ours = erf(GRID)
    ref = np.array([float(mpmath.erf(x)) for x in GRID])
    assert np.abs(ours - ref).max() < 1e-12


def test_erf_saturates():
    assert erf(6.5) == 1.0 and erf(-40.0) == -1.0


@settings(max_examples=200)
@given(st.floats(-50, 50))
def test_erf_odd(x):
    assert erf(-x) == -erf(x)


@pytest.mark.parametrize("x", [-3.0, -0.5, 0.0, 0.3, 1.9, 2.1, 5.0, 12.0, 27.0])
def test_erfc_relative(x):
    assert float(erfc(x)) == pytest.approx(float(mpmath.erfc(x)), rel=1e-11)


@pytest.mark.parametrize("x", [0.0, 0.5, 2.0, 10.0, 100.0, 1e4])
def test_erfcx(x):
    ref = float(mpmath.exp(mpmath.mpf(x) ** 2) * mpmath.erfc(x))
    assert float(erfcx(x)) == pytest.approx(ref, rel=1e-11)


@pytest.mark.parametrize("x", [-2.0, 1.0, 30.0, 300.0, 1000.0])
def test_log_erfc_far_tail(x):
    assert float(log_erfc(x)) == pytest.approx(float(mpmath.log(mpmath.erfc(x))), rel=1e-11)


def test_ndtr_and_log():
    assert float(ndtr(0.0)) == 0.5
    assert float(log_ndtr(-40.0)) == pytest.approx(float(mpmath.log(mpmath.ncdf(-40))), rel=1e-11)


@pytest.mark.parametrize("lo,hi", [(0.0, 1.0), (-1.0, 1.0), (8.0, 9.0), (-30.0, -29.0)])
def test_normal_mass(lo, hi):
    ref = mpmath.ncdf(hi) - mpmath.ncdf(lo)
    assert float(log_normal_mass(lo, hi, 0.0, 1.0)) == pytest.approx(float(mpmath.log(ref)),
                                                                      rel=1e-10)


def test_normal_mass_shifted_scaled():
    ref = mpmath.ncdf((3.0 - 2.0) / 0.5) - mpmath.ncdf((2.5 - 2.0) / 0.5)
    assert float(np.exp(log_normal_mass(2.5, 3.0, 2.0, 0.5))) == pytest.approx(float(ref),
                                                                                rel=1e-12)
