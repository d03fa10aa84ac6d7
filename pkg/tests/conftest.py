import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

from guesswork import english_source, load_distribution

DATA = Path(__file__).resolve().parents[1] / "data"

SKEWED10 = (0.185430, 0.159282, 0.154767, 0.149299, 0.128534,
            0.058154, 0.051858, 0.051490, 0.033738, 0.027448)


@pytest.fixture(scope="session")
def skewed10():
    return load_distribution(SKEWED10)


@pytest.fixture(scope="session")
def english():
    return english_source()


@pytest.fixture(scope="session")
def data_dir():
    return DATA


@st.composite
def distributions(draw, max_n=8, min_n=1):
    """Random strictly positive distribution, weights bounded away from 0."""
    n = draw(st.integers(min_n, max_n))
    w = draw(st.lists(st.floats(0.01, 1.0), min_size=n, max_size=n))
    w = np.asarray(w)
    return load_distribution(w / w.sum())


def random_distribution(rng, n):
    w = rng.uniform(0.01, 1.0, size=n)
    return load_distribution(w / w.sum())


def random_instances(count, seed, max_n=8, max_m=6, max_words=20_000):
    """``count`` (dist, m) pairs with n <= max_n, m <= max_m, n**m capped."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        n = int(rng.integers(2, max_n + 1))
        m = int(rng.integers(1, max_m + 1))
        if n ** m > max_words:
            m = max(1, int(math.log(max_words) / math.log(n)))
        out.append((random_distribution(rng, n), m))
    return out
