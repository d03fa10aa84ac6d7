"""Fit ``G / n**m = A * B**m * m**(-1/2)`` to a guesswork series."""

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PowerLawFit:
    A: float
    B: float
    m_range: tuple
    residual: float
    n_points: int = None

    def log_ratio(self, m):
        """Fitted ``ln(G / n**m)`` at word length(s) ``m``."""
        m = np.asarray(m, dtype=float)
        return math.log(self.A) + m * math.log(self.B) - 0.5 * np.log(m)

    def expression(self, digits=3):
        return f"{self.A:.{digits}f}*{self.B:.{digits}f}^m*m^(-1/2)"


def fit_power_law(m, log_ratio, m_range=None):
    """Least squares on ``ln(G/n**m) + ln(m)/2 = ln A + m ln B``.

    ``log_ratio`` holds ``ln(G / n**m)``. Points with ``m`` outside the
    inclusive ``m_range`` are ignored; ``residual`` is the RMS log error and
    the fit's ``m_range`` is the span of the points actually used.
    """
    m = np.asarray(m, dtype=float).ravel()
    y = np.asarray(log_ratio, dtype=float).ravel()
    if m.shape != y.shape:
        raise ValueError("m and log_ratio must have the same length")
    if m_range is not None:
        lo, hi = m_range
        keep = (m >= lo) & (m <= hi)
        m, y = m[keep], y[keep]
    keep = np.isfinite(y)
    m, y = m[keep], y[keep]
    if m.size < 3:
        raise ValueError(f"need at least 3 points in range, got {m.size}")
    if np.ptp(m) == 0:
        raise ValueError("singular design: all word lengths are equal")
    X = np.column_stack([np.ones_like(m), m])
    target = y + 0.5 * np.log(m)
    (log_a, log_b), *_ = np.linalg.lstsq(X, target, rcond=None)
    resid = target - X @ np.array([log_a, log_b])
    return PowerLawFit(math.exp(log_a), math.exp(log_b), (int(m.min()), int(m.max())),
                       float(np.sqrt(np.mean(resid ** 2))), int(m.size))
