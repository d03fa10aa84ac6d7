import enum
import math
from dataclasses import dataclass, field


class Method(str, enum.Enum):
    """Estimation methods, in the order sweep rows are emitted."""

    EXACT = "exact"
    QUANTIFY = "quantify"
    SAMPLE = "sample"
    NORMAL_BINNED = "normal-binned"
    NORMAL_INTEGRAL = "normal-integral"
    NORMAL_ERF = "normal-erf"
    LEADING_TERM = "leading-term"
    MASSEY = "massey"
    ARIKAN = "arikan"
    ENTROPY_ANSATZ = "entropy-ansatz"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class GuessworkEstimate:
    """A guesswork value carried as its natural logarithm.

    ``interval`` is an optional ``(lo, hi)`` pair of natural-log bounds.
    """

    log_value: float
    m: int
    n: int
    method: Method
    interval: tuple = None
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "log_value", float(self.log_value))
        object.__setattr__(self, "method", Method(self.method))
        if self.interval is not None:
            lo, hi = (float(v) for v in self.interval)
            tol = 1e-12 * max(1.0, abs(self.log_value))
            if not (lo <= self.log_value + tol and self.log_value <= hi + tol):
                raise ValueError(
                    f"interval ({lo}, {hi}) does not contain log value {self.log_value}"
                )
            object.__setattr__(self, "interval", (lo, hi))

    @property
    def log_max(self):
        """``ln(n**m)``, the log of the number of words."""
        return self.m * math.log(self.n)

    @property
    def ratio(self):
        """``G / n**m``, the quantity plotted against word length."""
        return math.exp(self.log_value - self.log_max)

    @property
    def log10_value(self):
        return self.log_value / math.log(10.0)

    @property
    def value(self):
        """``G`` itself, or ``inf`` when it is not representable."""
        try:
            return math.exp(self.log_value)
        except OverflowError:
            return math.inf

    def log10_interval(self):
        if self.interval is None:
            return None
        return tuple(v / math.log(10.0) for v in self.interval)
