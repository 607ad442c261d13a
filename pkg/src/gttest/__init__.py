"""Self-normalised sums, Student's statistic, and a generalised T-test.

The package computes exact laws of Student's statistic under two-point
samples, Poisson-based approximations with explicit total-variation bounds,
and a test procedure that picks whichever approximating law has the smallest
accuracy bound.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConfigurationError,
    DegenerateSampleError,
    DomainError,
    GttestError,
    InputFormatError,
    NumericalError,
    RangeError,
    UndefinedStatisticError,
)
from .procedure import Hypotheses, TestConfig, TestDecision, generalized_t_test  # noqa: E402
from .statistic import Sample  # noqa: E402
from .two_point import TwoPointLaw  # noqa: E402

__all__ = [
    "ConfigurationError",
    "DegenerateSampleError",
    "DomainError",
    "GttestError",
    "Hypotheses",
    "InputFormatError",
    "NumericalError",
    "RangeError",
    "Sample",
    "TestConfig",
    "TestDecision",
    "TwoPointLaw",
    "UndefinedStatisticError",
    "generalized_t_test",
]
