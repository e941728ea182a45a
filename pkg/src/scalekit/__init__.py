"""Scale-function toolkit for spectrally negative Levy risk models."""

from .errors import (
    ComplexRootError,
    ConvergenceError,
    DomainError,
    NumericalError,
    RepeatedRootError,
    ScaleKitError,
)
from .levy_model import (
    Erlang,
    Exponential,
    HyperExponential,
    JumpSpec,
    LevyModel,
    NoJumps,
    azcue_muler,
    brownian,
    cramer_lundberg,
    rational_factorization,
)
from .scale_core import build, build_inversion, build_rational, build_series

__version__ = "0.1.0"
