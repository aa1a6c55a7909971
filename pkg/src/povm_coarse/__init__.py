"""Coarse-graining of finite probability measures, observables and instruments."""
from .errors import PovmError, UsageError
from .linalg import DEFAULT_TOL, Tolerance
from .measures import FiniteProbMeasure, OutcomeMap, OutcomeSpace, Partition, StochasticMatrix
from .quantum import DynamicalSystem, Observable, State
from .instruments import Instrument, Operation
from .sic import BasisPair, SicReport

__version__ = "0.1.0"

__all__ = [
    "BasisPair",
    "DEFAULT_TOL",
    "DynamicalSystem",
    "FiniteProbMeasure",
    "Instrument",
    "Observable",
    "Operation",
    "OutcomeMap",
    "OutcomeSpace",
    "Partition",
    "PovmError",
    "SicReport",
    "State",
    "StochasticMatrix",
    "Tolerance",
    "UsageError",
]
