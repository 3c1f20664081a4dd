"""Mermin-polynomial tests of GHZ-like states on simulated qubit chains."""
from ._kernels import active_backend
from .mermin import (
    AnalyticSpec,
    MerminPair,
    analytic_expectation,
    build_recursive,
    canonical_operator,
    lhv_max_bruteforce,
    lr_bound,
    normalize,
    phi_max,
)
from .pauli import PauliAxis, WeightedPauliSum
from .statevector import Circuit, GateOp, StateVector, build_ghz_circuit, expectation_exact

__version__ = "0.1.0"
