"""su(1,1) source model of a Schwarzschild black hole acting as a clock.

Submodules
----------
su11
    Truncated rescaled su(1,1) generators and the source Hamiltonian.
coherent
    Pseudo-spin coherent states, disk/half-plane geometry, crossover scans.
thermal
    Two-mode bosonic realisation, thermal escaping mode, Hawking matching.
horizon
    Radial Schwarzschild dynamics, near-horizon chart, phase-space map.
paw
    Page-Wootters constraint, kernel states, clock-conditioned evolution.
cli
    ``bhclock`` command-line harness.
"""

from .errors import (
    BHClockError,
    DomainError,
    NumericalError,
    ParameterError,
    TruncationError,
    UnsupportedMeasureError,
)
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BHClockError",
    "DomainError",
    "NumericalError",
    "ParameterError",
    "TruncationError",
    "UnsupportedMeasureError",
]
