"""Certified bounds for a family of Fourier-extremal constants.

Two dual test families bracket each constant: a lower family evaluated
exactly through closed-form antiderivatives, and an upper family whose
sup-norm is certified by Lipschitz grids with analytic tail majorants.
Closed-form generic bounds, derivative-free searches, and desk-scale
number-theoretic consistency scans round out the toolkit; the ``fel`` CLI
ties it together.
"""

from .precision import ErrBounded, PrecisionContext, Unconverged
from .lower import LowerParams
from .upper import BoundResult, UpperParams

__version__ = "0.1.0"

__all__ = [
    "ErrBounded",
    "PrecisionContext",
    "Unconverged",
    "LowerParams",
    "UpperParams",
    "BoundResult",
    "__version__",
]
