"""Numerical toolkit for the Shimizu-Morioka system and its relatives.

Covers trajectory integration with event location, Lyapunov spectra and
covariant Lyapunov vectors, tangent-subspace angle diagnostics for
pseudohyperbolicity, kneading-symbol cartography with homoclinic
bisection, Poincare-section reductions to 1D maps, the interval model
map mu - A*|X|^nu, and checkpointed parameter-plane scans.
"""

__version__ = "0.1.0"

from . import chartscan
from . import dynsys
from . import integrate
from . import kneading
from . import lyap
from . import modelmap
from . import poincare
from . import pseudohyp

__all__ = [
    "chartscan",
    "dynsys",
    "integrate",
    "kneading",
    "lyap",
    "modelmap",
    "poincare",
    "pseudohyp",
    "__version__",
]
