"""Exact computer algebra for generalized complex and generalized Kähler
geometry on flat models (tori and affine charts)."""

__version__ = "0.1.0"

from .errors import GKError
from .rings import Q, TrigPoly, AffinePoly
from .clifford import CliffordElement, FormField

__all__ = ["GKError", "Q", "TrigPoly", "AffinePoly", "CliffordElement", "FormField", "__version__"]
