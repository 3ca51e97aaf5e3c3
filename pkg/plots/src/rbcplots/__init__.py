"""Read-only figure rendering for convection-model run artifacts."""

from .figures import KINDS, FigureSpec, plot
from .io import SchemaError

__all__ = ["FigureSpec", "KINDS", "plot", "SchemaError"]
