"""Static figures from kdv5 experiment outputs."""

from .figures import FIGURE_KINDS, FigureSpec, RenderResult, render
from .io import SchemaError, read_conserved, read_snapshots, read_table

__all__ = [
    "FIGURE_KINDS",
    "FigureSpec",
    "RenderResult",
    "render",
    "SchemaError",
    "read_conserved",
    "read_snapshots",
    "read_table",
]

__version__ = "0.1.0"
