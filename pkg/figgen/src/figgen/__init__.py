"""Figure generation from chaoscope run directories."""

from .core import FIGURE_KINDS, FigureError, FigureSpec, manifest_hash, render

__all__ = ["FIGURE_KINDS", "FigureError", "FigureSpec", "manifest_hash",
           "render"]

__version__ = "0.1.0"
