"""Figure rendering for the es2n experiment CSV outputs."""

__version__ = "0.1.0"

from .render import FIGURE_IDS, FigureSpec, SchemaError, build_figure, render

__all__ = ["FIGURE_IDS", "FigureSpec", "SchemaError", "build_figure", "render"]
