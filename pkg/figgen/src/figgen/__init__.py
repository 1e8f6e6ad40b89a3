"""Publication-style figures from the simulator's CSV outputs."""

__version__ = "0.1.0"

from .render import (FigureSpec, FileError, SchemaMismatch, default_style,
                     read_table, render)

__all__ = ["FigureSpec", "FileError", "SchemaMismatch", "default_style",
           "read_table", "render", "__version__"]
