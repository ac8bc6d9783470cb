from .plotting import EmptySelectionError, PlotSpec, SchemaError, render

__all__ = ["EmptySelectionError", "PlotSpec", "SchemaError", "render"]
__version__ = "0.1.0"
