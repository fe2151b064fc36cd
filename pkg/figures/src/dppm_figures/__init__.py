"""Figure regeneration scripts for dppm benchmark CSV output."""

from .figures import (
    FigureSpec,
    SchemaError,
    curvature_negative_windows,
    plot_curvature,
    plot_error_curves,
    plot_ratio_bounds,
    render,
    save_figure,
)

__all__ = [
    "FigureSpec",
    "SchemaError",
    "curvature_negative_windows",
    "plot_curvature",
    "plot_error_curves",
    "plot_ratio_bounds",
    "render",
    "save_figure",
]
