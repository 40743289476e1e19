"""Publication-style comparison figures from flight-control trace CSVs."""

from .panels import (ACTUAL_STYLE, COMPONENT_COLORS, DESIRED_STYLE, PANELS,
                     STANDARD_PANELS, PanelSpec, draw_panel, has_projection)
from .render import build_figure, render
from .schema import (MissingColumnError, SCHEMA_VERSION, SchemaError,
                     TRACE_COLUMNS, read_trace)

__all__ = [
    "ACTUAL_STYLE",
    "COMPONENT_COLORS",
    "DESIRED_STYLE",
    "MissingColumnError",
    "PANELS",
    "PanelSpec",
    "SCHEMA_VERSION",
    "STANDARD_PANELS",
    "SchemaError",
    "TRACE_COLUMNS",
    "build_figure",
    "draw_panel",
    "has_projection",
    "read_trace",
    "render",
]
