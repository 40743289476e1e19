"""Panel definitions and their drawing routines.

One PanelSpec per panel kind, each naming exactly the trace columns it
consumes. Styling is fixed project-wide: desired quantities are red and
dashed, measured ones blue and solid, and the three position components
use magenta, black, and green so the two figure columns stay visually
comparable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .schema import MissingColumnError, TRACE_COLUMNS

DESIRED_STYLE = {"color": "tab:red", "linestyle": "--", "linewidth": 1.2}
ACTUAL_STYLE = {"color": "tab:blue", "linestyle": "-", "linewidth": 1.2}
COMPONENT_COLORS = ("magenta", "black", "green")


@dataclass(frozen=True)
class PanelSpec:
    kind: str
    columns: tuple
    xlabel: str
    ylabel: str

    def __post_init__(self):
        for name in self.columns:
            if name not in TRACE_COLUMNS:
                raise MissingColumnError(
                    f"panel {self.kind!r} references unknown column {name!r}")


PANELS = {
    "path": PanelSpec("path", ("p1", "p2", "pd1", "pd2"),
                      "x (m)", "y (m)"),
    "positions": PanelSpec("positions",
                           ("t", "p1", "p2", "p3", "pd1", "pd2", "pd3"),
                           "t (s)", "position (m)"),
    "speed": PanelSpec("speed", ("t", "v1", "v2", "v3",
                                 "vd1", "vd2", "vd3"),
                       "t (s)", "speed (m/s)"),
    "roll": PanelSpec("roll", ("t", "phi_cmd"), "t (s)", "roll cmd (rad)"),
    "pitch": PanelSpec("pitch", ("t", "theta_cmd"),
                       "t (s)", "pitch cmd (rad)"),
    "thrust": PanelSpec("thrust", ("t", "f"), "t (s)", "thrust (N)"),
    "tau": PanelSpec("tau", ("t", "tau"), "t (s)", "curve parameter (s)"),
}

STANDARD_PANELS = ("path", "positions", "speed", "roll", "pitch", "thrust")


def has_projection(trace: dict) -> bool:
    """True when tau carries more than the wall clock."""
    return bool(np.any(trace["tau"] != trace["t"]))


def _stack(trace, *names):
    return np.column_stack([trace[n] for n in names])


def _draw_path(ax, trace):
    ax.plot(trace["pd1"], trace["pd2"], **DESIRED_STYLE, label="desired")
    ax.plot(trace["p1"], trace["p2"], **ACTUAL_STYLE, label="actual")
    ax.set_aspect("equal", adjustable="datalim")


def _draw_positions(ax, trace):
    for i, color in enumerate(COMPONENT_COLORS, start=1):
        ax.plot(trace["t"], trace[f"pd{i}"], color=color, linestyle="--",
                linewidth=1.0, label=f"desired p{i}")
        ax.plot(trace["t"], trace[f"p{i}"], color=color, linestyle="-",
                linewidth=1.0, label=f"p{i}")


def _draw_speed(ax, trace):
    ax.plot(trace["t"],
            np.linalg.norm(_stack(trace, "vd1", "vd2", "vd3"), axis=1),
            **DESIRED_STYLE, label="desired")
    ax.plot(trace["t"],
            np.linalg.norm(_stack(trace, "v1", "v2", "v3"), axis=1),
            **ACTUAL_STYLE, label="actual")


def _draw_roll(ax, trace):
    ax.plot(trace["t"], trace["phi_cmd"], **ACTUAL_STYLE, label="actual")


def _draw_pitch(ax, trace):
    ax.plot(trace["t"], trace["theta_cmd"], **ACTUAL_STYLE, label="actual")


def _draw_thrust(ax, trace):
    ax.plot(trace["t"], trace["f"], **ACTUAL_STYLE, label="actual")


def _draw_tau(ax, trace):
    # the clock itself is the schedule a tracking reference would follow
    ax.plot(trace["t"], trace["t"], **DESIRED_STYLE, label="clock")
    ax.plot(trace["t"], trace["tau"], **ACTUAL_STYLE, label="projected")


_DRAW = {
    "path": _draw_path,
    "positions": _draw_positions,
    "speed": _draw_speed,
    "roll": _draw_roll,
    "pitch": _draw_pitch,
    "thrust": _draw_thrust,
    "tau": _draw_tau,
}


def draw_panel(ax, kind: str, trace: dict) -> None:
    """Draw one panel kind onto an existing axis."""
    try:
        spec = PANELS[kind]
    except KeyError:
        raise KeyError(f"unknown panel kind {kind!r}; "
                       f"choose from {sorted(PANELS)}") from None
    _DRAW[kind](ax, trace)
    ax.set_xlabel(spec.xlabel)
    ax.set_ylabel(spec.ylabel)
