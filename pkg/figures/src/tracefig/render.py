"""Figure assembly and file output.

render() is read-only over its input traces and deterministic: the
same trace files and options produce byte-identical image files. That
means a pinned SVG hash salt, no embedded dates, and a fixed DPI.
"""

from __future__ import annotations

import pathlib

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .panels import PANELS, STANDARD_PANELS, draw_panel, has_projection
from .schema import read_trace

PNG_DPI = 110

matplotlib.rcParams["svg.hashsalt"] = "tracefig"
matplotlib.rcParams["figure.max_open_warning"] = 0


def _savefig(fig, path: pathlib.Path) -> None:
    metadata = {"Date": None} if path.suffix == ".svg" else None
    fig.savefig(path, dpi=PNG_DPI, metadata=metadata)


def build_figure(traces, panels=None):
    """Assemble the comparison figure: one row per panel, one column per
    trace. traces is a list of (label, column map) pairs. Returns the
    matplotlib Figure; the caller owns (and should close) it.
    """
    panels = tuple(panels) if panels is not None else STANDARD_PANELS
    for kind in panels:
        if kind not in PANELS:
            raise KeyError(f"unknown panel kind {kind!r}")
    if not traces:
        raise ValueError("at least one trace is required")

    nrows, ncols = len(panels), len(traces)
    fig, axes = plt.subplots(nrows, ncols, squeeze=False,
                             figsize=(4.2 * ncols, 2.2 * nrows),
                             constrained_layout=True)
    for col, (label, trace) in enumerate(traces):
        axes[0][col].set_title(label)
        for row, kind in enumerate(panels):
            draw_panel(axes[row][col], kind, trace)
    return fig


def render(trace_paths, out_dir, panels=None, formats=("png", "svg")):
    """Render per-panel images, plus one combined comparison figure when
    more than one panel is in play. Returns the written paths, sorted.

    Trace labels come from the file names. A tau-over-time panel is
    added automatically for traces whose tau column departs from the
    clock (projection-driven runs), without disturbing the standard
    combined layout.
    """
    panels = tuple(panels) if panels is not None else STANDARD_PANELS
    out = pathlib.Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    traces = [(pathlib.Path(p).stem, read_trace(p)) for p in trace_paths]

    per_panel = list(panels)
    if "tau" not in per_panel and any(has_projection(tr)
                                      for _, tr in traces):
        per_panel.append("tau")

    written = []
    for kind in per_panel:
        fig = build_figure(traces, panels=(kind,))
        for fmt in formats:
            path = out / f"{kind}.{fmt}"
            _savefig(fig, path)
            written.append(path)
        plt.close(fig)

    if len(panels) > 1:
        fig = build_figure(traces, panels=panels)
        for fmt in formats:
            path = out / f"comparison.{fmt}"
            _savefig(fig, path)
            written.append(path)
        plt.close(fig)

    return sorted(written)
