"""The trace CSV contract this package consumes.

These constants mirror the producer's published format. They are
duplicated here on purpose: the CSV file is the interface, and this
reader must reject anything that does not match it exactly rather than
silently drifting along with another library's internals.
"""

from __future__ import annotations

import io

import numpy as np

SCHEMA_VERSION = 1

TRACE_COLUMNS = (
    "t", "tau",
    "p1", "p2", "p3",
    "v1", "v2", "v3",
    "psi",
    "pd1", "pd2", "pd3",
    "vd1", "vd2", "vd3",
    "ad1", "ad2", "ad3",
    "psid", "psidotd",
    "mu1", "mu2", "mu3",
    "mupsi",
    "f", "phi_cmd", "theta_cmd",
    "sat_f", "sat_phi", "sat_theta",
    "d1", "d2", "d3",
    "dist_sq",
    "eta1", "eta2", "eta3",
)


class SchemaError(ValueError):
    """Trace file version or header does not match the contract."""


class MissingColumnError(KeyError):
    """A panel references a column outside the trace contract."""


def read_trace(path) -> dict:
    """Load a trace CSV into a {column name: 1-d array} mapping.

    Raises SchemaError unless the file starts with the exact
    schema_version comment and column header this module declares.
    """
    with open(path, "r", newline="") as fh:
        first = fh.readline().strip()
        if not first.startswith("#"):
            raise SchemaError(f"{path}: missing schema_version comment line")
        tag = first.lstrip("#").strip()
        if not tag.startswith("schema_version:"):
            raise SchemaError(f"{path}: unrecognized comment line {first!r}")
        version = int(tag.split(":", 1)[1].strip())
        if version != SCHEMA_VERSION:
            raise SchemaError(f"{path}: schema_version {version} unsupported "
                              f"(expected {SCHEMA_VERSION})")
        header = fh.readline().strip()
        if tuple(header.split(",")) != TRACE_COLUMNS:
            raise SchemaError(f"{path}: column header mismatch")
        body = fh.read()

    if body.strip():
        data = np.loadtxt(io.StringIO(body), delimiter=",", ndmin=2)
        if data.shape[1] != len(TRACE_COLUMNS):
            raise SchemaError(f"{path}: expected {len(TRACE_COLUMNS)} "
                              f"columns, found {data.shape[1]}")
    else:
        data = np.empty((0, len(TRACE_COLUMNS)))
    return {name: data[:, i] for i, name in enumerate(TRACE_COLUMNS)}
