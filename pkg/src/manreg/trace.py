"""Columnar run log and its CSV serialization.

The column set and order below are a compatibility contract: downstream
consumers (plotting, comparison tooling) key on these names. Bump
SCHEMA_VERSION when either changes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
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

_COL_INDEX = {name: i for i, name in enumerate(TRACE_COLUMNS)}


class SchemaError(ValueError):
    """CSV header or version comment does not match this module."""


@dataclass
class TraceLog:
    """Run log: one row per controller step, columns per TRACE_COLUMNS."""

    data: np.ndarray

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=float)
        if self.data.ndim != 2 or self.data.shape[1] != len(TRACE_COLUMNS):
            raise ValueError(
                f"trace must be (n, {len(TRACE_COLUMNS)}), "
                f"got {self.data.shape}")

    def __len__(self) -> int:
        return self.data.shape[0]

    def col(self, name: str) -> np.ndarray:
        try:
            return self.data[:, _COL_INDEX[name]]
        except KeyError:
            raise KeyError(f"unknown trace column {name!r}") from None

    def cols(self, *names: str) -> np.ndarray:
        return self.data[:, [_COL_INDEX[n] for n in names]]

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            self._write(fh)

    def to_csv_text(self) -> str:
        buf = io.StringIO()
        self._write(buf)
        return buf.getvalue()

    def _write(self, fh) -> None:
        fh.write(f"# schema_version: {SCHEMA_VERSION}\n")
        fh.write(",".join(TRACE_COLUMNS) + "\n")
        for row in self.data:
            # repr round-trips float64 exactly
            fh.write(",".join(repr(float(x)) for x in row) + "\n")

    @classmethod
    def read_csv(cls, path) -> "TraceLog":
        with open(path, "r", newline="") as fh:
            first = fh.readline().strip()
            if not first.startswith("#"):
                raise SchemaError("missing schema_version comment line")
            tag = first.lstrip("#").strip()
            if not tag.startswith("schema_version:"):
                raise SchemaError(f"unrecognized comment line {first!r}")
            version = int(tag.split(":", 1)[1].strip())
            if version != SCHEMA_VERSION:
                raise SchemaError(
                    f"schema_version {version} unsupported "
                    f"(expected {SCHEMA_VERSION})")
            header = fh.readline().strip()
            if tuple(header.split(",")) != TRACE_COLUMNS:
                raise SchemaError("column header mismatch")
            body = fh.read()
        if body.strip():
            data = np.loadtxt(io.StringIO(body), delimiter=",", ndmin=2)
        else:
            data = np.empty((0, len(TRACE_COLUMNS)))
        return cls(data)
