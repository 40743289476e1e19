"""Maneuver regulation: project the state onto the curve, reuse the gains.

project() finds the curve parameter minimizing the metric-weighted
distance between the current 7-state and the reference curve: a coarse
pass over the sampled table (full curve on the first call, a window
around the previous solution afterwards) followed by golden-section
refinement and a parabolic polish. regulation_control() feeds the
projected reference point to the unchanged tracking law.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
import warnings

import numpy as np

from .dynamics import ControlInput, ReducedState, VehicleParams
from .maneuvers import Maneuver, ReferencePoint
from .tracking import (Gains, IntegratorState, VirtualInput,
                       feedback_linearize, tracking_virtual_input)


class AmbiguousProjectionWarning(UserWarning):
    """Two near-equal local minima in the search window: state outside the
    tube where the projection is unique."""


class EmptyWindowError(ValueError):
    """Search window no longer intersects an open maneuver's domain."""


@dataclass(frozen=True)
class ProjectionConfig:
    """Metric and search settings for the state-to-curve projection."""

    metric_P: np.ndarray
    window_halfwidth: float = 1.0
    refine_tol: float = 1e-7
    grid_step: float = 0.01
    forward_only: bool = False

    def __post_init__(self):
        P = np.asarray(self.metric_P, dtype=float)
        if P.ndim != 2 or P.shape[0] != P.shape[1] or P.shape[0] != 7:
            raise ValueError("metric_P must be 7x7")
        scale = max(float(np.abs(P).max()), 1.0)
        if float(np.abs(P - P.T).max()) > 1e-12 * scale:
            raise ValueError("metric_P must be symmetric")
        if float(np.linalg.eigvalsh(P).min()) <= 0.0:
            raise ValueError("metric_P must be positive definite")
        object.__setattr__(self, "metric_P", P)
        if not 0.0 < self.refine_tol < self.grid_step <= self.window_halfwidth:
            raise ValueError(
                "need 0 < refine_tol < grid_step <= window_halfwidth")


@dataclass(frozen=True)
class ProjectionState:
    """Warm-start memory carried across projection calls in one rollout."""

    tau_prev: float = float("nan")
    initialized: bool = False
    last_ambiguous: bool = False


def _as_state_vector(z) -> np.ndarray:
    if isinstance(z, ReducedState):
        return z.as_vector()
    z = np.asarray(z, dtype=float)
    if z.shape != (7,):
        raise ValueError(f"expected 7-state, got shape {z.shape}")
    return z


_INV_PHI = (np.sqrt(5.0) - 1.0) / 2.0
_INV_PHI2 = (3.0 - np.sqrt(5.0)) / 2.0


def _golden_refine(fun, lo: float, hi: float, tol: float):
    """Minimize a smooth scalar function on [lo, hi].

    Golden-section search shrinks the bracket below tol, then one
    parabolic fit through the best three points polishes the vertex
    (the cost is locally quadratic in tau, so the polish lands orders
    of magnitude inside the final bracket).
    """
    a, b = float(lo), float(hi)
    h = b - a
    if h <= tol:
        mid = 0.5 * (a + b)
        return mid, fun(mid)
    c = a + _INV_PHI2 * h
    d = a + _INV_PHI * h
    fc, fd = fun(c), fun(d)
    while h > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            h = b - a
            c = a + _INV_PHI2 * h
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            h = b - a
            d = a + _INV_PHI * h
            fd = fun(d)
    if fc <= fd:
        x0, x1, x2 = a, c, d
        f1 = fc
    else:
        x0, x1, x2 = c, d, b
        f1 = fd
    f0, f2 = fun(x0), fun(x2)
    num = (x1 - x0) ** 2 * (f1 - f2) - (x1 - x2) ** 2 * (f1 - f0)
    den = (x1 - x0) * (f1 - f2) - (x1 - x2) * (f1 - f0)
    if den != 0.0:
        vertex = x1 - 0.5 * num / den
        if lo <= vertex <= hi:
            fv = fun(vertex)
            if fv <= f1:
                return vertex, fv
    return x1, f1


def _window_nodes(m: Maneuver, tau_center: float, halfwidth: float):
    """Table nodes covering [tau_center - halfwidth, tau_center + halfwidth].

    Returns (taus, rows, circular) with taus on an unwrapped axis around
    the center so ordering stays monotone across a closed maneuver's
    seam; circular is True when the nodes cover the whole closed curve.
    """
    spacing = m.node_spacing
    n = m.states.shape[0]
    lo = tau_center - halfwidth
    hi = tau_center + halfwidth
    if m.closed:
        i0 = int(np.floor((lo - m.tau_min) / spacing))
        i1 = int(np.ceil((hi - m.tau_min) / spacing))
        if i1 - i0 + 1 >= n:
            return m.grid, m.states, True
        idx = np.arange(i0, i1 + 1)
        taus = m.tau_min + idx * spacing
        return taus, m.states[idx % n], False
    lo = max(lo, m.tau_min)
    hi = min(hi, m.tau_max)
    if hi <= lo:
        raise EmptyWindowError(
            f"window [{lo:.6f}, {hi:.6f}] outside domain "
            f"[{m.tau_min:.6f}, {m.tau_max:.6f}]")
    i0 = int(np.floor((lo - m.tau_min) / spacing))
    i1 = int(np.ceil((hi - m.tau_min) / spacing))
    i0 = max(i0, 0)
    i1 = min(i1, n - 1)
    return m.grid[i0:i1 + 1], m.states[i0:i1 + 1], False


def _local_minima_values(costs: np.ndarray, circular: bool) -> np.ndarray:
    """Values at discrete local minima.

    A circular scan has no edges (node 0 and node n-1 are neighbours);
    a windowed scan counts a strictly decreasing edge as a minimum.
    """
    n = costs.size
    if circular and n >= 3:
        prev = np.roll(costs, 1)
        nxt = np.roll(costs, -1)
        is_min = (costs <= prev) & (costs <= nxt) & \
                 ((costs < prev) | (costs < nxt))
        return np.sort(costs[is_min])
    vals = []
    if n >= 2:
        if costs[0] < costs[1]:
            vals.append(costs[0])
        if costs[-1] < costs[-2]:
            vals.append(costs[-1])
    if n >= 3:
        inner = costs[1:-1]
        is_min = (inner <= costs[:-2]) & (inner <= costs[2:]) & \
                 ((inner < costs[:-2]) | (inner < costs[2:]))
        vals.extend(inner[is_min].tolist())
    return np.sort(np.asarray(vals, dtype=float))


def project(z, m: Maneuver, cfg: ProjectionConfig, state: ProjectionState):
    """Curve parameter of the metric-closest reference state.

    Returns (tau_star, dist_sq, updated state). The first call searches
    the whole table; later calls search a +-window_halfwidth window
    around the previous solution (wrapping on closed curves, raising
    EmptyWindowError if the window leaves an open domain). Two window
    minima within 1% of each other raise AmbiguousProjectionWarning and
    mark the returned state. Ties resolve toward smaller tau.
    """
    z = _as_state_vector(z)
    L = np.linalg.cholesky(cfg.metric_P)
    if state.initialized:
        taus, rows, circular = _window_nodes(m, state.tau_prev,
                                             cfg.window_halfwidth)
    else:
        taus, rows, circular = m.grid, m.states, m.closed

    y = (rows - z) @ L
    costs = np.einsum("ij,ij->i", y, y)
    cmax = float(costs.max())
    cmin = float(costs.min())

    ambiguous = False
    mins = _local_minima_values(costs, circular)
    if mins.size >= 2 and mins[1] - mins[0] <= 0.01 * max(mins[0], 1e-300):
        ambiguous = True
    flat = cmax - cmin <= 1e-12 * max(cmax, 1.0)
    if flat:
        # nothing to refine; entire window is equidistant
        ambiguous = True
        tau_star = float(taus[0])
        dist_sq = float(costs[0])
    else:
        best = int(np.argmin(costs))
        spacing = m.node_spacing
        lo = float(taus[best]) - spacing
        hi = float(taus[best]) + spacing
        if not m.closed:
            lo = max(lo, m.tau_min)
            hi = min(hi, m.tau_max)

        def cost_at(tau):
            e = m.state_at(tau) - z
            w = L.T @ e
            return float(w @ w)

        if hi > lo:
            tau_star, dist_sq = _golden_refine(cost_at, lo, hi, cfg.refine_tol)
        else:
            tau_star, dist_sq = lo, cost_at(lo)
        if cfg.forward_only and state.initialized and tau_star < state.tau_prev:
            tau_star = state.tau_prev
            dist_sq = cost_at(tau_star)

    tau_star = m.wrap(tau_star)
    if ambiguous:
        warnings.warn("projection ambiguous: multiple near-equal minima in "
                      "the search window", AmbiguousProjectionWarning,
                      stacklevel=2)
    new_state = ProjectionState(tau_prev=float(tau_star), initialized=True,
                                last_ambiguous=ambiguous)
    return float(tau_star), float(dist_sq), new_state


def project_brute_force(z, m: Maneuver, P, dtau: float = 1e-4) -> float:
    """Exhaustive projection over a dense uniform sampling of the curve.

    Independent of project(): no windowing, no refinement, any symmetric
    nonnegative weight matrix (positive definiteness not required). Ties
    resolve toward smaller tau. Intended as a test oracle; the dense
    table is cached on the maneuver per dtau.
    """
    z = _as_state_vector(z)
    P = np.asarray(P, dtype=float)
    if P.shape != (7, 7):
        raise ValueError("P must be 7x7")
    taus, states = m.dense_states(dtau)
    key = ("rowquad", float(dtau), P.tobytes())
    if key not in m._dense_cache:
        m._dense_cache[key] = np.einsum("ij,ij->i", states @ P, states)
    rowquad = m._dense_cache[key]
    # argmin of ||zd - z||_P^2 = rowquad - 2 zd.(Pz) + const
    costs = rowquad - 2.0 * (states @ (P @ z))
    cmin = float(costs.min())
    # near-ties at floating-point resolution (degenerate geometries such
    # as the circle's center) resolve toward smaller tau; genuine minima
    # are separated by many orders of magnitude more than this
    tie = 64.0 * np.finfo(float).eps * max(1.0, abs(cmin),
                                           float(np.abs(costs).max()))
    return float(taus[int(np.argmax(costs <= cmin + tie))])


@dataclass(frozen=True)
class RegulationDiagnostics:
    tau_star: float
    dist_sq: float
    ref: ReferencePoint
    mu: VirtualInput
    error: np.ndarray
    ambiguous: bool
    state: ProjectionState


def regulation_control(x: ReducedState, m: Maneuver, gains: Gains,
                       eta: IntegratorState | None, cfg: ProjectionConfig,
                       state: ProjectionState, params: VehicleParams):
    """Tracking law evaluated at the projected reference point.

    Same Gains object as the tracking controller; only the reference
    selection changes. Returns the unsaturated input and diagnostics
    (projected parameter, squared metric distance, reference point,
    virtual input, regulation error and updated projection state).
    """
    z = x.as_vector()
    tau_star, dist_sq, new_state = project(z, m, cfg, state)
    ref = m.eval(tau_star)
    mu = tracking_virtual_input(x, ref, gains, eta, params)
    u = feedback_linearize(mu, x.psi, params)
    diag = RegulationDiagnostics(
        tau_star=tau_star, dist_sq=dist_sq, ref=ref, mu=mu,
        error=z - ref.state_vector(), ambiguous=new_state.last_ambiguous,
        state=new_state)
    return u, diag
