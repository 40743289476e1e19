"""Closed-loop rollouts, the hold clamp, drag, metrics and comparisons.

The loop runs the controller at control_dt and the plant at plant_dt
with zero-order-held inputs. Everything is deterministic: same scenario,
same trace, bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
import math

import numpy as np

from .dynamics import (ControlInput, DisturbanceInput, ReducedState,
                       SaturationFlags, VehicleParams, saturate, step)
from .lyapunov import default_projection_metric
from .maneuvers import Maneuver
from .regulation import ProjectionConfig, ProjectionState, project
from .tracking import (Gains, IntegratorState, feedback_linearize,
                       tracking_virtual_input, update_integrator)
from .trace import TRACE_COLUMNS, TraceLog

# position error beyond which a rollout is abandoned as diverged (m)
DIVERGENCE_RADIUS = 5.0


@dataclass(frozen=True)
class HoldSpec:
    """Pin the vehicle at a point over [start, release).

    position None means "wherever the rollout starts"; the harness
    resolves it before use. Release happens at the first instant at or
    past the release time.
    """

    release: float
    start: float = 0.0
    position: np.ndarray | None = None

    def __post_init__(self):
        if self.start < 0.0:
            raise ValueError("hold start must be nonnegative")
        if self.release <= self.start:
            raise ValueError("hold release must come after start")
        if self.position is not None:
            pos = np.asarray(self.position, dtype=float)
            if pos.shape != (3,) or not np.isfinite(pos).all():
                raise ValueError("hold position must be a finite 3-vector")
            object.__setattr__(self, "position", pos)

    def active(self, t: float) -> bool:
        return self.start <= t < self.release


@dataclass(frozen=True)
class DragSpec:
    """Constant-magnitude drag force opposing the velocity direction.

    The direction is regularized by epsilon so the force vanishes
    smoothly at rest instead of chattering.
    """

    magnitude: float = 0.02
    epsilon: float = 0.01
    horizontal_only: bool = True

    def __post_init__(self):
        if self.magnitude < 0.0:
            raise ValueError("drag magnitude must be nonnegative")
        if self.epsilon <= 0.0:
            raise ValueError("epsilon must be positive")


def drag_force(v, spec: DragSpec, mass: float) -> np.ndarray:
    """Drag as a specific force (m/s^2) for the current velocity."""
    v = np.asarray(v, dtype=float)
    vh = v.copy()
    if spec.horizontal_only:
        vh[2] = 0.0
    speed = float(np.linalg.norm(vh))
    return -(spec.magnitude / mass) * vh / (speed + spec.epsilon)


def apply_hold(x: ReducedState, hold: HoldSpec | None,
               t: float) -> ReducedState:
    """Kinematic clamp: pinned position, zero velocity, yaw untouched.

    Pass-through identity when no hold is configured, outside the hold
    window, or while the hold position is still unresolved.
    """
    if hold is None or hold.position is None or not hold.active(t):
        return x
    return ReducedState(p=hold.position.copy(), v=np.zeros(3), psi=x.psi)


@dataclass
class Scenario:
    """Complete description of one reproducible closed-loop rollout.

    seed is reserved for randomized studies layered on top of the
    harness; the rollout itself draws no random numbers.
    """

    name: str
    mode: str
    maneuver: Maneuver
    duration: float
    gains: Gains = field(default_factory=Gains)
    params: VehicleParams = field(default_factory=VehicleParams)
    projection: ProjectionConfig | None = None
    hold: HoldSpec | None = None
    drag: DragSpec | None = None
    initial_state: ReducedState | None = None
    freeze_integrator_during_hold: bool = True
    stop_at_path_end: bool = True
    control_dt: float = 0.01
    plant_dt: float = 0.002
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("tracking", "regulation"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.duration < 0.0:
            raise ValueError("duration must be nonnegative")
        if self.control_dt <= 0.0 or self.plant_dt <= 0.0:
            raise ValueError("step sizes must be positive")
        ratio = self.control_dt / self.plant_dt
        if abs(ratio - round(ratio)) > 1e-9 or round(ratio) < 1:
            raise ValueError("control_dt must be an integer multiple of plant_dt")
        if self.hold is not None and self.hold.release >= self.duration:
            raise ValueError("hold release must fall inside the duration")

    def resolved_projection(self) -> ProjectionConfig:
        if self.projection is not None:
            return self.projection
        return ProjectionConfig(metric_P=default_projection_metric(self.gains))

    def resolved_initial_state(self) -> ReducedState:
        if self.initial_state is not None:
            return self.initial_state
        ref = self.maneuver.eval(self.maneuver.tau_min)
        return ReducedState(p=ref.p.copy(), v=ref.v.copy(), psi=ref.psi)


@dataclass
class RunResult:
    scenario: Scenario
    trace: TraceLog
    diverged: bool
    completed_path: bool
    ambiguity_count: int
    final_state: ReducedState

    def metrics(self) -> "Metrics":
        return compute_metrics(self.trace, self.scenario.maneuver,
                               diverged=self.diverged)

    def summary(self) -> dict:
        return {
            "name": self.scenario.name,
            "mode": self.scenario.mode,
            "diverged": self.diverged,
            "completed_path": self.completed_path,
            "ambiguity_count": self.ambiguity_count,
            "metrics": self.metrics().to_dict(),
        }


def _log_row(out, t, tau_val, x, ref, mu, u, flags, d_now, dist_sq, eta_vec):
    out[0] = t
    out[1] = tau_val
    out[2:5] = x.p
    out[5:8] = x.v
    out[8] = x.psi
    out[9:12] = ref.p
    out[12:15] = ref.v
    out[15:18] = ref.a
    out[18] = ref.psi
    out[19] = ref.psi_dot
    out[20:23] = mu.mu_p
    out[23] = mu.mu_psi
    out[24] = u.f
    out[25] = u.phi
    out[26] = u.theta
    out[27] = float(flags.f)
    out[28] = float(flags.phi)
    out[29] = float(flags.theta)
    out[30:33] = d_now
    out[33] = dist_sq
    out[34:37] = eta_vec


def run_scenario(sc: Scenario) -> RunResult:
    """Roll the closed loop out and log one trace row per controller step.

    Loop order at each controller instant: clamp if holding, pick the
    reference (clock time when tracking, metric projection when
    regulating), evaluate the control law, log, advance the integrator
    (frozen while holding unless configured otherwise), then integrate
    the plant with the input held constant. A final row is logged at
    t = duration with no step after it. The rollout ends early when the
    position error exceeds DIVERGENCE_RADIUS or the state stops being
    finite (diverged) or, when regulating an open path with
    stop_at_path_end, once the projection reaches the far end
    (completed_path).
    """
    params = sc.params
    gains = sc.gains
    m = sc.maneuver
    cfg = sc.resolved_projection()
    x = sc.resolved_initial_state()
    eta = IntegratorState() if gains.k_i > 0.0 else None
    pstate = ProjectionState()
    hold = sc.hold
    if hold is not None and hold.position is None:
        hold = replace(hold, position=x.p.copy())

    if sc.duration == 0.0:
        return RunResult(scenario=sc,
                         trace=TraceLog(np.empty((0, len(TRACE_COLUMNS)))),
                         diverged=False, completed_path=False,
                         ambiguity_count=0, final_state=x)

    n_ctrl = int(round(sc.duration / sc.control_dt))
    nsub = int(round(sc.control_dt / sc.plant_dt))
    rows = np.empty((n_ctrl + 1, len(TRACE_COLUMNS)))
    n_logged = 0
    diverged = False
    completed = False
    ambiguity_count = 0

    for k in range(n_ctrl + 1):
        t = k * sc.control_dt
        hold_now = hold is not None and hold.active(t)
        x = apply_hold(x, hold, t)

        try:
            if sc.mode == "regulation":
                tau_val, dist_sq, pstate = project(x.as_vector(), m, cfg,
                                                   pstate)
                if pstate.last_ambiguous:
                    ambiguity_count += 1
                ref = m.eval(tau_val)
            else:
                tau_val = t
                ref = m.eval(t)
                e = x.as_vector() - ref.state_vector()
                dist_sq = float(e @ cfg.metric_P @ e)

            mu = tracking_virtual_input(x, ref, gains, eta, params)
            u, flags = saturate(feedback_linearize(mu, x.psi, params), params)
        except ValueError:
            # controller or projection failure ends the run, recorded on
            # the result rather than raised
            diverged = True
            break
        d_now = drag_force(x.v, sc.drag, params.m) if sc.drag else np.zeros(3)
        eta_vec = eta.eta if eta is not None else np.zeros(3)
        _log_row(rows[n_logged], t, tau_val, x, ref, mu, u, flags, d_now,
                 dist_sq, eta_vec)
        n_logged += 1

        if k == n_ctrl:
            break
        if (sc.mode == "regulation" and sc.stop_at_path_end and not m.closed
                and tau_val >= m.tau_max - 0.5 * m.node_spacing):
            completed = True
            break

        if eta is not None and not (hold_now and
                                    sc.freeze_integrator_during_hold):
            eta = update_integrator(eta, x.p - ref.p, sc.control_dt, gains)

        try:
            for j in range(nsub):
                t_sub = t + j * sc.plant_dt
                sub_hold = hold is not None and hold.active(t_sub)
                force = (drag_force(x.v, sc.drag, params.m) if sc.drag
                         else np.zeros(3))
                d = DisturbanceInput(force=force, hold_active=sub_hold)
                x = step(x, u, d, sc.plant_dt, params)
                x = apply_hold(x, hold, t_sub)
        except ValueError:
            # non-finite state rejected by the state constructor
            diverged = True
            break

        if (not np.isfinite(x.as_vector()).all()
                or float(np.linalg.norm(x.p - ref.p)) > DIVERGENCE_RADIUS):
            diverged = True
            break

    return RunResult(scenario=sc, trace=TraceLog(rows[:n_logged]),
                     diverged=diverged, completed_path=completed,
                     ambiguity_count=ambiguity_count, final_state=x)


@dataclass(frozen=True)
class Metrics:
    """Scalar summary of one trace."""

    peak_speed: float
    peak_thrust: float
    sat_duty: float
    max_path_deviation: float
    mean_speed: float
    settling_time: float | None
    diverged: bool
    duration: float
    n_steps: int

    def to_dict(self) -> dict:
        return {
            "peak_speed": self.peak_speed,
            "peak_thrust": self.peak_thrust,
            "sat_duty": self.sat_duty,
            "max_path_deviation": self.max_path_deviation,
            "mean_speed": self.mean_speed,
            "settling_time": self.settling_time,
            "diverged": self.diverged,
            "duration": self.duration,
            "n_steps": self.n_steps,
        }


def _deviation_from_path(points: np.ndarray, path: np.ndarray,
                         chunk: int = 256) -> np.ndarray:
    """Distance from each point to the nearest sampled path position."""
    path_sq = np.einsum("ij,ij->i", path, path)
    out = np.empty(points.shape[0])
    for i in range(0, points.shape[0], chunk):
        blk = points[i:i + chunk]
        d2 = (np.einsum("ij,ij->i", blk, blk)[:, None]
              + path_sq[None, :] - 2.0 * blk @ path.T)
        out[i:i + chunk] = d2.min(axis=1)
    return np.sqrt(np.clip(out, 0.0, None))


def compute_metrics(trace: TraceLog, m: Maneuver, diverged: bool = False,
                    tube: float = 0.01, path_dtau: float = 1e-3) -> Metrics:
    """Recompute the scalar summary from a trace (CSV round-trip safe)."""
    if len(trace) == 0:
        return Metrics(0.0, 0.0, 0.0, 0.0, 0.0, None, diverged, 0.0, 0)
    t = trace.col("t")
    speed = np.linalg.norm(trace.cols("v1", "v2", "v3"), axis=1)
    sat = (trace.cols("sat_f", "sat_phi", "sat_theta") != 0.0).any(axis=1)
    path = m.dense_states(path_dtau)[1][:, 0:3]
    dev = _deviation_from_path(trace.cols("p1", "p2", "p3"), path)

    inside = dev < tube
    # earliest instant after which the vehicle never leaves the tube
    stays = np.flip(np.logical_and.accumulate(np.flip(inside)))
    settling = float(t[int(np.argmax(stays))]) if stays.any() else None

    return Metrics(
        peak_speed=float(speed.max()),
        peak_thrust=float(trace.col("f").max()),
        sat_duty=float(sat.mean()),
        max_path_deviation=float(dev.max()),
        mean_speed=float(speed.mean()),
        settling_time=settling,
        diverged=diverged,
        duration=float(t[-1] - t[0]),
        n_steps=len(trace),
    )


def _projection_configs_equal(a: ProjectionConfig | None,
                              b: ProjectionConfig | None) -> bool:
    if a is None or b is None:
        return a is b
    return (np.array_equal(a.metric_P, b.metric_P)
            and a.window_halfwidth == b.window_halfwidth
            and a.refine_tol == b.refine_tol
            and a.grid_step == b.grid_step
            and a.forward_only == b.forward_only)


def _holds_equal(a: HoldSpec | None, b: HoldSpec | None) -> bool:
    if a is None or b is None:
        return a is b
    if a.start != b.start or a.release != b.release:
        return False
    if a.position is None or b.position is None:
        return a.position is b.position
    return np.array_equal(a.position, b.position)


def _scenario_mismatches(a: Scenario, b: Scenario) -> list:
    bad = []
    ma, mb = a.maneuver, b.maneuver
    if (ma.kind != mb.kind or ma.spec != mb.spec
            or ma.tau_min != mb.tau_min or ma.tau_max != mb.tau_max
            or ma.node_spacing != mb.node_spacing):
        bad.append("maneuver")
    if a.duration != b.duration:
        bad.append("duration")
    if a.gains != b.gains:
        bad.append("gains")
    if a.params != b.params:
        bad.append("params")
    if not _projection_configs_equal(a.projection, b.projection):
        bad.append("projection")
    if not _holds_equal(a.hold, b.hold):
        bad.append("hold")
    if a.drag != b.drag:
        bad.append("drag")
    ia, ib = a.initial_state, b.initial_state
    if (ia is None) != (ib is None) or (
            ia is not None and not np.array_equal(ia.as_vector(),
                                                  ib.as_vector())):
        bad.append("initial_state")
    if a.freeze_integrator_during_hold != b.freeze_integrator_during_hold:
        bad.append("freeze_integrator_during_hold")
    if a.stop_at_path_end != b.stop_at_path_end:
        bad.append("stop_at_path_end")
    if a.control_dt != b.control_dt or a.plant_dt != b.plant_dt:
        bad.append("step sizes")
    return bad


@dataclass
class ComparisonResult:
    tracking: RunResult
    regulation: RunResult

    def summary(self) -> dict:
        tm = self.tracking.metrics()
        rm = self.regulation.metrics()

        def ratio(num, den):
            return num / den if den > 0.0 else math.inf

        return {
            "schema_version": 1,
            "tracking": self.tracking.summary(),
            "regulation": self.regulation.summary(),
            "ratios": {
                "peak_speed": ratio(tm.peak_speed, rm.peak_speed),
                "peak_thrust": ratio(tm.peak_thrust, rm.peak_thrust),
                "max_path_deviation": ratio(tm.max_path_deviation,
                                            rm.max_path_deviation),
            },
        }


def compare(tracking_sc: Scenario, regulation_sc: Scenario) -> ComparisonResult:
    """Run a tracking/regulation pair that differs only in mode (and name)."""
    if tracking_sc.mode != "tracking" or regulation_sc.mode != "regulation":
        raise ValueError("compare() wants (tracking, regulation) scenarios")
    bad = _scenario_mismatches(tracking_sc, regulation_sc)
    if bad:
        raise ValueError(
            "scenarios must match apart from mode and name; they differ in: "
            + ", ".join(bad))
    return ComparisonResult(tracking=run_scenario(tracking_sc),
                            regulation=run_scenario(regulation_sc))
