"""Canned experiment scenarios and their JSON round-trip.

The builders here pin down the exact configurations the comparison
experiments use, so scripts, the command line and tests all run the
same rollouts.
"""

from __future__ import annotations

import numpy as np

from .dynamics import ReducedState, VehicleParams
from .harness import DragSpec, HoldSpec, Scenario
from .maneuvers import Maneuver, circle, hover, turn90
from .regulation import ProjectionConfig
from .tracking import Gains

CONFIG_SCHEMA_VERSION = 1

DEFAULT_GAINS = Gains()

_MANEUVER_BUILDERS = {"circle": circle, "turn90": turn90, "hover": hover}


def hold_release_scenario(mode: str, duration: float = 20.0,
                          hold_duration: float = 5.0, radius: float = 0.25,
                          speed: float = 0.1, altitude: float = -1.0,
                          gains: Gains | None = None,
                          params: VehicleParams | None = None) -> Scenario:
    """Circle rollout that starts pinned in place for hold_duration seconds.

    While pinned, a tracking reference keeps circling away from the
    vehicle; a regulation reference stays at the projection. The release
    transient separates the two modes.
    """
    m = circle(radius=radius, speed=speed, center=(0.0, 0.0, altitude))
    return Scenario(
        name=f"hold-release-{mode}", mode=mode, maneuver=m,
        duration=duration, gains=gains or Gains(),
        params=params or VehicleParams(),
        hold=HoldSpec(release=hold_duration))


def payload_drag_scenario(mode: str = "regulation", fraction: float = 0.3,
                          speed: float = 0.2, duration: float = 20.0,
                          epsilon: float = 0.01,
                          gains: Gains | None = None,
                          params: VehicleParams | None = None) -> Scenario:
    """Left-turn path flown against steady drag.

    The drag magnitude is sized as a fraction of the velocity-loop
    authority at the path speed, fraction * m * k_d * speed, so the
    expected steady slowdown is roughly that same fraction.
    """
    g = gains or Gains()
    pr = params or VehicleParams()
    m = turn90(speed=speed)
    magnitude = fraction * pr.m * g.k_d * speed
    return Scenario(
        name=f"payload-drag-{mode}", mode=mode, maneuver=m,
        duration=duration, gains=g, params=pr,
        drag=DragSpec(magnitude=magnitude, epsilon=epsilon))


def _offset_start(m: Maneuver, offset: float) -> ReducedState:
    # radially outward at tau = 0, which the circle puts along +x
    ref = m.eval(m.tau_min)
    return ReducedState(p=ref.p + np.array([offset, 0.0, 0.0]),
                        v=ref.v.copy(), psi=ref.psi)


def tracking_convergence_scenario(offset: float = 0.1, duration: float = 10.0,
                                  radius: float = 0.25, speed: float = 0.1,
                                  gains: Gains | None = None,
                                  params: VehicleParams | None = None
                                  ) -> Scenario:
    """Tracking run started a radial offset away from the moving reference."""
    m = circle(radius=radius, speed=speed)
    return Scenario(
        name="tracking-convergence", mode="tracking", maneuver=m,
        duration=duration, gains=gains or Gains(),
        params=params or VehicleParams(),
        initial_state=_offset_start(m, offset))


def regulation_offset_scenario(offset: float = 0.05, duration: float = 10.0,
                               radius: float = 0.25, speed: float = 0.1,
                               gains: Gains | None = None,
                               params: VehicleParams | None = None
                               ) -> Scenario:
    """Regulation run started a radial offset away from the curve."""
    m = circle(radius=radius, speed=speed)
    return Scenario(
        name="regulation-offset", mode="regulation", maneuver=m,
        duration=duration, gains=gains or Gains(),
        params=params or VehicleParams(),
        initial_state=_offset_start(m, offset))


def maneuver_to_dict(m: Maneuver) -> dict:
    if m.kind not in _MANEUVER_BUILDERS:
        raise ValueError(f"maneuver kind {m.kind!r} has no builder")
    return {"kind": m.kind, "grid_step": m.grid_step, **m.spec}


def maneuver_from_dict(d: dict) -> Maneuver:
    d = dict(d)
    kind = d.pop("kind")
    try:
        builder = _MANEUVER_BUILDERS[kind]
    except KeyError:
        raise ValueError(f"unknown maneuver kind {kind!r}") from None
    return builder(**d)


def scenario_to_dict(sc: Scenario) -> dict:
    g, pr = sc.gains, sc.params
    out = {
        "schema_version": CONFIG_SCHEMA_VERSION,
        "name": sc.name,
        "mode": sc.mode,
        "maneuver": maneuver_to_dict(sc.maneuver),
        "duration": sc.duration,
        "gains": {"k_p": g.k_p, "k_d": g.k_d, "k_psi": g.k_psi,
                  "k_i": g.k_i, "eta_limit": g.eta_limit},
        "params": {"m": pr.m, "g": pr.g, "f_max": pr.f_max,
                   "angle_max": pr.angle_max,
                   "attitude_lag_tau": pr.attitude_lag_tau},
        "projection": None,
        "hold": None,
        "drag": None,
        "initial_state": None,
        "freeze_integrator_during_hold": sc.freeze_integrator_during_hold,
        "stop_at_path_end": sc.stop_at_path_end,
        "control_dt": sc.control_dt,
        "plant_dt": sc.plant_dt,
        "seed": sc.seed,
    }
    if sc.projection is not None:
        c = sc.projection
        out["projection"] = {
            "metric_P": c.metric_P.tolist(),
            "window_halfwidth": c.window_halfwidth,
            "refine_tol": c.refine_tol,
            "grid_step": c.grid_step,
            "forward_only": c.forward_only,
        }
    if sc.hold is not None:
        out["hold"] = {
            "release": sc.hold.release,
            "start": sc.hold.start,
            "position": (None if sc.hold.position is None
                         else sc.hold.position.tolist()),
        }
    if sc.drag is not None:
        out["drag"] = {"magnitude": sc.drag.magnitude,
                       "epsilon": sc.drag.epsilon,
                       "horizontal_only": sc.drag.horizontal_only}
    if sc.initial_state is not None:
        s = sc.initial_state
        out["initial_state"] = {"p": s.p.tolist(), "v": s.v.tolist(),
                                "psi": s.psi}
    return out


def scenario_from_dict(d: dict) -> Scenario:
    version = d.get("schema_version")
    if version != CONFIG_SCHEMA_VERSION:
        raise ValueError(f"config schema_version {version!r} unsupported "
                         f"(expected {CONFIG_SCHEMA_VERSION})")
    projection = None
    if d.get("projection") is not None:
        c = d["projection"]
        projection = ProjectionConfig(
            metric_P=np.asarray(c["metric_P"], dtype=float),
            window_halfwidth=c["window_halfwidth"],
            refine_tol=c["refine_tol"],
            grid_step=c["grid_step"],
            forward_only=c["forward_only"])
    hold = None
    if d.get("hold") is not None:
        h = dict(d["hold"])
        if h.get("position") is not None:
            h["position"] = np.asarray(h["position"], dtype=float)
        hold = HoldSpec(**h)
    drag = DragSpec(**d["drag"]) if d.get("drag") is not None else None
    initial = None
    if d.get("initial_state") is not None:
        s = d["initial_state"]
        initial = ReducedState(p=s["p"], v=s["v"], psi=s["psi"])
    return Scenario(
        name=d["name"],
        mode=d["mode"],
        maneuver=maneuver_from_dict(d["maneuver"]),
        duration=d["duration"],
        gains=Gains(**d["gains"]),
        params=VehicleParams(**d["params"]),
        projection=projection,
        hold=hold,
        drag=drag,
        initial_state=initial,
        freeze_integrator_during_hold=d.get("freeze_integrator_during_hold",
                                            True),
        stop_at_path_end=d.get("stop_at_path_end", True),
        control_dt=d.get("control_dt", 0.01),
        plant_dt=d.get("plant_dt", 0.002),
        seed=d.get("seed", 0),
    )


def scenario_pair_from_dict(d: dict) -> tuple[Scenario, Scenario]:
    """Build the matched tracking/regulation pair a comparison runs.

    The config is an ordinary scenario dict with no mode; both modes
    are instantiated from it, names suffixed per mode, so the pair is
    identical apart from mode by construction.
    """
    if d.get("mode") is not None:
        raise ValueError(
            "a comparison config must not fix a mode; both are run")
    pair = []
    for mode in ("tracking", "regulation"):
        dd = dict(d)
        dd["mode"] = mode
        dd["name"] = f"{d.get('name', 'comparison')}-{mode}"
        pair.append(scenario_from_dict(dd))
    return pair[0], pair[1]
