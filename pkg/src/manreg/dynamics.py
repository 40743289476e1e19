"""Reduced vectored-thrust vehicle model and fixed-step integration.

State is z = [p, v, psi]: position, velocity and yaw, seven scalars.
The third axis points down, so gravity enters with +g on axis 3 and
level flight sits at negative altitude. Roll and pitch are inputs
realized by an ideal inner loop (optionally a first-order lag), and
the scalar thrust acts along the body vertical.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import numpy as np

E3 = np.array([0.0, 0.0, 1.0])


class SingularAttitudeError(ValueError):
    """Thrust direction undefined: cos(phi)*cos(theta) is numerically zero."""


@dataclass(frozen=True)
class VehicleParams:
    """Physical constants and actuator limits."""

    m: float = 0.03
    g: float = 9.81
    f_max: float = 0.31
    angle_max: float = 0.6
    attitude_lag_tau: float = 0.0

    def __post_init__(self):
        if self.m <= 0.0 or self.g <= 0.0 or self.f_max <= 0.0:
            raise ValueError("m, g and f_max must be positive")
        if not 0.0 < self.angle_max < np.pi / 2:
            raise ValueError("angle_max must lie in (0, pi/2)")
        if self.attitude_lag_tau < 0.0:
            raise ValueError("attitude_lag_tau must be nonnegative")


def _vec3(x) -> np.ndarray:
    a = np.asarray(x, dtype=float)
    if a.shape != (3,):
        raise ValueError(f"expected 3-vector, got shape {a.shape}")
    return a


@dataclass
class ReducedState:
    """Position (m), velocity (m/s) and yaw (rad, unwrapped)."""

    p: np.ndarray
    v: np.ndarray
    psi: float

    def __post_init__(self):
        self.p = _vec3(self.p)
        self.v = _vec3(self.v)
        self.psi = float(self.psi)
        if not (np.isfinite(self.p).all() and np.isfinite(self.v).all()
                and np.isfinite(self.psi)):
            raise ValueError("non-finite state")

    def as_vector(self) -> np.ndarray:
        z = np.empty(7)
        z[0:3] = self.p
        z[3:6] = self.v
        z[6] = self.psi
        return z

    @classmethod
    def from_vector(cls, z) -> "ReducedState":
        z = np.asarray(z, dtype=float)
        if z.shape != (7,):
            raise ValueError(f"expected 7-vector, got shape {z.shape}")
        return cls(p=z[0:3].copy(), v=z[3:6].copy(), psi=float(z[6]))


@dataclass(frozen=True)
class ControlInput:
    """Thrust magnitude (N), roll/pitch commands (rad) and yaw rate (rad/s)."""

    f: float
    phi: float
    theta: float
    mu_psi: float

    def __post_init__(self):
        if self.f < 0.0:
            raise ValueError("thrust must be nonnegative")
        if abs(self.phi) >= np.pi / 2 or abs(self.theta) >= np.pi / 2:
            raise ValueError("roll and pitch must lie strictly inside (-pi/2, pi/2)")


@dataclass(frozen=True)
class SaturationFlags:
    f: bool = False
    phi: bool = False
    theta: bool = False

    def any(self) -> bool:
        return self.f or self.phi or self.theta


@dataclass(frozen=True)
class DisturbanceInput:
    """Additive specific force on the velocity dynamics (m/s^2) plus hold flag.

    hold_active marks samples where the rollout loop pins the vehicle in
    place after integrating (see experiment harness apply_hold).
    """

    force: np.ndarray = field(default_factory=lambda: np.zeros(3))
    hold_active: bool = False

    def __post_init__(self):
        f = _vec3(self.force)
        if not np.isfinite(f).all():
            raise ValueError("disturbance force must be finite")
        object.__setattr__(self, "force", f)


ZERO_DISTURBANCE = DisturbanceInput()


def saturate(u: ControlInput, params: VehicleParams):
    """Clamp thrust to [0, f_max] and tilt commands to [-angle_max, angle_max].

    Returns the clamped input and per-channel flags. Idempotent.
    """
    f = min(u.f, params.f_max)
    phi = min(max(u.phi, -params.angle_max), params.angle_max)
    theta = min(max(u.theta, -params.angle_max), params.angle_max)
    flags = SaturationFlags(f=f != u.f, phi=phi != u.phi, theta=theta != u.theta)
    return ControlInput(f=f, phi=phi, theta=theta, mu_psi=u.mu_psi), flags


def thrust_axis(phi: float, theta: float, psi: float, eps_singular: float = 1e-6) -> np.ndarray:
    """Unit body-vertical expressed in the inertial frame (ZYX angles)."""
    sph, cph = np.sin(phi), np.cos(phi)
    sth, cth = np.sin(theta), np.cos(theta)
    sps, cps = np.sin(psi), np.cos(psi)
    if abs(cph * cth) <= eps_singular:
        raise SingularAttitudeError(
            f"cos(phi)*cos(theta) = {cph * cth:.3e} too close to zero")
    return np.array([
        sph * sps + cps * sth * cph,
        -sph * cps + sps * sth * cph,
        cph * cth,
    ])


def reduced_dynamics(x: ReducedState, u: ControlInput, d: DisturbanceInput,
                     params: VehicleParams, eps_singular: float = 1e-6) -> np.ndarray:
    """Time derivative of the 7-state under thrust, gravity and disturbance."""
    return _deriv(x.as_vector(), u, d, params, eps_singular)


def _deriv(z: np.ndarray, u: ControlInput, d: DisturbanceInput,
           params: VehicleParams, eps_singular: float = 1e-6) -> np.ndarray:
    axis = thrust_axis(u.phi, u.theta, z[6], eps_singular)
    dz = np.empty(7)
    dz[0:3] = z[3:6]
    dz[3:6] = params.g * E3 - (u.f / params.m) * axis + d.force
    dz[6] = u.mu_psi
    return dz


def rk4_step(fun, y: np.ndarray, h: float) -> np.ndarray:
    """One classic Runge-Kutta 4 step for y' = fun(y)."""
    k1 = fun(y)
    k2 = fun(y + 0.5 * h * k1)
    k3 = fun(y + 0.5 * h * k2)
    k4 = fun(y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def step(x: ReducedState, u: ControlInput, d: DisturbanceInput, h: float,
         params: VehicleParams) -> ReducedState:
    """Advance the state by h seconds with input and disturbance held constant.

    Expects an already saturated input. Hold clamping, when d.hold_active,
    is the rollout loop's job after this returns.
    """
    if h <= 0.0:
        raise ValueError("step size must be positive")
    z = rk4_step(lambda zz: _deriv(zz, u, d, params), x.as_vector(), h)
    return ReducedState.from_vector(z)


@dataclass
class AttitudeLag:
    """Optional first-order inner-loop model: angle' = (cmd - angle)/tau.

    advance() applies the exact discrete solution over one step, so the
    filter is stable for any h. tau <= 0 means ideal passthrough.
    """

    phi: float = 0.0
    theta: float = 0.0

    def advance(self, phi_cmd: float, theta_cmd: float, h: float, tau: float):
        if tau <= 0.0:
            self.phi, self.theta = phi_cmd, theta_cmd
        else:
            a = 1.0 - np.exp(-h / tau)
            self.phi += a * (phi_cmd - self.phi)
            self.theta += a * (theta_cmd - self.theta)
        return self.phi, self.theta
