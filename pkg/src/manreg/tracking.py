"""Trajectory-tracking control law and exact input inversion.

The outer loop produces a virtual acceleration command mu for the
double-integrator translation plus a yaw rate; the inversion maps mu
to thrust, roll and pitch so the closed translational dynamics become
exactly linear wherever the commands are feasible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from .dynamics import ControlInput, ReducedState, VehicleParams, _vec3

if TYPE_CHECKING:  # pragma: no cover - annotation only
    from .maneuvers import ReferencePoint

# commanded vertical acceleration is kept this far below g (m/s^2) so the
# thrust inversion stays away from its singularity
MU3_MARGIN = 1.0


class SingularThrustError(ValueError):
    """Vertical virtual input too close to g: thrust direction undefined."""


@dataclass(frozen=True)
class Gains:
    """Outer-loop gains, shared verbatim by tracking and regulation."""

    k_p: float = 16.0
    k_d: float = 8.0
    k_psi: float = 2.0
    k_i: float = 0.0
    eta_limit: float = 0.5

    def __post_init__(self):
        if self.k_p <= 0.0 or self.k_d <= 0.0 or self.k_psi <= 0.0:
            raise ValueError("k_p, k_d and k_psi must be positive")
        if self.k_i < 0.0:
            raise ValueError("k_i must be nonnegative (0 disables integral action)")
        if self.eta_limit <= 0.0:
            raise ValueError("eta_limit must be positive")


@dataclass
class IntegratorState:
    """Clamped integral of the position error (m*s)."""

    eta: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        self.eta = _vec3(self.eta)


@dataclass
class VirtualInput:
    """Translational acceleration command (m/s^2) and yaw rate (rad/s)."""

    mu_p: np.ndarray
    mu_psi: float
    clamped: bool = False

    def __post_init__(self):
        self.mu_p = _vec3(self.mu_p)
        self.mu_psi = float(self.mu_psi)


def tracking_virtual_input(x: ReducedState, ref: "ReferencePoint", gains: Gains,
                           eta: IntegratorState | None,
                           params: VehicleParams) -> VirtualInput:
    """PD (optionally PID) law on the reference error plus feedforward.

    The vertical component is silently clamped below g - MU3_MARGIN so the
    inversion never sees a singular command; the clamp is reported on the
    returned VirtualInput.
    """
    mu_p = (ref.a
            - gains.k_p * (x.p - ref.p)
            - gains.k_d * (x.v - ref.v))
    if gains.k_i > 0.0 and eta is not None:
        mu_p = mu_p - gains.k_i * eta.eta
    cap = params.g - MU3_MARGIN
    clamped = bool(mu_p[2] > cap)
    if clamped:
        mu_p = mu_p.copy()
        mu_p[2] = cap
    mu_psi = ref.psi_dot - gains.k_psi * (x.psi - ref.psi)
    return VirtualInput(mu_p=mu_p, mu_psi=float(mu_psi), clamped=clamped)


def feedback_linearize(mu: VirtualInput, psi: float, params: VehicleParams,
                       eps_singular: float = 1e-6) -> ControlInput:
    """Map a virtual acceleration to thrust, roll and pitch.

    Inverts the translational dynamics: the horizontal command is rotated
    through the yaw frame and scaled by the vertical thrust budget, roll
    and pitch follow from arctangents, and the thrust magnitude restores
    the commanded vertical acceleration. Exact wherever mu_p3 < g.
    """
    den = float(mu.mu_p[2]) - params.g
    if den >= -eps_singular:
        raise SingularThrustError(
            f"vertical command {mu.mu_p[2]:.3f} m/s^2 within {eps_singular} of g")
    sps, cps = np.sin(psi), np.cos(psi)
    # yaw frame is orthonormal, so its inverse is the transpose
    u1 = (sps * mu.mu_p[0] - cps * mu.mu_p[1]) / den
    u2 = (cps * mu.mu_p[0] + sps * mu.mu_p[1]) / den
    theta = float(np.arctan(u2))
    phi = float(np.arctan(np.cos(theta) * u1))
    f = -params.m * den / (np.cos(phi) * np.cos(theta))
    return ControlInput(f=float(f), phi=phi, theta=theta, mu_psi=mu.mu_psi)


def update_integrator(eta: IntegratorState, position_error, h: float,
                      gains: Gains) -> IntegratorState:
    """Rectangle-rule integral update with a symmetric per-axis clamp."""
    if h <= 0.0:
        raise ValueError("step size must be positive")
    e = _vec3(position_error)
    nxt = np.clip(eta.eta + h * e, -gains.eta_limit, gains.eta_limit)
    return IntegratorState(eta=nxt)
