"""Time-parametrized reference maneuvers with sampled lookup tables.

A maneuver maps a curve parameter tau (seconds) to a full reference
point: position, velocity, acceleration, yaw and yaw rate. Closed
curves wrap tau modulo their period; open curves clamp it to the
domain. Each maneuver carries a uniformly sampled table of reference
states used by the projection search and the path-deviation metric.
"""

from __future__ import annotations

from dataclasses import dataclass
import numpy as np

from .dynamics import ControlInput, VehicleParams, _vec3


@dataclass(frozen=True)
class ReferencePoint:
    """Reference position/velocity/acceleration plus yaw and yaw rate."""

    p: np.ndarray
    v: np.ndarray
    a: np.ndarray
    psi: float
    psi_dot: float

    def __post_init__(self):
        object.__setattr__(self, "p", _vec3(self.p))
        object.__setattr__(self, "v", _vec3(self.v))
        object.__setattr__(self, "a", _vec3(self.a))

    def state_vector(self) -> np.ndarray:
        """The 7-state [p, v, psi] this point asks the vehicle to occupy."""
        z = np.empty(7)
        z[0:3] = self.p
        z[3:6] = self.v
        z[6] = self.psi
        return z

    def derivative_vector(self) -> np.ndarray:
        """d/dtau of state_vector: [v, a, psi_dot]."""
        dz = np.empty(7)
        dz[0:3] = self.v
        dz[3:6] = self.a
        dz[6] = self.psi_dot
        return dz


class DerivativeMismatchError(ValueError):
    """Velocity/acceleration columns disagree with finite differences."""


class Maneuver:
    """Reference curve with scalar and vectorized evaluation and a table.

    point_fn(tau) -> ReferencePoint evaluates one in-domain parameter;
    batch_fn(taus) -> (N, 7) evaluates reference states on an array of
    in-domain parameters with the same arithmetic, so table entries are
    bitwise equal to scalar evaluations.
    """

    def __init__(self, kind, spec, point_fn, batch_fn, tau_min, tau_max,
                 closed, grid_step=0.01, breakpoints=()):
        if tau_max <= tau_min:
            raise ValueError("tau_max must exceed tau_min")
        if grid_step <= 0.0:
            raise ValueError("grid_step must be positive")
        self.kind = str(kind)
        self.spec = dict(spec)
        self.tau_min = float(tau_min)
        self.tau_max = float(tau_max)
        self.closed = bool(closed)
        self.period = self.tau_max - self.tau_min if closed else None
        self.grid_step = float(grid_step)
        self.breakpoints = tuple(float(b) for b in breakpoints)
        self._point = point_fn
        self._batch = batch_fn
        span = self.tau_max - self.tau_min
        n = int(np.ceil(span / grid_step))
        if self.closed:
            # end node excluded: it aliases tau_min
            self.grid = self.tau_min + span * np.arange(n) / n
        else:
            self.grid = np.linspace(self.tau_min, self.tau_max, n + 1)
        self.states = batch_fn(self.grid)
        self._dense_cache: dict = {}

    @property
    def node_spacing(self) -> float:
        return float(self.grid[1] - self.grid[0])

    def wrap(self, tau: float) -> float:
        """Map tau into the domain: modulo the period if closed, else clamp."""
        if self.closed:
            return self.tau_min + (float(tau) - self.tau_min) % self.period
        return min(max(float(tau), self.tau_min), self.tau_max)

    def eval(self, tau: float) -> ReferencePoint:
        return self._point(self.wrap(tau))

    def state_at(self, tau: float) -> np.ndarray:
        """Reference 7-state at tau (cheaper than eval().state_vector())."""
        return self._batch(np.array([self.wrap(tau)]))[0]

    def state_batch(self, taus) -> np.ndarray:
        taus = np.asarray(taus, dtype=float)
        if self.closed:
            taus = self.tau_min + (taus - self.tau_min) % self.period
        else:
            taus = np.clip(taus, self.tau_min, self.tau_max)
        return self._batch(taus)

    def dense_states(self, dtau: float):
        """Uniform (taus, states) sampling at spacing <= dtau, cached."""
        key = float(dtau)
        if key not in self._dense_cache:
            span = self.tau_max - self.tau_min
            n = int(np.ceil(span / dtau))
            if self.closed:
                taus = self.tau_min + span * np.arange(n) / n
            else:
                taus = np.linspace(self.tau_min, self.tau_max, n + 1)
            self._dense_cache[key] = (taus, self._batch(taus))
        return self._dense_cache[key]


def circle(radius: float, speed: float, center=(0.0, 0.0, -1.0), psi_d: float = 0.0,
           grid_step: float = 0.01) -> Maneuver:
    """Closed horizontal circle traversed counterclockwise at constant speed.

    tau = 0 starts at center + radius along the first axis.
    """
    if radius <= 0.0 or speed <= 0.0:
        raise ValueError("radius and speed must be positive")
    c = _vec3(center)
    omega = speed / radius
    period = 2.0 * np.pi / omega
    cent = radius * omega * omega

    def point(tau):
        ang = omega * tau
        ca, sa = np.cos(ang), np.sin(ang)
        return ReferencePoint(
            p=np.array([c[0] + radius * ca, c[1] + radius * sa, c[2]]),
            v=np.array([-speed * sa, speed * ca, 0.0]),
            a=np.array([-cent * ca, -cent * sa, 0.0]),
            psi=psi_d, psi_dot=0.0)

    def batch(taus):
        ang = omega * taus
        ca, sa = np.cos(ang), np.sin(ang)
        out = np.empty((taus.size, 7))
        out[:, 0] = c[0] + radius * ca
        out[:, 1] = c[1] + radius * sa
        out[:, 2] = c[2]
        out[:, 3] = -speed * sa
        out[:, 4] = speed * ca
        out[:, 5] = 0.0
        out[:, 6] = psi_d
        return out

    spec = {"radius": radius, "speed": speed, "center": list(map(float, c)),
            "psi_d": psi_d}
    return Maneuver("circle", spec, point, batch, 0.0, period, closed=True,
                    grid_step=grid_step)


def turn90(speed: float, leg_length: float = 0.5, fillet_radius: float = 0.2,
           start=(0.5, 0.0, -1.0), psi_d: float = 0.0,
           grid_step: float = 0.01) -> Maneuver:
    """Straight leg, quarter-circle fillet, straight leg, all at one speed.

    The first leg runs along +x from the start point, the fillet turns
    left, the second leg runs along +y. Position is C1; acceleration
    jumps at the two junctions (reported as breakpoints).
    """
    if speed <= 0.0 or leg_length <= 0.0 or fillet_radius <= 0.0:
        raise ValueError("speed, leg_length and fillet_radius must be positive")
    s0 = _vec3(start)
    t1 = leg_length / speed
    t2 = t1 + (np.pi / 2.0) * fillet_radius / speed
    t3 = t2 + leg_length / speed
    entry = s0 + np.array([leg_length, 0.0, 0.0])
    centre = entry + np.array([0.0, fillet_radius, 0.0])
    exit_pt = entry + np.array([fillet_radius, fillet_radius, 0.0])
    wrate = speed / fillet_radius
    cent = speed * wrate

    def point(tau):
        if tau <= t1:
            return ReferencePoint(
                p=np.array([s0[0] + speed * tau, s0[1], s0[2]]),
                v=np.array([speed, 0.0, 0.0]),
                a=np.zeros(3), psi=psi_d, psi_dot=0.0)
        if tau <= t2:
            ang = wrate * (tau - t1)
            ca, sa = np.cos(ang), np.sin(ang)
            return ReferencePoint(
                p=np.array([centre[0] + fillet_radius * sa,
                            centre[1] - fillet_radius * ca, centre[2]]),
                v=np.array([speed * ca, speed * sa, 0.0]),
                a=np.array([-cent * sa, cent * ca, 0.0]),
                psi=psi_d, psi_dot=0.0)
        return ReferencePoint(
            p=np.array([exit_pt[0], exit_pt[1] + speed * (tau - t2), exit_pt[2]]),
            v=np.array([0.0, speed, 0.0]),
            a=np.zeros(3), psi=psi_d, psi_dot=0.0)

    def batch(taus):
        out = np.empty((taus.size, 7))
        out[:, 6] = psi_d
        leg1 = taus <= t1
        arc = (taus > t1) & (taus <= t2)
        leg2 = taus > t2
        tt = taus[leg1]
        out[leg1, 0] = s0[0] + speed * tt
        out[leg1, 1] = s0[1]
        out[leg1, 2] = s0[2]
        out[leg1, 3] = speed
        out[leg1, 4] = 0.0
        out[leg1, 5] = 0.0
        ang = wrate * (taus[arc] - t1)
        ca, sa = np.cos(ang), np.sin(ang)
        out[arc, 0] = centre[0] + fillet_radius * sa
        out[arc, 1] = centre[1] - fillet_radius * ca
        out[arc, 2] = centre[2]
        out[arc, 3] = speed * ca
        out[arc, 4] = speed * sa
        out[arc, 5] = 0.0
        tt = taus[leg2] - t2
        out[leg2, 0] = exit_pt[0]
        out[leg2, 1] = exit_pt[1] + speed * tt
        out[leg2, 2] = exit_pt[2]
        out[leg2, 3] = 0.0
        out[leg2, 4] = speed
        out[leg2, 5] = 0.0
        return out

    spec = {"speed": speed, "leg_length": leg_length,
            "fillet_radius": fillet_radius, "start": list(map(float, s0)),
            "psi_d": psi_d}
    return Maneuver("turn90", spec, point, batch, 0.0, t3, closed=False,
                    grid_step=grid_step, breakpoints=(t1, t2))


def hover(position=(0.0, 0.0, -1.0), psi_d: float = 0.0, duration: float = 10.0,
          grid_step: float = 0.01) -> Maneuver:
    """Constant reference point with zero velocity and acceleration."""
    if duration <= 0.0:
        raise ValueError("duration must be positive")
    p0 = _vec3(position)

    def point(tau):
        return ReferencePoint(p=p0.copy(), v=np.zeros(3), a=np.zeros(3),
                              psi=psi_d, psi_dot=0.0)

    def batch(taus):
        out = np.empty((taus.size, 7))
        out[:, 0:3] = p0
        out[:, 3:6] = 0.0
        out[:, 6] = psi_d
        return out

    spec = {"position": list(map(float, p0)), "psi_d": psi_d,
            "duration": duration}
    return Maneuver("hover", spec, point, batch, 0.0, duration, closed=False,
                    grid_step=grid_step)


@dataclass(frozen=True)
class DerivativeReport:
    checked: int
    max_velocity_error: float
    max_acceleration_error: float
    tau_worst_velocity: float
    tau_worst_acceleration: float


def validate_derivatives(m: Maneuver, dt: float = 1e-4, tol: float = 1e-6,
                         max_checks: int = 500) -> DerivativeReport:
    """Check v against dp/dtau and a against dv/dtau by central differences.

    Points within 2*dt of a declared acceleration breakpoint are skipped;
    the one-sided jumps there are real, not table errors. Raises
    DerivativeMismatchError when any checked point exceeds tol (central
    differencing itself contributes O(dt^2)).
    """
    if m.closed:
        taus = m.grid
    else:
        keep = (m.grid >= m.tau_min + dt) & (m.grid <= m.tau_max - dt)
        taus = m.grid[keep]
    for b in m.breakpoints:
        taus = taus[np.abs(taus - b) > 2.0 * dt]
    if taus.size > max_checks:
        taus = taus[:: taus.size // max_checks + 1]
    if taus.size == 0:
        raise ValueError("no interior points available to check")

    zp = m.state_batch(taus + dt)
    zm = m.state_batch(taus - dt)
    v_fd = (zp[:, 0:3] - zm[:, 0:3]) / (2.0 * dt)
    a_fd = (zp[:, 3:6] - zm[:, 3:6]) / (2.0 * dt)
    v_ref = np.empty_like(v_fd)
    a_ref = np.empty_like(a_fd)
    for i, tau in enumerate(taus):
        ref = m.eval(tau)
        v_ref[i] = ref.v
        a_ref[i] = ref.a

    v_err = np.linalg.norm(v_fd - v_ref, axis=1)
    a_err = np.linalg.norm(a_fd - a_ref, axis=1)
    report = DerivativeReport(
        checked=int(taus.size),
        max_velocity_error=float(v_err.max()),
        max_acceleration_error=float(a_err.max()),
        tau_worst_velocity=float(taus[v_err.argmax()]),
        tau_worst_acceleration=float(taus[a_err.argmax()]),
    )
    bad = np.where((v_err > tol) | (a_err > tol))[0]
    if bad.size:
        shown = ", ".join(f"{taus[i]:.6f}" for i in bad[:10])
        raise DerivativeMismatchError(
            f"{m.kind}: derivative check failed at {bad.size} of {taus.size} "
            f"points (first offenders tau = {shown}); "
            f"max velocity error {report.max_velocity_error:.3e}, "
            f"max acceleration error {report.max_acceleration_error:.3e}")
    return report


def nominal_input(ref: ReferencePoint, params: VehicleParams) -> ControlInput:
    """Open-loop input that realizes the reference acceleration exactly."""
    from .tracking import VirtualInput, feedback_linearize
    mu = VirtualInput(mu_p=ref.a.copy(), mu_psi=ref.psi_dot)
    return feedback_linearize(mu, ref.psi, params)


def export_table(m: Maneuver, path) -> None:
    """Write the full reference table (tau plus 11 reference columns) as CSV."""
    cols = ("tau", "pd1", "pd2", "pd3", "vd1", "vd2", "vd3",
            "ad1", "ad2", "ad3", "psid", "psidotd")
    with open(path, "w") as fh:
        fh.write("# schema_version: 1\n")
        fh.write(",".join(cols) + "\n")
        for tau in m.grid:
            ref = m.eval(tau)
            row = [tau, *ref.p, *ref.v, *ref.a, ref.psi, ref.psi_dot]
            fh.write(",".join(repr(float(x)) for x in row) + "\n")
