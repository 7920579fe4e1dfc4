"""Rigid-body quadrotor model: rotor forces, thrust/moment mixing, allocation, 6-DOF stepping.

Conventions
-----------
Frames: the world frame W is inertial with z_W up; the body frame D is fixed to
the drone with z_D along the thrust axis. A state's ``orientation`` quaternion
maps D to W, so ``rotate(q, e_z)`` is the thrust direction expressed in W.

Rotor layout (plus configuration, indices 1..4 stored at 0..3): rotors 1 and 3
sit on the body x arm at (+L, 0, 0) and (-L, 0, 0); rotors 2 and 4 sit on the
body y arm at (0, +L, 0) and (0, -L, 0). Each rotor spinning at omega produces
thrust k_f * omega**2 along z_D and a shaft moment k_m * omega**2 about z_D.
The resulting control inputs are

    u1 = k_f * (w1^2 + w2^2 + w3^2 + w4^2)          total thrust
    u2 = k_f * L * (w2^2 - w4^2)                    roll moment (body x)
    u3 = k_f * L * (w3^2 - w1^2)                    pitch moment (body y)
    u4 = yaw moment (body z), convention dependent

Yaw conventions: with ``YawConvention.UNIFORM`` every rotor contributes
+k_m * omega**2 to u4, which makes the 4x4 speed-to-input map rank 3 (the u1
and u4 rows are proportional), so that map cannot be inverted and gives no
independent yaw authority. ``YawConvention.ALTERNATING`` models the usual
counter-rotating pairs, u4 = k_m * (w1^2 - w2^2 + w3^2 - w4^2), which is full
rank; allocation (``mix_inverse``) therefore always uses ALTERNATING and it is
the default for dynamics.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import quaternions as quat
from .errors import SimulationFault

GRAVITY = 9.81

_Z_W = np.array([0.0, 0.0, 1.0])


class YawConvention(enum.Enum):
    """Sign pattern of the rotor contributions to the yaw moment u4."""

    UNIFORM = "uniform"          # all four rotors add +k_m*w^2 (rank-3 map)
    ALTERNATING = "alternating"  # counter-rotating pairs (invertible map)


@dataclass(frozen=True)
class RotorParams:
    """Per-rotor actuation constants and speed limits (SI units).

    k_f: thrust coefficient, N s^2/rad^2; k_m: moment coefficient,
    N m s^2/rad^2; arm_length: rotor arm, m; omega limits in rad/s.
    """

    k_f: float
    k_m: float
    arm_length: float
    omega_min: float = 0.0
    omega_max: float = 2500.0

    def __post_init__(self):
        if not self.k_f > 0.0:
            raise ValueError("k_f must be > 0")
        if not self.k_m > 0.0:
            raise ValueError("k_m must be > 0")
        if not self.arm_length > 0.0:
            raise ValueError("arm_length must be > 0")
        if not 0.0 <= self.omega_min < self.omega_max:
            raise ValueError("rotor speed limits must satisfy 0 <= omega_min < omega_max")


@dataclass(frozen=True)
class RotorCommand:
    """Four rotor speeds w1..w4 in rad/s, never negative."""

    omega: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.omega, dtype=float)
        if w.shape != (4,):
            raise ValueError("omega must have shape (4,)")
        if not np.all(np.isfinite(w)):
            raise ValueError("omega must be finite")
        if np.any(w < 0.0):
            raise ValueError("rotor speeds must be non-negative")
        object.__setattr__(self, "omega", w)


@dataclass(frozen=True)
class ControlInput:
    """Collective thrust u1 (N) and body moments u2, u3, u4 (N m)."""

    u1: float
    u2: float
    u3: float
    u4: float

    def as_array(self) -> np.ndarray:
        return np.array([self.u1, self.u2, self.u3, self.u4])


@dataclass(frozen=True)
class RigidBodyState:
    """6-DOF state: position/velocity in W, unit quaternion D->W, body rates in D."""

    position: np.ndarray
    velocity: np.ndarray
    orientation: np.ndarray
    angular_velocity: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "position", np.asarray(self.position, dtype=float))
        object.__setattr__(self, "velocity", np.asarray(self.velocity, dtype=float))
        object.__setattr__(self, "orientation", np.asarray(self.orientation, dtype=float))
        object.__setattr__(self, "angular_velocity",
                           np.asarray(self.angular_velocity, dtype=float))

    def validate(self):
        for name in ("position", "velocity", "orientation", "angular_velocity"):
            v = getattr(self, name)
            if not np.all(np.isfinite(v)):
                raise ValueError(f"{name} must be finite")
        if self.position.shape != (3,) or self.velocity.shape != (3,) \
                or self.angular_velocity.shape != (3,):
            raise ValueError("vector components must have shape (3,)")
        if self.orientation.shape != (4,):
            raise ValueError("orientation must have shape (4,)")
        if abs(np.linalg.norm(self.orientation) - 1.0) > 1e-9:
            raise ValueError("orientation must be a unit quaternion (|q| = 1 within 1e-9)")

    def z_axis(self) -> np.ndarray:
        """Thrust axis z_D expressed in W."""
        return quat.rotate(self.orientation, _Z_W)


def level_state(position, velocity=(0.0, 0.0, 0.0)) -> RigidBodyState:
    """State with identity attitude and zero body rates at the given position."""
    return RigidBodyState(np.asarray(position, dtype=float),
                          np.asarray(velocity, dtype=float),
                          quat.identity(), np.zeros(3))


@dataclass(frozen=True)
class QuadrotorModel:
    """Mass/inertia plus rotor constants. Inertia is the diagonal of the body tensor.

    attach_point is the tether attachment expressed in D, default 1 cm below
    the center of mass on the body z axis.
    """

    mass: float = 0.027
    inertia: np.ndarray = field(default_factory=lambda: np.array([1.4e-5, 1.4e-5, 2.2e-5]))
    rotors: RotorParams = field(default_factory=lambda: RotorParams(
        k_f=1.7e-8, k_m=1.4e-10, arm_length=0.046, omega_min=0.0, omega_max=2500.0))
    attach_point: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, -0.01]))

    def __post_init__(self):
        object.__setattr__(self, "inertia", np.asarray(self.inertia, dtype=float))
        object.__setattr__(self, "attach_point", np.asarray(self.attach_point, dtype=float))
        if not self.mass > 0.0:
            raise ValueError("mass must be > 0")
        if self.inertia.shape != (3,) or not np.all(self.inertia > 0.0):
            raise ValueError("inertia diagonal entries must be > 0")
        if self.attach_point.shape != (3,):
            raise ValueError("attach_point must have shape (3,)")

    def max_thrust(self) -> float:
        return 4.0 * self.rotors.k_f * self.rotors.omega_max ** 2


def hover_speed(model: QuadrotorModel, gravity: float = GRAVITY) -> float:
    """Rotor speed at which total thrust balances weight: sqrt(m*g / (4*k_f))."""
    return math.sqrt(model.mass * gravity / (4.0 * model.rotors.k_f))


def rotor_thrust_moment(omega_i: float, params: RotorParams) -> tuple[float, float]:
    """Thrust k_f*w^2 (N) and shaft moment k_m*w^2 (N m) of a single rotor."""
    if not math.isfinite(omega_i) or omega_i < 0.0:
        raise ValueError("rotor speed must be finite and non-negative")
    w2 = omega_i * omega_i
    return params.k_f * w2, params.k_m * w2


def mixing_matrix(params: RotorParams,
                  convention: YawConvention = YawConvention.ALTERNATING) -> np.ndarray:
    """The 4x4 map from squared rotor speeds to (u1, u2, u3, u4)."""
    kf, km, L = params.k_f, params.k_m, params.arm_length
    if convention is YawConvention.UNIFORM:
        yaw_row = [km, km, km, km]
    else:
        yaw_row = [km, -km, km, -km]
    return np.array([
        [kf, kf, kf, kf],
        [0.0, kf * L, 0.0, -kf * L],
        [-kf * L, 0.0, kf * L, 0.0],
        yaw_row,
    ])


def mix_forward(cmd: RotorCommand, params: RotorParams,
                convention: YawConvention = YawConvention.ALTERNATING) -> ControlInput:
    """Map rotor speeds to control inputs.

    Computed row by row in closed form so the differential-moment identities
    u2 == k_f*L*(w2^2 - w4^2) and u3 == k_f*L*(w3^2 - w1^2) hold exactly.
    """
    w1, w2, w3, w4 = cmd.omega
    a1, a2, a3, a4 = w1 * w1, w2 * w2, w3 * w3, w4 * w4
    kf, km, L = params.k_f, params.k_m, params.arm_length
    u1 = kf * (a1 + a2 + a3 + a4)
    u2 = kf * L * (a2 - a4)
    u3 = kf * L * (a3 - a1)
    if convention is YawConvention.UNIFORM:
        u4 = km * (a1 + a2 + a3 + a4)
    else:
        u4 = km * (a1 - a2 + a3 - a4)
    return ControlInput(u1, u2, u3, u4)


def mix_inverse(u: ControlInput, params: RotorParams) -> tuple[RotorCommand, bool]:
    """Allocate control inputs to rotor speeds (ALTERNATING convention only;
    the UNIFORM map is rank 3 and has no inverse).

    Solves the 4x4 system in closed form, clamps squared speeds to
    [omega_min^2, omega_max^2], and reports whether any clamp was applied.
    """
    arr = (u.u1, u.u2, u.u3, u.u4)
    if not all(math.isfinite(v) for v in arr):
        raise ValueError("control input must be finite")
    if u.u1 < 0.0:
        raise ValueError("u1 must be non-negative")
    kf, km, L = params.k_f, params.k_m, params.arm_length
    # Pair sums from the thrust and yaw rows, pair differences from u2/u3.
    s13 = 0.5 * (u.u1 / kf + u.u4 / km)
    s24 = 0.5 * (u.u1 / kf - u.u4 / km)
    d24 = u.u2 / (kf * L)
    d31 = u.u3 / (kf * L)
    a = np.array([
        0.5 * (s13 - d31),
        0.5 * (s24 + d24),
        0.5 * (s13 + d31),
        0.5 * (s24 - d24),
    ])
    lo = params.omega_min ** 2
    hi = params.omega_max ** 2
    saturated = bool(np.any(a < lo) or np.any(a > hi))
    a = np.clip(a, lo, hi)
    return RotorCommand(np.sqrt(a)), saturated


def step_dynamics(state: RigidBodyState, cmd: RotorCommand,
                  external_force_W: np.ndarray, external_torque_D: np.ndarray,
                  model: QuadrotorModel, gravity: float, dt: float,
                  convention: YawConvention = YawConvention.ALTERNATING) -> RigidBodyState:
    """One fixed semi-implicit Euler step of the Newton-Euler dynamics.

    Thrust u1 acts along z_D; gravity along -z_W; the external force (the
    tether reaction, given in W) acts at the attachment point and contributes
    the torque attach_point x F in D. Velocities update first, then positions
    use the updated velocities; the quaternion is advanced by the exponential
    map of the new body rate and renormalized. Pure function of its arguments.
    """
    if not dt > 0.0:
        raise ValueError("dt must be > 0")
    u = mix_forward(cmd, model.rotors, convention)
    R = quat.to_matrix(state.orientation)
    f_ext = np.asarray(external_force_W, dtype=float)

    accel = (u.u1 * R[:, 2] + f_ext) / model.mass
    accel[2] -= gravity

    omega = state.angular_velocity
    torque = np.array([u.u2, u.u3, u.u4]) + np.asarray(external_torque_D, dtype=float)
    torque += np.cross(model.attach_point, R.T @ f_ext)
    torque -= np.cross(omega, model.inertia * omega)

    vel = state.velocity + accel * dt
    pos = state.position + vel * dt
    omega_new = omega + (torque / model.inertia) * dt
    q_new = quat.multiply(state.orientation, quat.from_rotation_vector(omega_new * dt))
    q_new = quat.normalize(q_new)

    out = RigidBodyState(pos, vel, q_new, omega_new)
    if not (np.all(np.isfinite(pos)) and np.all(np.isfinite(vel))
            and np.all(np.isfinite(q_new)) and np.all(np.isfinite(omega_new))):
        raise SimulationFault("dynamics produced a non-finite state",
                              diagnostics={"state": state, "command": cmd,
                                           "external_force_W": f_ext})
    return out


def tilt_angle(orientation: np.ndarray) -> float:
    """Angle between z_D and z_W in radians."""
    z = quat.rotate(orientation, _Z_W)
    return math.atan2(math.hypot(z[0], z[1]), z[2])
