"""Per-drone cascaded controller.

Two modes: FOLLOW keeps the drone hovering at an offset above its finger with
the leash slack; TENSION renders a commanded force on the finger through the
taut leash. Force is rendered primarily by the collective thrust along the
vertical: the drone parks above the finger at the spring length matching the
commanded tension, so thrust (the strongest input) carries the load while the
attitude stays near level.

All operations are pure functions: state in, command out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from . import quaternions as quat
from .errors import InfeasibleForceError
from .tether import TetherForce, TetherParams
from .vehicle import (ControlInput, QuadrotorModel, RigidBodyState,
                      RotorCommand, mix_inverse)

_Z_W = np.array([0.0, 0.0, 1.0])
_COS_45 = math.sqrt(0.5)


@dataclass(frozen=True)
class ControllerGains:
    """Position loop (kp 1/s^2, kd 1/s), attitude loop, and tension feedback gain."""

    kp_pos: float = 40.0
    kd_pos: float = 12.0
    kp_att: float = 900.0
    kd_att: float = 60.0
    kp_tension: float = 0.3

    def __post_init__(self):
        for name in ("kp_pos", "kd_pos", "kp_att", "kd_att", "kp_tension"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be >= 0")


@dataclass(frozen=True)
class Follow:
    """Hover at offset_W above the assigned finger; offset must point upward."""

    offset_W: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 0.4]))

    def __post_init__(self):
        object.__setattr__(self, "offset_W", np.asarray(self.offset_W, dtype=float))
        if self.offset_W.shape != (3,):
            raise ValueError("offset_W must have shape (3,)")
        if not self.offset_W[2] > 0.0:
            raise ValueError("follow offset must have a positive z component")


@dataclass(frozen=True)
class Tension:
    """Render commanded_force (N, in W) on the finger through the leash."""

    commanded_force: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "commanded_force",
                           np.asarray(self.commanded_force, dtype=float))
        if self.commanded_force.shape != (3,):
            raise ValueError("commanded_force must have shape (3,)")


SetpointMode = Union[Follow, Tension]


def position_controller(state: RigidBodyState, target_pos_W, target_vel_W,
                        feedforward_force_W, model: QuadrotorModel,
                        gains: ControllerGains, gravity: float
                        ) -> tuple[float, np.ndarray]:
    """PD position loop producing desired thrust magnitude and attitude.

    Desired world force: f = m*(kp*e_p + kd*e_v) + m*g*z_W + feedforward.
    u1 is |f| clamped to the rotor envelope; the desired attitude tilts z_D
    onto f/|f| with the yaw setpoint fixed at 0.
    """
    e_p = np.asarray(target_pos_W, dtype=float) - state.position
    e_v = np.asarray(target_vel_W, dtype=float) - state.velocity
    f_des = model.mass * (gains.kp_pos * e_p + gains.kd_pos * e_v)
    f_des = f_des + model.mass * gravity * _Z_W
    f_des = f_des + np.asarray(feedforward_force_W, dtype=float)

    n = math.sqrt(f_des[0] ** 2 + f_des[1] ** 2 + f_des[2] ** 2)
    if n < 1e-9:
        return 0.0, state.orientation.copy()
    u1 = min(max(n, 0.0), model.max_thrust())

    b3 = f_des / n
    x_c = np.array([1.0, 0.0, 0.0])  # yaw 0
    b2 = np.cross(b3, x_c)
    b2_norm = math.sqrt(b2[0] ** 2 + b2[1] ** 2 + b2[2] ** 2)
    if b2_norm < 1e-9:
        # f_des parallel to x_W (90 degree pitch); fall back to y_W
        b2 = np.array([0.0, 1.0, 0.0])
    else:
        b2 = b2 / b2_norm
    b1 = np.cross(b2, b3)
    R_des = np.column_stack((b1, b2, b3))
    return u1, quat.from_matrix(R_des)


def attitude_controller(state: RigidBodyState, attitude_des: np.ndarray,
                        model: QuadrotorModel, gains: ControllerGains
                        ) -> tuple[float, float, float]:
    """PD on the attitude error: torque = I * (kp*theta*axis - kd*omega).

    The error rotation is q_state^-1 * q_des on the canonical (shortest)
    branch, expressed as a rotation vector in body axes.
    """
    q_err = quat.multiply(quat.conjugate(state.orientation), attitude_des)
    rotvec = quat.to_rotation_vector(q_err)
    torque = model.inertia * (gains.kp_att * rotvec
                              - gains.kd_att * state.angular_velocity)
    return float(torque[0]), float(torque[1]), float(torque[2])


def tension_controller(drone_state: RigidBodyState, finger_pos_W, finger_vel_W,
                       measured: TetherForce, commanded_force,
                       model: QuadrotorModel, gains: ControllerGains,
                       tether: TetherParams
                       ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Turn a commanded finger force into a position target and feedforward.

    The target sits along the commanded direction at rest_length + stretch,
    where stretch is the leash extension whose spring tension equals the
    commanded magnitude, so the drone holds position exactly where the leash
    delivers the load. The feedforward is the commanded force plus a
    proportional correction on the measured delivery error.

    Only commanded forces within 45 degrees of vertical are accepted; a leash
    can only pull, so downward components are infeasible, and steeper-than-45
    directions are rejected as unsupported rather than rendered wrongly.
    """
    cf = np.asarray(commanded_force, dtype=float)
    n = math.sqrt(cf[0] ** 2 + cf[1] ** 2 + cf[2] ** 2)
    if n > 1e-12:
        if cf[2] < 0.0:
            raise InfeasibleForceError(
                "commanded force has a negative vertical component; a tether only pulls")
        if cf[2] < n * _COS_45:
            raise InfeasibleForceError(
                "commanded force lies more than 45 degrees from vertical")
        k = tether.spring_constant()
        if k <= 0.0:
            raise InfeasibleForceError(
                "leash has no stiffness; cannot realize a nonzero tension")
        direction = cf / n
        stretch = n / k
    else:
        direction = _Z_W
        stretch = 0.0

    finger_pos = np.asarray(finger_pos_W, dtype=float)
    target_pos = finger_pos + (tether.rest_length + stretch) * direction
    target_vel = np.asarray(finger_vel_W, dtype=float)
    feedforward = cf + gains.kp_tension * (cf - measured.on_finger)
    return target_pos, target_vel, feedforward


@dataclass(frozen=True)
class ControlStepResult:
    """Rotor command plus the pre-allocation inputs and diagnostics for logging."""

    command: RotorCommand
    control_input: ControlInput
    saturated: bool
    target_pos_W: np.ndarray


def control_step(mode: SetpointMode, drone_state: RigidBodyState,
                 finger_pos_W, finger_vel_W, measured: TetherForce,
                 model: QuadrotorModel, gains: ControllerGains,
                 tether: TetherParams, gravity: float) -> ControlStepResult:
    """One control tick: mode -> position loop -> attitude loop -> allocation."""
    if isinstance(mode, Follow):
        target_pos = np.asarray(finger_pos_W, dtype=float) + mode.offset_W
        target_vel = np.asarray(finger_vel_W, dtype=float)
        feedforward = np.zeros(3)
    else:
        target_pos, target_vel, feedforward = tension_controller(
            drone_state, finger_pos_W, finger_vel_W, measured,
            mode.commanded_force, model, gains, tether)

    u1, attitude_des = position_controller(
        drone_state, target_pos, target_vel, feedforward, model, gains, gravity)
    u2, u3, u4 = attitude_controller(drone_state, attitude_des, model, gains)
    u = ControlInput(u1, u2, u3, u4)
    cmd, saturated = mix_inverse(u, model.rotors)
    return ControlStepResult(cmd, u, saturated, target_pos)
