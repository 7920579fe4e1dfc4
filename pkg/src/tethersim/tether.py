"""Leash mechanics between a fingertip and a drone's bottom-center attachment.

Two leash kinds share one force interface: an elastic leash is a tension-only
spring-damper; a non-stretchable leash is realized as a stiff unilateral
penalty (taut constraint approximated by large stiffness plus damping). Both
pull only, never push, and always produce an equal-and-opposite force pair.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateTetherError


class TetherKind(enum.Enum):
    ELASTIC = "elastic"
    INEXTENSIBLE = "inextensible"


@dataclass(frozen=True)
class TetherParams:
    """Leash kind plus rest length and the stiffness/damping of its force law.

    stiffness/damping apply to ELASTIC leashes; constraint_stiffness and
    constraint_damping are the penalty constants of the INEXTENSIBLE model.
    """

    kind: TetherKind = TetherKind.ELASTIC
    rest_length: float = 0.5
    stiffness: float = 50.0
    damping: float = 1.0
    constraint_stiffness: float = 2000.0
    constraint_damping: float = 10.0

    def __post_init__(self):
        if not self.rest_length > 0.0:
            raise ValueError("rest_length must be > 0")
        if self.stiffness < 0.0 or self.damping < 0.0:
            raise ValueError("stiffness and damping must be >= 0")
        if self.constraint_stiffness < 0.0 or self.constraint_damping < 0.0:
            raise ValueError("constraint stiffness and damping must be >= 0")

    def spring_constant(self) -> float:
        if self.kind is TetherKind.ELASTIC:
            return self.stiffness
        return self.constraint_stiffness

    def spring_damping(self) -> float:
        if self.kind is TetherKind.ELASTIC:
            return self.damping
        return self.constraint_damping


@dataclass(frozen=True)
class TetherForce:
    """Force pair in W: on_finger + on_drone == 0, |on_finger| == tension >= 0.

    taut is geometric (separation exceeds rest length); tension can still be
    zero while taut when the leash is slackening fast.
    """

    on_finger: np.ndarray
    on_drone: np.ndarray
    tension: float
    taut: bool


ZERO_FORCE = TetherForce(np.zeros(3), np.zeros(3), 0.0, False)


def tether_force(attach_pos_W, attach_vel_W, finger_pos_W, finger_vel_W,
                 params: TetherParams) -> TetherForce:
    """Tension-only force pair for the line from finger to attachment point.

    With separation d, stretch s = d - rest_length and stretch rate sdot along
    the line, tension = max(0, k*s + c*sdot) when s > 0 and zero otherwise,
    where k and c are the stiffness/damping of the leash kind. on_finger points
    from the finger toward the attachment; on_drone is its exact negation.
    """
    ax, ay, az = attach_pos_W
    fx, fy, fz = finger_pos_W
    dx, dy, dz = ax - fx, ay - fy, az - fz
    d = math.sqrt(dx * dx + dy * dy + dz * dz)
    if d <= 1e-9:
        raise DegenerateTetherError(
            f"tether endpoints coincide (separation {d:.3e} m)")
    s = d - params.rest_length
    taut = s > 0.0
    if not taut:
        return TetherForce(np.zeros(3), np.zeros(3), 0.0, False)
    ux, uy, uz = dx / d, dy / d, dz / d
    rvx = attach_vel_W[0] - finger_vel_W[0]
    rvy = attach_vel_W[1] - finger_vel_W[1]
    rvz = attach_vel_W[2] - finger_vel_W[2]
    sdot = rvx * ux + rvy * uy + rvz * uz
    tension = params.spring_constant() * s + params.spring_damping() * sdot
    if tension < 0.0:
        tension = 0.0
    on_finger = np.array([tension * ux, tension * uy, tension * uz])
    return TetherForce(on_finger, -on_finger, tension, True)


def sum_finger_forces(forces: list[TetherForce]) -> np.ndarray:
    """Net force on a finger from any number of leashes (empty list gives zero)."""
    total = np.zeros(3)
    for f in forces:
        total += f.on_finger
    return total
