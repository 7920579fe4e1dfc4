"""Virtual environment: surfaces, the five-fingertip hand, finger-to-drone
assignment policies, contact prediction, contact forces and activation logic."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence, Union

import numpy as np

from .control import Follow, SetpointMode, Tension
from .errors import ConfigError

FINGER_NAMES = ("thumb", "index", "middle", "ring", "little")
N_FINGERS = 5

# Group layout for the three-group policy: thumb alone, then the two
# anatomically adjacent pairs.
THREE_GROUPS = ((0,), (1, 2), (3, 4))


@dataclass(frozen=True)
class HorizontalPlane:
    """Horizontal virtual surface: a stiff plane patch at a fixed height.

    extent is (xmin, xmax, ymin, ymax) in m; contact forces follow the penalty
    law stiffness*depth + damping*approach_speed along +z_W.
    """

    height: float
    stiffness: float
    damping: float = 0.0
    extent: tuple[float, float, float, float] = (-1.0, 1.0, -1.0, 1.0)

    def __post_init__(self):
        if not self.stiffness > 0.0:
            raise ValueError("stiffness must be > 0")
        if self.damping < 0.0:
            raise ValueError("damping must be >= 0")
        xmin, xmax, ymin, ymax = self.extent
        if not (xmin < xmax and ymin < ymax):
            raise ValueError("extent must satisfy xmin < xmax and ymin < ymax")

    def contains_xy(self, x: float, y: float) -> bool:
        xmin, xmax, ymin, ymax = self.extent
        return xmin <= x <= xmax and ymin <= y <= ymax


VirtualSurface = HorizontalPlane  # only plane patches in v1; extension point


@dataclass(frozen=True)
class Hand:
    """Five fingertip kinematic states in W, ordered thumb..little."""

    positions: np.ndarray
    velocities: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.positions, dtype=float)
        v = np.asarray(self.velocities, dtype=float)
        if p.shape != (N_FINGERS, 3) or v.shape != (N_FINGERS, 3):
            raise ValueError("hand arrays must have shape (5, 3)")
        if not (np.all(np.isfinite(p)) and np.all(np.isfinite(v))):
            raise ValueError("hand states must be finite")
        object.__setattr__(self, "positions", p)
        object.__setattr__(self, "velocities", v)


class ContactStatus(enum.IntEnum):
    CLEAR = 0
    APPROACHING = 1
    IN_CONTACT = 2


@dataclass(frozen=True)
class ContactPrediction:
    """Outcome of constant-velocity lookahead for one finger against the scene."""

    finger: int
    status: ContactStatus
    time_to_contact: float = math.inf
    predicted_point: np.ndarray = field(default_factory=lambda: np.full(3, math.nan))
    depth: float = 0.0
    surface_index: int = -1


def predict_contact(finger: int, finger_pos, finger_vel, surface: HorizontalPlane,
                    horizon: float, surface_index: int = -1) -> ContactPrediction:
    """Constant-velocity extrapolation of one finger against one plane patch.

    Returns IN_CONTACT with the current depth when the finger is already at or
    below the plane inside the patch, APPROACHING with the crossing time when a
    descending finger will cross inside the patch within the horizon, and CLEAR
    otherwise.
    """
    if not horizon > 0.0:
        raise ValueError("horizon must be > 0")
    p = np.asarray(finger_pos, dtype=float)
    v = np.asarray(finger_vel, dtype=float)
    z_rel = p[2] - surface.height
    if z_rel <= 0.0 and surface.contains_xy(p[0], p[1]):
        point = np.array([p[0], p[1], surface.height])
        return ContactPrediction(finger, ContactStatus.IN_CONTACT, 0.0, point,
                                 -z_rel, surface_index)
    if z_rel > 0.0 and v[2] < 0.0:
        ttc = z_rel / (-v[2])
        point = p + v * ttc
        if ttc <= horizon and surface.contains_xy(point[0], point[1]):
            return ContactPrediction(finger, ContactStatus.APPROACHING, ttc,
                                     point, 0.0, surface_index)
    return ContactPrediction(finger, ContactStatus.CLEAR)


def best_prediction(finger: int, finger_pos, finger_vel,
                    surfaces: Sequence[HorizontalPlane],
                    horizon: float) -> ContactPrediction:
    """Most urgent prediction across surfaces: deepest contact, else soonest crossing."""
    best = ContactPrediction(finger, ContactStatus.CLEAR)
    for i, surface in enumerate(surfaces):
        pred = predict_contact(finger, finger_pos, finger_vel, surface, horizon, i)
        if pred.status == ContactStatus.IN_CONTACT:
            if best.status != ContactStatus.IN_CONTACT or pred.depth > best.depth:
                best = pred
        elif pred.status == ContactStatus.APPROACHING:
            if best.status == ContactStatus.CLEAR or (
                    best.status == ContactStatus.APPROACHING
                    and pred.time_to_contact < best.time_to_contact):
                best = pred
    return best


def desired_force(finger_pos, finger_vel, surface: HorizontalPlane,
                  max_force: float) -> np.ndarray:
    """Penalty contact force on the finger: (k*depth + c*max(0, -vz)) * z_W.

    Zero when the finger is not inside the surface patch; the magnitude is
    clamped to max_force.
    """
    p = np.asarray(finger_pos, dtype=float)
    depth = surface.height - p[2]
    if depth < 0.0 or not surface.contains_xy(p[0], p[1]):
        return np.zeros(3)
    approach = max(0.0, -float(np.asarray(finger_vel, dtype=float)[2]))
    magnitude = surface.stiffness * depth + surface.damping * approach
    return np.array([0.0, 0.0, min(magnitude, max_force)])


# --- finger/drone assignment ---------------------------------------------

@dataclass(frozen=True)
class OnePerFinger:
    """One drone per finger, identity mapping in index order."""


@dataclass(frozen=True)
class ThreeGroups:
    """Three drones: thumb, index+middle, ring+little."""


@dataclass(frozen=True)
class DualTether:
    """Two drones with different leash properties on one finger."""

    finger: int = 1

    def __post_init__(self):
        if not 0 <= self.finger < N_FINGERS:
            raise ValueError("finger index must be in [0, 5)")


AssignmentPolicy = Union[OnePerFinger, ThreeGroups, DualTether]


@dataclass(frozen=True)
class AssignmentEntry:
    """One leash: a drone serving a group of fingers (usually a single finger)."""

    drone_id: int
    fingers: tuple[int, ...]


@dataclass(frozen=True)
class FingerAssignment:
    """Set of leash entries; each active drone appears in exactly one entry."""

    entries: tuple[AssignmentEntry, ...]

    def __post_init__(self):
        drones = [e.drone_id for e in self.entries]
        if len(set(drones)) != len(drones):
            raise ValueError("each drone may appear in exactly one entry")
        for e in self.entries:
            if len(e.fingers) == 0:
                raise ValueError("every entry must cover at least one finger")
            for f in e.fingers:
                if not 0 <= f < N_FINGERS:
                    raise ValueError("finger index out of range")

    @property
    def drone_ids(self) -> tuple[int, ...]:
        return tuple(e.drone_id for e in self.entries)

    def drones_for_finger(self, finger: int) -> list[int]:
        return [e.drone_id for e in self.entries if finger in e.fingers]

    def entry_for_drone(self, drone_id: int) -> AssignmentEntry:
        for e in self.entries:
            if e.drone_id == drone_id:
                return e
        raise KeyError(drone_id)


def required_drones(policy: AssignmentPolicy) -> int:
    if isinstance(policy, OnePerFinger):
        return 5
    if isinstance(policy, ThreeGroups):
        return 3
    return 2


def assign_drones(drone_ids: Sequence[int], policy: AssignmentPolicy) -> FingerAssignment:
    """Build the finger assignment for a policy from the available drone ids."""
    need = required_drones(policy)
    if len(drone_ids) < need:
        raise ConfigError("assignment",
                          f"policy needs {need} drones, got {len(drone_ids)}")
    ids = list(drone_ids[:need])
    if isinstance(policy, OnePerFinger):
        entries = tuple(AssignmentEntry(ids[i], (i,)) for i in range(5))
    elif isinstance(policy, ThreeGroups):
        entries = tuple(AssignmentEntry(ids[g], THREE_GROUPS[g]) for g in range(3))
    else:
        entries = tuple(AssignmentEntry(ids[i], (policy.finger,)) for i in range(2))
    return FingerAssignment(entries)


def anchor_finger(entry: AssignmentEntry,
                  predictions: Sequence[ContactPrediction]) -> int:
    """Finger the entry's leash acts on right now.

    The deepest-penetrating member wins; with no contact, the member closest
    to crossing; idle groups anchor to their first member.
    """
    in_contact = [f for f in entry.fingers
                  if predictions[f].status == ContactStatus.IN_CONTACT]
    if in_contact:
        return max(in_contact, key=lambda f: predictions[f].depth)
    approaching = [f for f in entry.fingers
                   if predictions[f].status == ContactStatus.APPROACHING]
    if approaching:
        return min(approaching, key=lambda f: predictions[f].time_to_contact)
    return entry.fingers[0]


# --- activation ------------------------------------------------------------

@dataclass(frozen=True)
class ActivationParams:
    """Timing of the follow/tension transitions.

    lead_time: switch to tension this long before predicted contact.
    clear_hold: remain in tension until the group has been clear this long.
    ramp_time: linear ramp of the commanded force after activation.
    """

    lead_time: float = 0.3
    clear_hold: float = 0.1
    ramp_time: float = 0.05


@dataclass(frozen=True)
class DroneActivation:
    active: bool = False
    activated_at: float = 0.0
    last_trigger: float = -math.inf


ActivationState = Mapping[int, DroneActivation]


def activation_logic(predictions: Sequence[ContactPrediction],
                     desired_forces: Sequence[np.ndarray],
                     assignment: FingerAssignment,
                     state: ActivationState, t: float,
                     params: ActivationParams,
                     follow_offsets: Mapping[int, np.ndarray]
                     ) -> tuple[dict[int, SetpointMode], dict[int, DroneActivation]]:
    """Per-drone mode selection with hysteresis.

    A drone enters tension when any member finger is in contact or predicted
    to make contact within lead_time, and leaves only after its group has been
    clear for clear_hold. The commanded force is the deepest member's contact
    force, ramped linearly over ramp_time from activation. Each drone receives
    exactly one mode per call.
    """
    modes: dict[int, SetpointMode] = {}
    new_state: dict[int, DroneActivation] = {}
    for entry in assignment.entries:
        drone = entry.drone_id
        prev = state.get(drone, DroneActivation())
        trigger = any(
            predictions[f].status == ContactStatus.IN_CONTACT
            or (predictions[f].status == ContactStatus.APPROACHING
                and predictions[f].time_to_contact < params.lead_time)
            for f in entry.fingers)
        if trigger:
            activated_at = prev.activated_at if prev.active else t
            act = DroneActivation(True, activated_at, t)
        elif prev.active and (t - prev.last_trigger) < params.clear_hold:
            act = prev
        else:
            act = DroneActivation(False)
        new_state[drone] = act

        if act.active:
            anchor = anchor_finger(entry, predictions)
            force = np.asarray(desired_forces[anchor], dtype=float)
            if params.ramp_time > 0.0:
                force = force * min(1.0, (t - act.activated_at) / params.ramp_time)
            modes[drone] = Tension(force)
        else:
            modes[drone] = Follow(follow_offsets[drone])
    return modes, new_state
