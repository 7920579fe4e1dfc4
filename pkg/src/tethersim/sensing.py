"""Motion-capture emulation: fixed-rate pose sampling with seeded noise and latency.

The emulator samples ground-truth drone and finger poses on a fixed grid,
perturbs them with Gaussian noise from per-body deterministic substreams, and
emits frames whose contents lag by a configurable whole number of sampling
periods. Velocities are not measured; consumers finite-difference consecutive
frames.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import quaternions as quat
from .errors import SchedulingError, SequencingError

# Substream namespaces so adding a body never perturbs another body's noise.
_DRONE_STREAM = 1000
_FINGER_STREAM = 2000
_TETHER_STREAM = 3000


@dataclass(frozen=True)
class MocapConfig:
    """Sampling rate, noise magnitudes, latency and the noise seed.

    latency must be a whole number of sampling periods. tension_noise_std
    perturbs the measured leash force fed to the controllers (off by default).
    A seed of None defers to the simulation-level seed.
    """

    rate: float = 100.0
    position_noise_std: float = 0.0005
    attitude_noise_std: float = math.radians(0.2)
    latency: float = 0.01
    seed: int | None = None
    tension_noise_std: float = 0.0

    def __post_init__(self):
        if not self.rate > 0.0:
            raise ValueError("rate must be > 0")
        if self.position_noise_std < 0.0 or self.attitude_noise_std < 0.0 \
                or self.tension_noise_std < 0.0:
            raise ValueError("noise standard deviations must be >= 0")
        if self.latency < 0.0:
            raise ValueError("latency must be >= 0")
        steps = self.latency * self.rate
        if abs(steps - round(steps)) > 1e-9:
            raise ValueError("latency must be an integer multiple of the sampling period")

    @property
    def period(self) -> float:
        return 1.0 / self.rate

    @property
    def latency_steps(self) -> int:
        return int(round(self.latency * self.rate))


@dataclass(frozen=True)
class MocapFrame:
    """One emitted measurement frame.

    index increments by exactly one per frame and timestamp == index * period.
    With nonzero latency the payload describes the world latency_steps frames
    earlier (clamped to the first measurement at startup).
    """

    index: int
    timestamp: float
    period: float
    drone_positions: np.ndarray     # (n_drones, 3)
    drone_orientations: np.ndarray  # (n_drones, 4)
    finger_positions: np.ndarray    # (5, 3)


def _body_rng(seed: int, stream: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, stream, index]))


class MocapEmulator:
    """Owns the noise streams and the latency delay line for one run.

    sample() must be called once per grid point in order; reads of emitted
    frames are side-effect free.
    """

    def __init__(self, config: MocapConfig, n_drones: int, seed: int | None = None):
        self.config = config
        self.n_drones = n_drones
        resolved = config.seed if config.seed is not None else (seed or 0)
        self.seed = int(resolved)
        self._drone_rngs = [_body_rng(self.seed, _DRONE_STREAM, i)
                            for i in range(n_drones)]
        self._finger_rngs = [_body_rng(self.seed, _FINGER_STREAM, i) for i in range(5)]
        self._tether_rngs: dict[int, np.random.Generator] = {}
        self._next_index = 0
        self._buffer: list[tuple[np.ndarray, np.ndarray, np.ndarray]] = []

    def sample(self, drone_positions, drone_orientations, finger_positions,
               t: float) -> MocapFrame:
        """Measure the given ground truth at grid time t and emit the delayed frame.

        Zero-noise configurations pass positions and orientations through
        bit-exactly. Off-grid or out-of-order times raise SchedulingError.
        """
        cfg = self.config
        k = self._next_index
        if abs(t - k * cfg.period) > 1e-9:
            raise SchedulingError(
                f"sample at t={t!r} is off the sampling grid (expected index {k})")
        dp = np.array(drone_positions, dtype=float)
        dq = np.array(drone_orientations, dtype=float)
        fp = np.array(finger_positions, dtype=float)

        if cfg.position_noise_std > 0.0:
            for i in range(self.n_drones):
                dp[i] += self._drone_rngs[i].normal(0.0, cfg.position_noise_std, 3)
            for i in range(5):
                fp[i] += self._finger_rngs[i].normal(0.0, cfg.position_noise_std, 3)
        if cfg.attitude_noise_std > 0.0:
            for i in range(self.n_drones):
                delta = self._drone_rngs[i].normal(0.0, cfg.attitude_noise_std, 3)
                dq[i] = quat.multiply(dq[i], quat.from_rotation_vector(delta))

        self._buffer.append((dp, dq, fp))
        emit = self._buffer[max(0, k - cfg.latency_steps)]
        # Delay line only needs the last latency_steps entries; trim lazily.
        if len(self._buffer) > cfg.latency_steps + 1:
            self._buffer.pop(0)
        self._next_index = k + 1
        return MocapFrame(k, k * cfg.period, cfg.period, emit[0], emit[1], emit[2])

    def tension_noise(self, entry_index: int) -> np.ndarray:
        """Per-leash additive noise on the measured force (zero vector when off)."""
        if self.config.tension_noise_std <= 0.0:
            return np.zeros(3)
        rng = self._tether_rngs.get(entry_index)
        if rng is None:
            rng = _body_rng(self.seed, _TETHER_STREAM, entry_index)
            self._tether_rngs[entry_index] = rng
        return rng.normal(0.0, self.config.tension_noise_std, 3)


def finite_difference_velocity(first: MocapFrame, second: MocapFrame
                               ) -> tuple[np.ndarray, np.ndarray]:
    """Velocity estimates (p2 - p1) * rate for drones and fingers.

    Frames must be consecutive (second.index == first.index + 1).
    """
    if second.index != first.index + 1:
        raise SequencingError(
            f"frames are not consecutive: {first.index} -> {second.index}")
    rate = 1.0 / second.period
    drone_vel = (second.drone_positions - first.drone_positions) * rate
    finger_vel = (second.finger_positions - first.finger_positions) * rate
    return drone_vel, finger_vel


def finite_difference_body_rates(first: MocapFrame, second: MocapFrame) -> np.ndarray:
    """Body angular rates from consecutive orientation measurements."""
    if second.index != first.index + 1:
        raise SequencingError(
            f"frames are not consecutive: {first.index} -> {second.index}")
    rate = 1.0 / second.period
    n = first.drone_orientations.shape[0]
    out = np.zeros((n, 3))
    for i in range(n):
        q_rel = quat.multiply(quat.conjugate(first.drone_orientations[i]),
                              second.drone_orientations[i])
        out[i] = quat.to_rotation_vector(q_rel) * rate
    return out
