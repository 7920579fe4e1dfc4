"""Hand trajectory playback: time-indexed fingertip positions and velocities.

Trajectories are sparse samples of the five fingertip positions; playback
interpolates linearly and differentiates the interpolant analytically, so a
handful of keyframes describes a press-and-hold motion exactly. Queries before
the first or after the last sample clamp to the endpoint with zero velocity.
"""

from __future__ import annotations

import io
from pathlib import Path

import numpy as np

from .errors import TrajectoryFormatError
from .scene import FINGER_NAMES, Hand, N_FINGERS

CSV_COLUMNS = ["t"] + [f"{name}_{axis}" for name in FINGER_NAMES for axis in "xyz"]


class HandTrajectory:
    """Piecewise-linear fingertip trajectory, sampled as a Hand at any time."""

    def __init__(self, times: np.ndarray, positions: np.ndarray):
        times = np.asarray(times, dtype=float)
        positions = np.asarray(positions, dtype=float)
        if times.ndim != 1 or len(times) == 0:
            raise TrajectoryFormatError("need at least one sample")
        if positions.shape != (len(times), N_FINGERS, 3):
            raise TrajectoryFormatError(
                f"positions must have shape (n, 5, 3), got {positions.shape}")
        if not np.all(np.isfinite(times)) or not np.all(np.isfinite(positions)):
            raise TrajectoryFormatError("samples must be finite")
        if np.any(np.diff(times) <= 0.0):
            bad = int(np.argmax(np.diff(times) <= 0.0))
            raise TrajectoryFormatError(
                f"timestamps must be strictly increasing (sample {bad + 1})")
        self.times = times
        self.positions = positions
        if len(times) > 1:
            dt = np.diff(times)[:, None, None]
            self._slopes = np.diff(positions, axis=0) / dt
        else:
            self._slopes = np.zeros((0, N_FINGERS, 3))

    @property
    def duration(self) -> float:
        return float(self.times[-1])

    def sample(self, t: float) -> Hand:
        times = self.times
        if t < times[0] or len(times) == 1:
            return Hand(self.positions[0], np.zeros((N_FINGERS, 3)))
        if t >= times[-1]:
            return Hand(self.positions[-1], np.zeros((N_FINGERS, 3)))
        seg = int(np.searchsorted(times, t, side="right")) - 1
        vel = self._slopes[seg]
        pos = self.positions[seg] + vel * (t - times[seg])
        return Hand(pos, vel)

    @classmethod
    def stationary(cls, finger_positions) -> "HandTrajectory":
        """Hand frozen at the given (5, 3) fingertip positions."""
        p = np.asarray(finger_positions, dtype=float)
        return cls(np.array([0.0]), p[None, :, :])


def load_hand_trajectory(source) -> HandTrajectory:
    """Parse a trajectory CSV (header t, thumb_x..little_z; SI units).

    source may be a path or an open text stream. Format errors carry the
    offending 1-based line number.
    """
    if hasattr(source, "read"):
        lines = source.read().splitlines()
    else:
        lines = Path(source).read_text().splitlines()
    rows = []
    times = []
    expected = 1 + 3 * N_FINGERS
    start = 0
    if lines and lines[0].strip() and not _is_numeric_row(lines[0]):
        header = [c.strip() for c in lines[0].split(",")]
        if len(header) != expected:
            raise TrajectoryFormatError(
                f"expected {expected} columns ({', '.join(CSV_COLUMNS[:2])}, ...), "
                f"got {len(header)}", line=1)
        start = 1
    for lineno, raw in enumerate(lines[start:], start=start + 1):
        text = raw.strip()
        if not text:
            continue
        parts = text.split(",")
        if len(parts) != expected:
            raise TrajectoryFormatError(
                f"expected {expected} columns, got {len(parts)}", line=lineno)
        try:
            values = [float(p) for p in parts]
        except ValueError as exc:
            raise TrajectoryFormatError(f"non-numeric value: {exc}", line=lineno)
        times.append(values[0])
        rows.append(np.array(values[1:]).reshape(N_FINGERS, 3))
        if len(times) >= 2 and times[-1] <= times[-2]:
            raise TrajectoryFormatError(
                f"timestamps must be strictly increasing "
                f"({times[-2]!r} then {times[-1]!r})", line=lineno)
    if not rows:
        raise TrajectoryFormatError("trajectory contains no samples")
    return HandTrajectory(np.array(times), np.stack(rows))


def write_hand_trajectory(path, trajectory: HandTrajectory) -> None:
    """Write a trajectory in the CSV format load_hand_trajectory reads."""
    buf = io.StringIO()
    buf.write(",".join(CSV_COLUMNS) + "\n")
    for t, frame in zip(trajectory.times, trajectory.positions):
        buf.write(",".join(repr(float(v)) for v in [t, *frame.ravel()]) + "\n")
    Path(path).write_text(buf.getvalue())


def _is_numeric_row(line: str) -> bool:
    first = line.split(",")[0].strip()
    try:
        float(first)
        return True
    except ValueError:
        return False
