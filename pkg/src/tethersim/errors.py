"""Exception types shared across the package."""

from __future__ import annotations


class TetherSimError(Exception):
    """Base class for all tethersim errors."""


class ConfigError(TetherSimError):
    """Invalid configuration. Carries the offending field name."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class TrajectoryFormatError(ConfigError):
    """Malformed hand-trajectory data. Carries a 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__("trajectory", f"{message}{where}")


class DegenerateTetherError(TetherSimError):
    """Tether endpoints coincide; the force direction is undefined."""


class InfeasibleForceError(TetherSimError):
    """Commanded finger force cannot be rendered through a pulling tether."""


class SchedulingError(TetherSimError):
    """Sensor sampled off the fixed sampling grid."""


class SequencingError(TetherSimError):
    """Frames passed out of order to a consumer that needs consecutive frames."""


class SimulationFault(TetherSimError):
    """Simulation produced a non-finite or degenerate state.

    Carries the tick index, simulation time and a diagnostic payload so the
    offending step can be reconstructed.
    """

    def __init__(self, message: str, tick: int | None = None,
                 time: float | None = None, diagnostics: object = None):
        self.tick = tick
        self.time = time
        self.diagnostics = diagnostics
        prefix = ""
        if tick is not None:
            prefix = f"tick {tick}" + (f" (t={time:.6f} s)" if time is not None else "") + ": "
        super().__init__(prefix + message)
