"""Containers for measured or synthesized I-V sweep data.

All values are SI internally (volts, amperes). Unit conversion happens at
the file boundary in :mod:`egfet.dataio`.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import NonMonotoneGrid


def _as_grid(x, name):
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ValueError(f"{name} must be a non-empty 1-D array")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{name} contains non-finite values")
    if x.size > 1 and not np.all(np.diff(x) > 0):
        raise NonMonotoneGrid(f"{name} must be strictly increasing")
    return x


@dataclass
class GateSweep:
    """Drain current versus gate voltage at a fixed drain bias."""

    v_ds: float
    v_gs: np.ndarray
    i_ds: np.ndarray
    label: str = ""
    diagnostics: list = field(default_factory=list)

    def __post_init__(self):
        self.v_gs = _as_grid(self.v_gs, "v_gs")
        self.i_ds = np.asarray(self.i_ds, dtype=float)
        if self.i_ds.shape != self.v_gs.shape:
            raise ValueError("v_gs and i_ds must have the same length")
        if not np.all(np.isfinite(self.i_ds)):
            raise ValueError("i_ds contains non-finite values")
        if np.any(self.i_ds < 0):
            raise ValueError("i_ds contains negative values")

    def __len__(self):
        return self.v_gs.size


@dataclass
class DrainSweep:
    """Drain current versus drain voltage at one gate bias."""

    v_gs: float
    v_ds: np.ndarray
    i_ds: np.ndarray

    def __post_init__(self):
        self.v_ds = _as_grid(self.v_ds, "v_ds")
        self.i_ds = np.asarray(self.i_ds, dtype=float)
        if self.i_ds.shape != self.v_ds.shape:
            raise ValueError("v_ds and i_ds must have the same length")
        if not np.all(np.isfinite(self.i_ds)):
            raise ValueError("i_ds contains non-finite values")

    def __len__(self):
        return self.v_ds.size


@dataclass
class DrainSweepFamily:
    """A set of drain sweeps taken at different gate voltages."""

    sweeps: list
    label: str = ""
    diagnostics: list = field(default_factory=list)

    def __post_init__(self):
        self.sweeps = sorted(self.sweeps, key=lambda s: s.v_gs)
        gates = [s.v_gs for s in self.sweeps]
        if len(set(gates)) != len(gates):
            raise ValueError("duplicate gate voltages in family")

    def gate_voltages(self):
        return np.array([s.v_gs for s in self.sweeps])

    def __len__(self):
        return len(self.sweeps)
