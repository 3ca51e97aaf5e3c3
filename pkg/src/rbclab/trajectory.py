"""Trajectory container and CSV format shared by the spectral models."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .state import SpectralState

__all__ = ["Trajectory", "write_trajectory_csv", "read_trajectory_csv"]

CSV_COLUMNS = ["t", "X", "Y", "Z", "E_K", "E_P", "E_T", "Q", "V"]


@dataclass
class Trajectory:
    """Sampled diagnostics of a spectral integration.

    All arrays share one uniform time axis.  `final_state` is the state at the
    last completed step; `snapshots` optionally holds (t, state) pairs at the
    sampling cadence.
    """

    t: np.ndarray
    X: np.ndarray
    Y: np.ndarray
    Z: np.ndarray
    E_K: np.ndarray
    E_P: np.ndarray
    E_T: np.ndarray
    Q: np.ndarray
    V: np.ndarray
    final_state: SpectralState | None = None
    snapshots: list[tuple[float, SpectralState]] = field(default_factory=list)

    def __len__(self) -> int:
        return self.t.size

    def window(self, t_min: float = -np.inf, t_max: float = np.inf) -> "Trajectory":
        """Sub-trajectory with t_min < t <= t_max (diagnostic arrays only)."""
        keep = (self.t > t_min) & (self.t <= t_max)
        if not np.any(keep):
            raise ValueError(f"no samples left in ({t_min}, {t_max}]")
        return Trajectory(
            t=self.t[keep],
            X=self.X[keep],
            Y=self.Y[keep],
            Z=self.Z[keep],
            E_K=self.E_K[keep],
            E_P=self.E_P[keep],
            E_T=self.E_T[keep],
            Q=self.Q[keep],
            V=self.V[keep],
            final_state=self.final_state,
            snapshots=[(ts, s) for ts, s in self.snapshots if t_min < ts <= t_max],
        )


def write_trajectory_csv(path: str, traj: Trajectory) -> None:
    """CSV with columns t,X,Y,Z,E_K,E_P,E_T,Q,V (header mandatory)."""
    cols = [getattr(traj, c) for c in CSV_COLUMNS]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_COLUMNS)
        for row in zip(*cols):
            w.writerow([repr(float(v)) for v in row])


def read_trajectory_csv(path: str) -> Trajectory:
    data = np.genfromtxt(path, delimiter=",", names=True)
    if data.shape == ():
        data = data.reshape(1)
    kwargs = {c: np.atleast_1d(data[c]) for c in CSV_COLUMNS}
    return Trajectory(**kwargs)
