"""Domain types: spectral states, physical fields, Lorenz states.

Spectral amplitudes are stored half-spectrum: only l = 0..L is kept, with the
negative-l half implied by conjugate symmetry (psi_hat[-l, m] = conj of
psi_hat[l, m]).  Consequently the l = 0 row must stay real.  The vertical
index runs m = 1..M; array column j holds mode m = j + 1 (the m = 0 sine
basis function vanishes identically and is excluded).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

__all__ = [
    "ModeIndex",
    "SpectralState",
    "PhysicalFields",
    "LorenzState",
    "zero_state",
    "x_grid",
    "z_grid",
    "save_snapshot",
    "load_snapshot",
    "write_snapshot_file",
    "read_snapshot_file",
]


class ModeIndex(NamedTuple):
    """Spectral mode index (l, m) with 0 <= l <= L and 1 <= m <= M."""

    l: int
    m: int


@dataclass
class SpectralState:
    """Complex mode amplitudes of streamfunction and temperature.

    Attributes:
        psi_hat: complex array of shape (L+1, M); psi_hat[l, m-1] is the
            amplitude of exp(i*l*alpha*x) * sin(m*beta*z).
        theta_hat: same layout for the temperature perturbation.
        t: simulation time.
    """

    psi_hat: np.ndarray
    theta_hat: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.psi_hat = np.asarray(self.psi_hat, dtype=complex)
        self.theta_hat = np.asarray(self.theta_hat, dtype=complex)
        if self.psi_hat.shape != self.theta_hat.shape:
            raise ValueError("psi_hat and theta_hat must have the same shape")
        if self.psi_hat.ndim != 2 or self.psi_hat.shape[1] < 2:
            raise ValueError(f"expected (L+1, M>=2) arrays, got shape {self.psi_hat.shape}")

    @property
    def L(self) -> int:
        return self.psi_hat.shape[0] - 1

    @property
    def M(self) -> int:
        return self.psi_hat.shape[1]

    def get_psi(self, l: int, m: int) -> complex:
        return complex(self.psi_hat[l, m - 1])

    def get_theta(self, l: int, m: int) -> complex:
        return complex(self.theta_hat[l, m - 1])

    def copy(self) -> "SpectralState":
        return SpectralState(self.psi_hat.copy(), self.theta_hat.copy(), self.t)

    def enforce_reality(self) -> None:
        """Zero the imaginary part of the l=0 row (conjugate symmetry)."""
        self.psi_hat[0] = self.psi_hat[0].real
        self.theta_hat[0] = self.theta_hat[0].real

    def reality_defect(self) -> float:
        """Largest |Im| on the l=0 row; zero for a valid half-spectrum state."""
        return max(
            float(np.max(np.abs(self.psi_hat[0].imag), initial=0.0)),
            float(np.max(np.abs(self.theta_hat[0].imag), initial=0.0)),
        )

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.psi_hat)) and np.all(np.isfinite(self.theta_hat)))


def zero_state(L: int, M: int, t: float = 0.0) -> SpectralState:
    """All-zero spectral state at truncation (L, M)."""
    shape = (L + 1, M)
    return SpectralState(np.zeros(shape, complex), np.zeros(shape, complex), t)


@dataclass
class PhysicalFields:
    """Streamfunction and temperature sampled on a collocation grid.

    The x grid is uniform on [0, l_x) excluding the right endpoint; the z grid
    holds the N_z uniform interior points of (0, 1).  Boundary rows (where the
    fields vanish) are added only when dumping fields to disk.
    """

    psi: np.ndarray  # (N_x, N_z)
    theta: np.ndarray
    x_coords: np.ndarray
    z_coords: np.ndarray
    t: float = 0.0

    @property
    def N_x(self) -> int:
        return self.psi.shape[0]

    @property
    def N_z(self) -> int:
        return self.psi.shape[1]


@dataclass
class LorenzState:
    """Lorenz amplitudes (X, Y, Z) at rescaled time tau = (alpha^2+beta^2)*t."""

    X: float
    Y: float
    Z: float
    tau: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.X, self.Y, self.Z])


def x_grid(N_x: int, l_x: float) -> np.ndarray:
    """Uniform streamwise grid on [0, l_x), right endpoint excluded."""
    return np.arange(N_x) * (l_x / N_x)


def z_grid(N_z: int) -> np.ndarray:
    """Uniform interior grid on (0, 1): z_i = (i+1)/(N_z+1)."""
    return np.arange(1, N_z + 1) / (N_z + 1)


# --- snapshot format -------------------------------------------------------
#
# A snapshot is a JSON document with keys {sigma, r, L, M, t, psi_hat,
# theta_hat}; psi_hat/theta_hat are (L+1) x M nested lists of [real, imag]
# pairs in row-major (l, m) order.  Python float repr gives the shortest
# decimal that round-trips bit-exactly (<= 17 significant digits).


def save_snapshot(s: SpectralState, sigma: float, r: float) -> str:
    """Serialize a spectral state to the snapshot JSON document."""
    doc = {
        "sigma": sigma,
        "r": r,
        "L": s.L,
        "M": s.M,
        "t": s.t,
        "psi_hat": [[[float(c.real), float(c.imag)] for c in row] for row in s.psi_hat],
        "theta_hat": [[[float(c.real), float(c.imag)] for c in row] for row in s.theta_hat],
    }
    return json.dumps(doc)


def load_snapshot(text: str) -> tuple[SpectralState, float, float]:
    """Inverse of :func:`save_snapshot`; returns (state, sigma, r)."""
    doc = json.loads(text)
    L, M = int(doc["L"]), int(doc["M"])
    psi = np.empty((L + 1, M), complex)
    theta = np.empty((L + 1, M), complex)
    for arr, key in ((psi, "psi_hat"), (theta, "theta_hat")):
        rows = doc[key]
        if len(rows) != L + 1 or any(len(row) != M for row in rows):
            raise ValueError(f"{key} has wrong shape for (L, M) = ({L}, {M})")
        for i, row in enumerate(rows):
            for j, (re, im) in enumerate(row):
                arr[i, j] = complex(re, im)
    return SpectralState(psi, theta, float(doc["t"])), float(doc["sigma"]), float(doc["r"])


def write_snapshot_file(path: str, s: SpectralState, sigma: float, r: float) -> None:
    """Atomic (write-then-rename) snapshot dump."""
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(save_snapshot(s, sigma, r))
    os.replace(tmp, path)


def read_snapshot_file(path: str) -> tuple[SpectralState, float, float]:
    with open(path) as fh:
        return load_snapshot(fh.read())
