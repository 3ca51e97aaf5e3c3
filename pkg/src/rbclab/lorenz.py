"""The classic three-variable Lorenz system.

    dX/dtau = sigma*(Y - X)
    dY/dtau = r*X - Y - X*Z
    dZ/dtau = X*Y - b*Z

with tau = (alpha^2 + beta^2)*t the rescaled time.  The default integrator is
the same IMEX Euler used for the spectral models (full linear operator
implicit, nonlinear terms forward Euler), which makes the equivalence with the
(L, M) = (1, 2) spectral truncation exact up to roundoff.  A classical RK4
stepper is available for accuracy cross-checks.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .params import Params
from .state import LorenzState, PhysicalFields
from .transforms import lorenz_to_spectral, synthesize

__all__ = [
    "LorenzTrajectory",
    "lorenz_rhs",
    "lorenz_jacobian",
    "lorenz_fixed_points",
    "integrate_lorenz",
    "tau_of_t",
    "t_of_tau",
    "reconstruct_fields",
    "write_lorenz_csv",
    "read_lorenz_csv",
]


@dataclass
class LorenzTrajectory:
    """Uniformly sampled (X, Y, Z)(tau) trajectory."""

    tau: np.ndarray
    X: np.ndarray
    Y: np.ndarray
    Z: np.ndarray
    dtau: float

    def state(self, i: int) -> LorenzState:
        return LorenzState(self.X[i], self.Y[i], self.Z[i], tau=self.tau[i])

    def t(self, p: Params) -> np.ndarray:
        """Unscaled time axis t = tau / (alpha^2 + beta^2)."""
        return self.tau / p.kappa2_11


def lorenz_rhs(s: LorenzState, p: Params) -> tuple[float, float, float]:
    """(dX/dtau, dY/dtau, dZ/dtau)."""
    return (
        p.sigma * (s.Y - s.X),
        p.r * s.X - s.Y - s.X * s.Z,
        s.X * s.Y - p.b * s.Z,
    )


def lorenz_jacobian(s: LorenzState, p: Params) -> np.ndarray:
    return np.array(
        [
            [-p.sigma, p.sigma, 0.0],
            [p.r - s.Z, -1.0, -s.X],
            [s.Y, s.X, -p.b],
        ]
    )


def lorenz_fixed_points(p: Params) -> list[tuple[float, float, float]]:
    """Origin always; the convective pair (+-sqrt(b(r-1)), ..., r-1) for r > 1."""
    pts = [(0.0, 0.0, 0.0)]
    if p.r > 1.0:
        c = float(np.sqrt(p.b * (p.r - 1.0)))
        pts.append((c, c, p.r - 1.0))
        pts.append((-c, -c, p.r - 1.0))
    return pts


def tau_of_t(t: float, p: Params) -> float:
    return t * p.kappa2_11


def t_of_tau(tau: float, p: Params) -> float:
    return tau / p.kappa2_11


def integrate_lorenz(
    s0: LorenzState,
    tau_end: float,
    dtau: float,
    p: Params,
    method: str = "imex",
) -> LorenzTrajectory:
    """Advance from s0.tau to s0.tau + tau_end in uniform steps dtau.

    method "imex": linear operator [[-sigma, sigma, 0], [r, -1, 0], [0, 0, -b]]
    implicit (backward Euler), nonlinear terms (0, -XZ, XY) forward Euler.
    method "rk4": classical 4th-order explicit scheme.

    Raises:
        FloatingPointError: if the state becomes non-finite.
    """
    if dtau <= 0:
        raise ValueError("dtau must be positive")
    n = int(round(tau_end / dtau))
    X = np.empty(n + 1)
    Y = np.empty(n + 1)
    Z = np.empty(n + 1)
    X[0], Y[0], Z[0] = s0.X, s0.Y, s0.Z
    x, y, z = s0.X, s0.Y, s0.Z
    sig, r, b = p.sigma, p.r, p.b

    if method == "imex":
        # precomputed inverse of I - dtau*A; the (X, Y) block is 2x2, Z decouples
        det = (1.0 + dtau * sig) * (1.0 + dtau) - dtau * dtau * sig * r
        i00 = (1.0 + dtau) / det
        i01 = dtau * sig / det
        i10 = dtau * r / det
        i11 = (1.0 + dtau * sig) / det
        izz = 1.0 / (1.0 + dtau * b)
        for k in range(1, n + 1):
            rx = x
            ry = y + dtau * (-x * z)
            rz = z + dtau * (x * y)
            x, y = i00 * rx + i01 * ry, i10 * rx + i11 * ry
            z = izz * rz
            X[k], Y[k], Z[k] = x, y, z
    elif method == "rk4":
        for k in range(1, n + 1):
            k1 = _rhs(x, y, z, sig, r, b)
            k2 = _rhs(x + 0.5 * dtau * k1[0], y + 0.5 * dtau * k1[1], z + 0.5 * dtau * k1[2], sig, r, b)
            k3 = _rhs(x + 0.5 * dtau * k2[0], y + 0.5 * dtau * k2[1], z + 0.5 * dtau * k2[2], sig, r, b)
            k4 = _rhs(x + dtau * k3[0], y + dtau * k3[1], z + dtau * k3[2], sig, r, b)
            x += dtau / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
            y += dtau / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
            z += dtau / 6.0 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])
            X[k], Y[k], Z[k] = x, y, z
    else:
        raise ValueError(f"unknown method {method!r}")

    if not (np.isfinite(x) and np.isfinite(y) and np.isfinite(z)):
        raise FloatingPointError("Lorenz integration diverged (non-finite state)")
    tau = s0.tau + dtau * np.arange(n + 1)
    return LorenzTrajectory(tau=tau, X=X, Y=Y, Z=Z, dtau=dtau)


def _rhs(x, y, z, sig, r, b):
    return (sig * (y - x), r * x - y - x * z, x * y - b * z)


def reconstruct_fields(s: LorenzState, p: Params, N_x: int, N_z: int) -> PhysicalFields:
    """Physical fields psi^(Lo), theta^(Lo) carried by the Lorenz amplitudes."""
    spec = lorenz_to_spectral(s.X, s.Y, s.Z, p, t=t_of_tau(s.tau, p))
    return synthesize(spec, p, N_x, N_z)


def write_lorenz_csv(path: str, traj: LorenzTrajectory, p: Params) -> None:
    """Trajectory CSV with columns tau,t,X,Y,Z."""
    t = traj.t(p)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["tau", "t", "X", "Y", "Z"])
        for i in range(traj.tau.size):
            w.writerow(
                [repr(float(v)) for v in (traj.tau[i], t[i], traj.X[i], traj.Y[i], traj.Z[i])]
            )


def read_lorenz_csv(path: str) -> LorenzTrajectory:
    data = np.genfromtxt(path, delimiter=",", names=True)
    tau = np.atleast_1d(data["tau"])
    dtau = float(tau[1] - tau[0]) if tau.size > 1 else 0.0
    return LorenzTrajectory(
        tau=tau,
        X=np.atleast_1d(data["X"]),
        Y=np.atleast_1d(data["Y"]),
        Z=np.atleast_1d(data["Z"]),
        dtau=dtau,
    )
