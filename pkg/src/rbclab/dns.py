"""Pseudospectral DNS of the streamfunction-temperature equations.

The vertical basis is the same sine (Fourier-Galerkin) family as the modal
expansion: the free-slip/isothermal boundary conditions are satisfied exactly
by every basis function and the discrete operators diagonalize, so the DNS is
a transform-accelerated high-order expansion of the same equations.  Nonlinear
terms are evaluated by dealiased pointwise products on a padded grid; time
stepping is implicit Euler on the linear terms with 2nd-order Adams-Bashforth
on the nonlinear terms (forward Euler on the bootstrap step).
"""

from __future__ import annotations

import json
import os
import warnings
from dataclasses import dataclass

import numpy as np

from .params import Params
from .pseudospectral import TransformPlan
from .state import PhysicalFields, SpectralState
from .stepping import DT_CEILING, LinearPropagator, StepperConfig, imex_integrate
from .trajectory import Trajectory
from .transforms import analyze, synthesize

__all__ = [
    "Grid",
    "default_grid",
    "nonlinear_terms",
    "cfl_dt",
    "step_dns",
    "integrate_dns",
    "write_field_dump",
    "read_field_dump",
]


@dataclass(frozen=True)
class Grid:
    """Collocation grid and internal truncation of the DNS.

    (L_eff, M_eff) is the retained spectrum; N_x, N_z is the padded product
    grid and must satisfy the dealiasing rule N_x >= pad*(2*L_eff+1),
    N_z >= pad*(M_eff+1) with pad >= 3/2.
    """

    N_x: int
    N_z: int
    L_eff: int
    M_eff: int
    dealias_pad: float = 1.5

    def __post_init__(self):
        if self.dealias_pad < 1.5:
            raise ValueError("dealias_pad must be >= 3/2")
        if self.N_x < self.dealias_pad * (2 * self.L_eff + 1):
            raise ValueError(f"N_x = {self.N_x} cannot dealias L_eff = {self.L_eff}")
        if self.N_z < self.dealias_pad * (self.M_eff + 1):
            raise ValueError(f"N_z = {self.N_z} cannot dealias M_eff = {self.M_eff}")


def default_grid(r: float) -> Grid:
    """Resolution tied to the forcing: (26, 26)/80 up to r = 100, (40, 40)/128 beyond."""
    if r <= 100.0:
        return Grid(N_x=80, N_z=80, L_eff=26, M_eff=26)
    return Grid(N_x=128, N_z=128, L_eff=40, M_eff=40)


def _plan(p: Params, g: Grid) -> TransformPlan:
    if p.L != g.L_eff or p.M != g.M_eff:
        raise ValueError(
            f"params truncation ({p.L}, {p.M}) does not match grid truncation "
            f"({g.L_eff}, {g.M_eff})"
        )
    return TransformPlan.cached(p, g.N_x, g.N_z)


def nonlinear_terms(f: PhysicalFields, p: Params, g: Grid) -> PhysicalFields:
    """Dealiased nonlinear terms of the two equations, on f's grid.

    Returns a PhysicalFields-shaped pair: .psi holds
    psi_z (lap psi)_x - psi_x (lap psi)_z, .theta holds
    psi_z theta_x - psi_x theta_z.
    """
    s = analyze(f, p)
    n_psi, n_theta = _plan(p, g).nonlinear(s.psi_hat, s.theta_hat)
    out = synthesize(SpectralState(n_psi, n_theta, f.t), p, f.N_x, f.N_z)
    return out


def cfl_dt(s: SpectralState, p: Params, g: Grid, safety: float = 1.0) -> float:
    """Advective CFL bound, capped at the stable-step ceiling 1e-4.

    dt <= safety * min(dx / max|u|, dz / max|w|) with u = -dpsi/dz,
    w = dpsi/dx on the collocation grid.
    """
    if not 0.0 < safety <= 1.0:
        raise ValueError("safety must lie in (0, 1]")
    plan = _plan(p, g)
    u, w = plan.velocity(s.psi_hat)
    dx = p.l_x / g.N_x
    dz = 1.0 / (g.N_z + 1)
    umax = float(np.max(np.abs(u)))
    wmax = float(np.max(np.abs(w)))
    bound = DT_CEILING
    if umax > 0:
        bound = min(bound, safety * dx / umax)
    if wmax > 0:
        bound = min(bound, safety * dz / wmax)
    return bound


def step_dns(
    s: SpectralState,
    p: Params,
    g: Grid,
    dt: float,
    n_prev: tuple[np.ndarray, np.ndarray] | None = None,
) -> tuple[SpectralState, tuple[np.ndarray, np.ndarray]]:
    """One DNS step; returns the new state and the nonlinear-term history.

    With n_prev from the previous step the nonlinear terms are extrapolated by
    2nd-order Adams-Bashforth; without history the step is forward Euler on
    the nonlinear terms (bootstrap).
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    plan = _plan(p, g)
    prop = LinearPropagator(p, dt, s.L, s.M)
    n_psi, n_theta = plan.nonlinear(s.psi_hat, s.theta_hat)
    if n_prev is not None:
        e_psi = 1.5 * n_psi - 0.5 * n_prev[0]
        e_theta = 1.5 * n_theta - 0.5 * n_prev[1]
    else:
        e_psi, e_theta = n_psi, n_theta
    rp = s.psi_hat + dt * (-e_psi * prop.inv_k2)
    rt = s.theta_hat + dt * e_theta
    ps, th = prop.apply(rp, rt)
    ps[0] = ps[0].real
    th[0] = th[0].real
    out = SpectralState(ps, th, s.t + dt)
    if not out.is_finite():
        raise FloatingPointError(f"non-finite amplitudes after DNS step at t = {out.t:.6g}")
    return out, (n_psi, n_theta)


def integrate_dns(
    s0: SpectralState,
    p: Params,
    g: Grid,
    cfg: StepperConfig,
    snapshots: bool = False,
    check_cfl: bool = True,
) -> Trajectory:
    """Time series of projected amplitudes, energies, and optional snapshots.

    The CFL bound is re-evaluated at every sample; a violated bound raises a
    warning (the run continues with the configured dt).
    """
    plan = _plan(p, g)
    warned = [False]

    def monitor(k: int, ps: np.ndarray, th: np.ndarray) -> None:
        if not check_cfl or warned[0]:
            return
        bound = cfl_dt(SpectralState(ps, th, 0.0), p, g)
        if cfg.dt > bound:
            warnings.warn(
                f"dt = {cfg.dt:g} exceeds the CFL bound {bound:g} at step {k}",
                RuntimeWarning,
                stacklevel=2,
            )
            warned[0] = True

    return imex_integrate(
        s0, p, cfg, plan.nonlinear, scheme="ab2", snapshots=snapshots, monitor=monitor
    )


# --- field dump format -----------------------------------------------------
#
# Plain-text grid file.  First line: a JSON header
# {"N_x": int, "N_z": int, "l_x": float, "t": float} where N_z counts the
# dumped z levels including the two boundary rows (z = 0 and z = 1, where
# both fields vanish).  Then N_x lines of N_z space-separated psi values
# (row i is x_i, columns ordered z = 0 .. 1), a blank line, and N_x lines of
# theta in the same layout.  Values use Python float repr and round-trip
# bit-exactly.


def write_field_dump(path: str, f: PhysicalFields, l_x: float) -> None:
    """Atomic (write-then-rename) text dump of the fields with boundary rows."""
    n_x, n_int = f.N_x, f.N_z
    header = {"N_x": n_x, "N_z": n_int + 2, "l_x": float(l_x), "t": float(f.t)}
    pad = np.zeros((n_x, 1))
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(json.dumps(header) + "\n")
        for block in (f.psi, f.theta):
            full = np.hstack([pad, block, pad])
            for row in full:
                fh.write(" ".join(repr(float(v)) for v in row) + "\n")
            if block is f.psi:
                fh.write("\n")
    os.replace(tmp, path)


def read_field_dump(path: str) -> tuple[PhysicalFields, float]:
    """Inverse of :func:`write_field_dump`; returns (fields, l_x).

    The returned fields hold only the interior z levels, matching the
    in-memory convention.
    """
    from .state import x_grid, z_grid

    with open(path) as fh:
        header = json.loads(fh.readline())
        n_x, n_z = int(header["N_x"]), int(header["N_z"])
        rows = [line.split() for line in fh if line.strip()]
    if len(rows) != 2 * n_x or any(len(r) != n_z for r in rows):
        raise ValueError(f"field dump does not match header ({n_x} x {n_z})")
    data = np.array(rows, float)
    psi = data[:n_x, 1:-1]
    theta = data[n_x:, 1:-1]
    l_x = float(header["l_x"])
    f = PhysicalFields(
        psi=psi,
        theta=theta,
        x_coords=x_grid(n_x, l_x),
        z_coords=z_grid(n_z - 2),
        t=float(header["t"]),
    )
    return f, l_x
