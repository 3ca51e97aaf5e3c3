"""Shared IMEX time stepping for the spectral models.

One step advances each retained mode (l, m) by a backward-Euler solve of the
full linear operator

    d/dt [psi_hat]   [ -sigma*k2   -i*alpha_l*sigma*Ra/k2 ] [psi_hat]
         [theta_hat] = [ i*alpha_l   -k2                   ] [theta_hat]  + N

(k2 = alpha_l^2 + beta_m^2), with the nonlinear terms N added explicitly:
forward Euler for the Galerkin model, 2nd-order Adams-Bashforth for the DNS
(forward Euler on the bootstrap step).  Treating the psi-theta coupling
implicitly makes the linear update unconditionally stable and leaves exact
fixed points of the ODEs invariant for any dt.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .diagnostics import energies_spectral, energy_rates
from .params import Params
from .state import SpectralState
from .trajectory import Trajectory
from .transforms import project_XYZ

__all__ = ["StepperConfig", "LinearPropagator", "BlowUpError", "imex_integrate"]

DT_CEILING = 1e-4  # upper bound of the stable-step range for these models


class BlowUpError(FloatingPointError):
    """Integration produced non-finite amplitudes."""

    def __init__(self, t: float):
        super().__init__(f"solution blew up (non-finite amplitudes) at t = {t:.6g}")
        self.t = t


@dataclass
class StepperConfig:
    """Time-stepping configuration.

    dt defaults to 1e-5 and should not exceed 1e-4; output_every is the
    sampling cadence in steps.
    """

    dt: float = 1e-5
    t_end: float = 1.0
    output_every: int = 100

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.t_end <= 0:
            raise ValueError("t_end must be positive")
        if self.output_every < 1:
            raise ValueError("output_every must be a positive integer")
        if self.dt > DT_CEILING:
            raise ValueError(f"dt = {self.dt} exceeds the stable ceiling {DT_CEILING}")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))


class LinearPropagator:
    """Per-mode inverse of (I - dt*A) for the coupled 2x2 linear operator."""

    def __init__(self, p: Params, dt: float, L: int, M: int):
        al = p.alpha_l(np.arange(L + 1, dtype=float))[:, None]
        bm = p.beta_m(np.arange(1, M + 1, dtype=float))[None, :]
        k2 = al**2 + bm**2
        a11 = -p.sigma * k2
        a12 = -1j * al * p.sigma * p.Ra / k2
        a21 = 1j * al * np.ones_like(bm)
        a22 = -k2
        m11 = 1.0 - dt * a11
        m12 = -dt * a12
        m21 = -dt * a21
        m22 = 1.0 - dt * a22
        det = m11 * m22 - m12 * m21
        self.p11 = m22 / det
        self.p12 = -m12 / det
        self.p21 = -m21 / det
        self.p22 = m11 / det
        self.k2 = k2
        self.inv_k2 = 1.0 / k2
        self.dt = dt

    def apply(self, rp: np.ndarray, rt: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return self.p11 * rp + self.p12 * rt, self.p21 * rp + self.p22 * rt


def imex_integrate(
    s0: SpectralState,
    p: Params,
    cfg: StepperConfig,
    nonlinear,
    scheme: str = "euler",
    snapshots: bool = False,
    monitor=None,
) -> Trajectory:
    """Advance s0 to s0.t + cfg.t_end, sampling diagnostics every output_every steps.

    `nonlinear(psi_hat, theta_hat)` returns the convolution terms
    (N_psi_hat, N_theta_hat).  scheme "euler" uses the current nonlinear terms;
    "ab2" uses 1.5*N^n - 0.5*N^(n-1) with a forward-Euler bootstrap.
    `monitor(step, psi_hat, theta_hat)`, if given, is called at each sample.

    Raises:
        BlowUpError: with the failure time if amplitudes go non-finite.
    """
    if scheme not in ("euler", "ab2"):
        raise ValueError(f"unknown scheme {scheme!r}")
    L, M = s0.L, s0.M
    prop = LinearPropagator(p, cfg.dt, L, M)
    ps = s0.psi_hat.copy()
    th = s0.theta_hat.copy()
    t0 = s0.t
    dt = cfg.dt
    n_steps = cfg.n_steps

    ts, Xs, Ys, Zs = [], [], [], []
    eks, eps_, ets, qs, vs = [], [], [], [], []
    snaps: list[tuple[float, SpectralState]] = []

    def sample(k: int):
        t = t0 + k * dt
        if not (np.all(np.isfinite(ps)) and np.all(np.isfinite(th))):
            raise BlowUpError(t)
        st = SpectralState(ps, th, t)
        x, y, z = project_XYZ(st, p)
        ek, ep, et = energies_spectral(st, p)
        q, v = energy_rates(st, p)
        ts.append(t)
        Xs.append(x)
        Ys.append(y)
        Zs.append(z)
        eks.append(ek)
        eps_.append(ep)
        ets.append(et)
        qs.append(q)
        vs.append(v)
        if snapshots:
            snaps.append((t, SpectralState(ps.copy(), th.copy(), t)))
        if monitor is not None:
            monitor(k, ps, th)

    sample(0)
    n_prev = None
    for k in range(1, n_steps + 1):
        n_psi, n_theta = nonlinear(ps, th)
        if scheme == "ab2" and n_prev is not None:
            e_psi = 1.5 * n_psi - 0.5 * n_prev[0]
            e_theta = 1.5 * n_theta - 0.5 * n_prev[1]
        else:
            e_psi, e_theta = n_psi, n_theta
        if scheme == "ab2":
            n_prev = (n_psi, n_theta)
        rp = ps + dt * (-e_psi * prop.inv_k2)
        rt = th + dt * e_theta
        ps, th = prop.apply(rp, rt)
        # conjugate symmetry is structural: the l=0 row stays real
        ps[0] = ps[0].real
        th[0] = th[0].real
        if k % cfg.output_every == 0:
            sample(k)

    final = SpectralState(ps.copy(), th.copy(), t0 + n_steps * dt)
    if not final.is_finite():
        raise BlowUpError(final.t)
    return Trajectory(
        t=np.array(ts),
        X=np.array(Xs),
        Y=np.array(Ys),
        Z=np.array(Zs),
        E_K=np.array(eks),
        E_P=np.array(eps_),
        E_T=np.array(ets),
        Q=np.array(qs),
        V=np.array(vs),
        final_state=final,
        snapshots=snaps,
    )
