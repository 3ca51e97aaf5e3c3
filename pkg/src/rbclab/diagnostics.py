"""Energy diagnostics: kinetic/potential energies, rates, and balance checks.

Two independent routes are provided for the energies: closed-form mode sums
(`energies_spectral`) and quadrature of the velocity/temperature fields
(`energies_grid`).  They agree to roundoff on band-limited states, which is
the main self-check of the spectral bookkeeping.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import Params
from .state import PhysicalFields, SpectralState
from .transforms import analyze

__all__ = [
    "EnergyReport",
    "energies_spectral",
    "energies_grid",
    "energy_rates",
    "energy_report",
    "balance_residual",
    "divergence_constant",
]


@dataclass(frozen=True)
class EnergyReport:
    """Energies and energy rates at one instant.

    E_T = E_K + E_P by construction; V <= 0 always (viscous dissipation).
    """

    E_K: float
    E_P: float
    E_T: float
    Q: float
    V: float
    t: float


def _mode_weights(L: int) -> np.ndarray:
    # l >= 1 amplitudes stand for a conjugate pair and count twice
    w = np.full(L + 1, 2.0)
    w[0] = 1.0
    return w


def _kappa2(p: Params, L: int, M: int) -> np.ndarray:
    al = p.alpha_l(np.arange(L + 1))[:, None]
    bm = p.beta_m(np.arange(1, M + 1))[None, :]
    return al**2 + bm**2


def energies_spectral(s: SpectralState, p: Params) -> tuple[float, float, float]:
    """(E_K, E_P, E_T) from the mode amplitudes.

    E_K = sum pi*(alpha_l^2+beta_m^2)/(2 alpha) |psi_hat_lm|^2 over the full
    spectrum; E_P = sigma*Ra * sum_m 2 pi cos(beta_m)/(alpha beta_m) theta_hat_0m,
    with cos(beta_m) = (-1)^m.
    """
    L, M = s.L, s.M
    k2 = _kappa2(p, L, M)
    w = _mode_weights(L)[:, None]
    E_K = float(np.sum(w * np.pi * k2 / (2.0 * p.alpha) * np.abs(s.psi_hat) ** 2))
    m = np.arange(1, M + 1)
    cos_bm = np.where(m % 2 == 0, 1.0, -1.0)
    E_P = float(
        p.sigma * p.Ra * np.sum(2.0 * np.pi * cos_bm / (p.alpha * p.beta_m(m)) * s.theta_hat[0].real)
    )
    return E_K, E_P, E_K + E_P


def energies_grid(f: PhysicalFields, p: Params) -> tuple[float, float, float]:
    """(E_K, E_P, E_T) by quadrature of 0.5*(u^2+w^2) and (-sigma Ra z)*theta.

    The velocities u = -dpsi/dz and w = dpsi/dx are evaluated spectrally; the
    z integral uses Gauss-Legendre nodes (the integrands are smooth but not
    band-limited in the sine basis because of the z weight).
    """
    s = analyze(f, p)
    L, M = s.L, s.M
    ls = np.arange(L + 1)
    ms = np.arange(1, M + 1)
    # Gauss-Legendre on (0, 1), enough nodes for oscillations up to mode 2M
    n_gl = max(4 * M + 16, 48)
    nodes, wts = np.polynomial.legendre.leggauss(n_gl)
    zg = 0.5 * (nodes + 1.0)
    wz = 0.5 * wts
    N_x = f.N_x
    E = np.exp(1j * np.outer(ls * p.alpha, f.x_coords))  # (L+1, N_x)
    cw = np.ones(L + 1)
    cw[1:] = 2.0
    S = np.sin(np.outer(ms * p.beta, zg))  # (M, n_gl)
    C = np.cos(np.outer(ms * p.beta, zg))
    bm = p.beta_m(ms)[:, None]
    al = (ls * p.alpha)[:, None]
    u = -((cw[:, None] * E).T @ ((s.psi_hat * bm.T) @ C)).real  # -dpsi/dz
    w = ((cw[:, None] * E).T @ ((1j * al * s.psi_hat) @ S)).real  # dpsi/dx
    theta = ((cw[:, None] * E).T @ (s.theta_hat @ S)).real
    wx = p.l_x / N_x
    E_K = float(np.sum(0.5 * (u**2 + w**2) @ wz) * wx)
    E_P = float(np.sum((-p.sigma * p.Ra) * (theta * zg[None, :]) @ wz) * wx)
    return E_K, E_P, E_K + E_P


def energy_rates(s: SpectralState, p: Params) -> tuple[float, float]:
    """(Q, V): boundary thermal-conduction rate and viscous dissipation rate.

    V = -sigma * sum pi*(alpha_l^2+beta_m^2)^2/alpha |psi_hat_lm|^2 <= 0;
    Q = -sigma*Ra * sum_m 2 pi beta_m cos(beta_m)/alpha * theta_hat_0m.
    """
    L, M = s.L, s.M
    k2 = _kappa2(p, L, M)
    w = _mode_weights(L)[:, None]
    V = float(-p.sigma * np.sum(w * np.pi * k2**2 / p.alpha * np.abs(s.psi_hat) ** 2))
    m = np.arange(1, M + 1)
    cos_bm = np.where(m % 2 == 0, 1.0, -1.0)
    Q = float(
        -p.sigma * p.Ra * np.sum(2.0 * np.pi * p.beta_m(m) * cos_bm / p.alpha * s.theta_hat[0].real)
    )
    return Q, V


def energy_report(s: SpectralState, p: Params) -> EnergyReport:
    E_K, E_P, E_T = energies_spectral(s, p)
    Q, V = energy_rates(s, p)
    return EnergyReport(E_K=E_K, E_P=E_P, E_T=E_T, Q=Q, V=V, t=s.t)


def balance_residual(t: np.ndarray, E_T: np.ndarray, Q: np.ndarray, V: np.ndarray) -> np.ndarray:
    """Normalized residual of dE_T/dt = Q + V along a sampled trajectory.

    dE_T/dt is a centered finite difference of the sampled E_T series
    (one-sided at the ends); the residual is normalized by max|V|.  Needs at
    least 3 samples at uniform cadence.
    """
    t = np.asarray(t, float)
    if t.size < 3:
        raise ValueError("balance_residual needs at least 3 samples")
    dEdt = np.gradient(np.asarray(E_T, float), t)
    scale = float(np.max(np.abs(V)))
    if scale == 0.0:
        scale = 1.0
    return (dEdt - (np.asarray(Q) + np.asarray(V))) / scale


def divergence_constant(p: Params) -> float:
    """State-independent phase-space divergence of the spectral system.

    -(sigma+1) * sum over retained real coordinates of (alpha_l^2+beta_m^2):
    l >= 1 modes count twice (conjugate pair), l = 0 once, m = 1..M.
    """
    k2 = _kappa2(p, p.L, p.M)
    w = _mode_weights(p.L)[:, None]
    return float(-(p.sigma + 1.0) * np.sum(w * k2))
