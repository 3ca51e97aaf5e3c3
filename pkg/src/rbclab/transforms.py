"""Transforms between Lorenz amplitudes, spectral states, and physical grids.

Synthesis evaluates

    psi(x, z) = sum_{l=-L..L} sum_{m=1..M} psi_hat_lm exp(i*l*alpha*x) sin(m*beta*z)

with the negative-l half implied by conjugation, so the result is real up to
roundoff.  Analysis inverts it by quadrature:

    psi_hat_lm = (alpha/pi) * int int psi sin(m*beta*z) exp(-i*l*alpha*x) dz dx.

On the uniform x grid and uniform interior z grid both quadratures are exact
for band-limited fields (discrete Fourier / discrete-sine orthogonality), so
analyze o synthesize is the identity to roundoff.
"""

from __future__ import annotations

import numpy as np

from .params import Params
from .state import PhysicalFields, SpectralState, x_grid, z_grid, zero_state

__all__ = [
    "lorenz_to_spectral",
    "project_XYZ",
    "synthesize",
    "analyze",
    "project_XYZ_from_fields",
]


def lorenz_to_spectral(X: float, Y: float, Z: float, p: Params, t: float = 0.0) -> SpectralState:
    """Spectral state holding only the three Lorenz amplitudes.

    psi = X * sqrt(2)*(a^2+b^2)/(a*b) * sin(a x) sin(b z) maps to
    psi_hat_11 = -i/2 * X * sqrt(2)*(a^2+b^2)/(a*b), and similarly for the
    cos(a x) sin(b z) and sin(2 b z) temperature components.
    """
    a, b = p.alpha, p.beta
    k2 = a * a + b * b
    s = zero_state(p.L, p.M, t)
    s.psi_hat[1, 0] = -0.5j * X * np.sqrt(2.0) * k2 / (a * b)
    s.theta_hat[1, 0] = 0.5 * Y * np.sqrt(2.0) * k2**3 / (a * a * b * p.Ra)
    s.theta_hat[0, 1] = -Z * k2**3 / (a * a * b * p.Ra)
    return s


def project_XYZ(s: SpectralState, p: Params) -> tuple[float, float, float]:
    """Lorenz amplitudes of a spectral state (inverse of lorenz_to_spectral)."""
    a, b = p.alpha, p.beta
    k2 = a * a + b * b
    X = -np.sqrt(2.0) * a * b / k2 * s.psi_hat[1, 0].imag
    Y = np.sqrt(2.0) * a * a * b * p.Ra / k2**3 * s.theta_hat[1, 0].real
    Z = -(a * a * b * p.Ra) / k2**3 * s.theta_hat[0, 1].real
    return float(X), float(Y), float(Z)


def _synthesis_matrices(p: Params, L: int, M: int, N_x: int, N_z: int):
    x = x_grid(N_x, p.l_x)
    z = z_grid(N_z)
    ls = np.arange(L + 1)
    ms = np.arange(1, M + 1)
    E = np.exp(1j * np.outer(ls * p.alpha, x))  # (L+1, N_x)
    S = np.sin(np.outer(ms * p.beta, z))  # (M, N_z)
    return x, z, E, S


def synthesize(s: SpectralState, p: Params, N_x: int, N_z: int) -> PhysicalFields:
    """Evaluate a spectral state on the (N_x, N_z) collocation grid.

    Requires a grid that resolves the spectrum: N_x >= 2*(2L+1) and
    N_z >= 2*(M+1).
    """
    L, M = s.L, s.M
    if N_x < 2 * (2 * L + 1):
        raise ValueError(f"N_x = {N_x} cannot resolve L = {L}; need N_x >= {2 * (2 * L + 1)}")
    if N_z < 2 * (M + 1):
        raise ValueError(f"N_z = {N_z} cannot resolve M = {M}; need N_z >= {2 * (M + 1)}")
    x, z, E, S = _synthesis_matrices(p, L, M, N_x, N_z)
    # l >= 1 contributes together with its conjugate: 2*Re(...); l = 0 once.
    w = np.ones(L + 1)
    w[1:] = 2.0
    psi = ((w[:, None] * E).T @ (s.psi_hat @ S)).real
    theta = ((w[:, None] * E).T @ (s.theta_hat @ S)).real
    return PhysicalFields(psi=psi, theta=theta, x_coords=x, z_coords=z, t=s.t)


def analyze(f: PhysicalFields, p: Params) -> SpectralState:
    """Project grid fields onto the retained spectrum (inverse of synthesize)."""
    L, M = p.L, p.M
    N_x, N_z = f.N_x, f.N_z
    if N_x < 2 * (2 * L + 1) or N_z < 2 * (M + 1):
        raise ValueError(f"grid ({N_x}, {N_z}) cannot resolve (L, M) = ({L}, {M})")
    _, _, E, S = _synthesis_matrices(p, L, M, N_x, N_z)
    # x: DFT mean picks the e^{i alpha_l x} coefficient; z: discrete-sine
    # quadrature with weight 1/(N_z+1) and the factor 2 from int sin^2 = 1/2.
    Sw = S.T * (2.0 / (N_z + 1))  # (N_z, M)
    psi_hat = (np.conj(E) @ f.psi) @ Sw / N_x
    theta_hat = (np.conj(E) @ f.theta) @ Sw / N_x
    s = SpectralState(psi_hat, theta_hat, f.t)
    s.enforce_reality()
    return s


def project_XYZ_from_fields(f: PhysicalFields, p: Params) -> tuple[float, float, float]:
    """Lorenz amplitudes by direct quadrature of the grid fields.

    X = sqrt(2) a^2 b / (pi (a^2+b^2)) * int int psi sin(a x) sin(b z) dz dx,
    and the analogous cos(a x) sin(b z) / sin(2 b z) projections for Y and Z.
    """
    a, b = p.alpha, p.beta
    k2 = a * a + b * b
    N_x, N_z = f.N_x, f.N_z
    sin_ax = np.sin(a * f.x_coords)
    cos_ax = np.cos(a * f.x_coords)
    sin_bz = np.sin(b * f.z_coords)
    sin_2bz = np.sin(2.0 * b * f.z_coords)
    # exact quadrature for trig integrands: mean * l_x in x, interior sum / (N_z+1) in z
    wx = p.l_x / N_x
    wz = 1.0 / (N_z + 1)
    X = np.sqrt(2.0) * a * a * b / (np.pi * k2) * (sin_ax @ f.psi @ sin_bz) * wx * wz
    Y = np.sqrt(2.0) * a**3 * b * p.Ra / (np.pi * k2**3) * (cos_ax @ f.theta @ sin_bz) * wx * wz
    Z = -(a**3) * b * p.Ra / (np.pi * k2**3) * (np.ones(N_x) @ f.theta @ sin_2bz) * wx * wz
    return float(X), float(Y), float(Z)
