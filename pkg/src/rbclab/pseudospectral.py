"""Dealiased transform-method evaluation of the quadratic terms.

Fields are differentiated spectrally, synthesized on a padded collocation
grid, multiplied pointwise, and the products are projected back onto the
retained spectrum.  With a grid satisfying the 3/2 padding rule the products
of two band-limited fields are projected exactly: the x direction uses DFT
orthogonality (aliases of modes up to 2L land outside |l| <= L) and the z
direction uses discrete-sine orthogonality (products reach vertical index 3M,
below the first aliasing pair at 2(N_z+1)).
"""

from __future__ import annotations

import numpy as np
from scipy.fft import next_fast_len

from .params import Params
from .state import z_grid

__all__ = ["TransformPlan", "min_grid"]

_plan_cache: dict[tuple, "TransformPlan"] = {}


def min_grid(L: int, M: int) -> tuple[int, int]:
    """Smallest dealiased padded grid for truncation (L, M)."""
    n_x = next_fast_len(max(3 * L + 2, 16), real=True)
    if n_x % 2:
        n_x = next_fast_len(n_x + 1, real=True)
    n_z = max((3 * (M + 1) + 1) // 2, 8)
    return n_x, n_z


class TransformPlan:
    """Transforms between the retained (L+1, M) spectrum and a padded grid."""

    def __init__(self, p: Params, N_x: int, N_z: int):
        L, M = p.L, p.M
        if 2 * N_x < 3 * (2 * L + 1):
            raise ValueError(f"N_x = {N_x} below the 3/2 rule for L = {L}")
        if 2 * N_z < 3 * (M + 1):
            raise ValueError(f"N_z = {N_z} below the 3/2 rule for M = {M}")
        self.p = p
        self.L, self.M = L, M
        self.N_x, self.N_z = N_x, N_z
        self.al = p.alpha_l(np.arange(L + 1, dtype=float))[:, None]
        bm = p.beta_m(np.arange(1, M + 1, dtype=float))
        self.bm = bm[None, :]
        self.k2 = self.al**2 + self.bm**2
        z = z_grid(N_z)
        self.z = z
        self.sinT = np.sin(np.outer(bm, z))  # (M, N_z)
        self.cosT = np.cos(np.outer(bm, z))
        self.ana_sin = self.sinT.T * (2.0 / (N_z + 1))  # (N_z, M)
        self._nslots = N_x // 2 + 1

    @classmethod
    def for_truncation(cls, p: Params) -> "TransformPlan":
        return cls.cached(p, *min_grid(p.L, p.M))

    @classmethod
    def cached(cls, p: Params, N_x: int, N_z: int) -> "TransformPlan":
        key = (p.L, p.M, p.alpha, p.beta, N_x, N_z)
        plan = _plan_cache.get(key)
        if plan is None:
            plan = _plan_cache[key] = cls(p, N_x, N_z)
        return plan

    # --- spectral <-> grid -------------------------------------------------

    def to_grid(self, rows: np.ndarray) -> np.ndarray:
        """x-synthesis of per-mode rows (L+1, N_z) to the (N_x, N_z) grid."""
        buf = np.zeros((self._nslots, self.N_z), complex)
        buf[: self.L + 1] = rows
        return np.fft.irfft(buf, n=self.N_x, axis=0) * self.N_x

    def sin_synth(self, hat: np.ndarray) -> np.ndarray:
        """Grid values of a sine-series spectrum (L+1, M)."""
        return self.to_grid(hat @ self.sinT)

    def cos_synth(self, hat: np.ndarray) -> np.ndarray:
        """Grid values of a cosine-series spectrum (L+1, M)."""
        return self.to_grid(hat @ self.cosT)

    def sin_analyze(self, grid: np.ndarray) -> np.ndarray:
        """Project grid values back to the retained sine-series spectrum."""
        slots = np.fft.rfft(grid, axis=0)[: self.L + 1] / self.N_x
        hat = slots @ self.ana_sin
        hat[0] = hat[0].real
        return hat

    # --- derivative fields -------------------------------------------------

    def velocity(self, psi_hat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(u, w) = (-dpsi/dz, dpsi/dx) on the padded grid."""
        u = -self.cos_synth(psi_hat * self.bm)
        w = self.sin_synth(1j * self.al * psi_hat)
        return u, w

    # --- nonlinear terms ---------------------------------------------------

    def nonlinear(self, psi_hat: np.ndarray, theta_hat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(N_psi_hat, N_theta_hat): dealiased spectral quadratic terms.

        N_psi = psi_z (lap psi)_x - psi_x (lap psi)_z and
        N_theta = psi_z theta_x - psi_x theta_z, products formed pointwise on
        the padded grid and truncated back to the retained spectrum.
        """
        psi_z = self.cos_synth(psi_hat * self.bm)
        psi_x = self.sin_synth(1j * self.al * psi_hat)
        lap = -self.k2 * psi_hat
        lap_x = self.sin_synth(1j * self.al * lap)
        lap_z = self.cos_synth(lap * self.bm)
        th_x = self.sin_synth(1j * self.al * theta_hat)
        th_z = self.cos_synth(theta_hat * self.bm)
        n_psi = self.sin_analyze(psi_z * lap_x - psi_x * lap_z)
        n_theta = self.sin_analyze(psi_z * th_x - psi_x * th_z)
        return n_psi, n_theta
