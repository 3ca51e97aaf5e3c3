"""Generalized spectral expansion of the convection equations at order (L, M).

The mode amplitudes obey

    d theta_hat_lm / dt = -(k2) theta_hat_lm + i alpha_l psi_hat_lm + N_theta_lm
    d psi_hat_lm / dt   = -sigma k2 psi_hat_lm
                          - (i alpha_l sigma Ra theta_hat_lm + N_psi_lm) / k2

with k2 = alpha_l^2 + beta_m^2 and the quadratic convolution terms N_psi,
N_theta evaluated by the explicit double sums over modes (j, k).  Negative-l
amplitudes enter via conjugation; vertical indices outside [1, M] are zero
(the sine-series product identity holds with that zero extension).

At (L, M) = (1, 2) on the Lorenz subspace the system reduces exactly to the
classic Lorenz equations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import Params
from .state import SpectralState
from .stepping import LinearPropagator, StepperConfig, imex_integrate
from .trajectory import Trajectory

__all__ = [
    "ConvolutionTerms",
    "ConvolutionPlan",
    "convolution",
    "gele_rhs",
    "step",
    "integrate",
    "equilibrium_modes",
]

# direct convolution is O(L^2 M^2) per evaluation; above this work estimate
# the integrator switches to the dealiased transform evaluation (identical on
# band-limited states to roundoff, see tests)
_TRANSFORM_THRESHOLD = 20_000


@dataclass
class ConvolutionTerms:
    """Quadratic interaction terms, same (L+1, M) layout as the state arrays."""

    n_psi: np.ndarray
    n_theta: np.ndarray


class ConvolutionPlan:
    """Precomputed index/coefficient tensors for the direct double sums.

    Full-spectrum work arrays have 2L+2 rows (l = -L..L plus one all-zero
    guard row) and M+1 columns (m = 0..M; column 0 is structurally zero, so
    out-of-range vertical indices can simply be clipped onto it).
    """

    def __init__(self, p: Params):
        L, M = p.L, p.M
        self.L, self.M = L, M
        m_out = np.arange(1, M + 1)[:, None]  # output vertical mode
        k = np.arange(M + 1)[None, :]  # summation index
        i1 = m_out - k
        i2 = k - m_out
        i3 = m_out + k
        self.I1 = np.where((i1 >= 1) & (i1 <= M), i1, 0)
        self.I2 = np.where((i2 >= 1) & (i2 <= M), i2, 0)
        self.I3 = np.where((i3 >= 1) & (i3 <= M), i3, 0)
        bk2 = (k * p.beta) ** 2
        self.C1 = bk2 - (i1 * p.beta) ** 2
        self.C2 = bk2 - (i2 * p.beta) ** 2
        self.C3 = bk2 - (i3 * p.beta) ** 2

        j = np.arange(-L, L + 1)
        self.w = 0.5j * (j[:, None] * p.alpha) * (k * p.beta)  # (2L+1, M+1)
        self.alpha2_j = (j * p.alpha) ** 2

        l_out = np.arange(L + 1)[:, None]
        lj = l_out - j[None, :]
        self.R = np.where(np.abs(lj) <= L, lj + L, 2 * L + 1)  # (L+1, 2L+1)
        alpha2_row = np.append((np.arange(-L, L + 1) * p.alpha) ** 2, 0.0)
        self.alpha2_R = alpha2_row[self.R]

    def full(self, a: np.ndarray) -> np.ndarray:
        """Half-spectrum (L+1, M) -> padded full spectrum (2L+2, M+1)."""
        L, M = self.L, self.M
        f = np.zeros((2 * L + 2, M + 1), complex)
        f[L : 2 * L + 1, 1:] = a
        f[:L, 1:] = np.conj(a[L:0:-1])
        return f

    def _gather(self, f: np.ndarray) -> np.ndarray:
        # a_{m-k} - a_{k-m} + a_{m+k} with zero extension, shape (2L+1, M, M+1)
        g = f[: 2 * self.L + 1]
        return g[:, self.I1] - g[:, self.I2] + g[:, self.I3]

    def _gather_weighted(self, f: np.ndarray) -> np.ndarray:
        # same gather with the (beta_k^2 - beta_i^2) coefficients attached
        g = f[: 2 * self.L + 1]
        return self.C1 * g[:, self.I1] - self.C2 * g[:, self.I2] + self.C3 * g[:, self.I3]

    def _contract(self, gathered: np.ndarray, pair: np.ndarray) -> np.ndarray:
        # sum_{j,k} gathered[j,m,k] * pair[l,j,k] -> (L+1, M), via one matmul
        J, M, K = gathered.shape
        a = gathered.transpose(1, 0, 2).reshape(M, J * K)
        b = pair.reshape(-1, J * K)
        return (a @ b.T).T

    def evaluate(self, psi_hat: np.ndarray, theta_hat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        fp = self.full(psi_hat)
        ft = self.full(theta_hat)
        pair_psi = fp[self.R]  # (L+1, 2L+1, M+1): psi_hat_{(l-j) k}
        pair_th = ft[self.R]
        wg_psi = self.w[:, None, :] * self._gather(fp)
        wg_th = self.w[:, None, :] * self._gather(ft)
        # N_theta: sum w * [G(theta) psi_{(l-j)k} - G(psi) theta_{(l-j)k}]
        n_theta = self._contract(wg_th, pair_psi) - self._contract(wg_psi, pair_th)
        # N_psi: (alpha_{l-j}^2 - alpha_j^2) G(psi) + (beta-weighted gather), times psi_{(l-j)k}
        d_pair = (self.alpha2_R[:, :, None] - self.alpha2_j[None, :, None]) * pair_psi
        n_psi = self._contract(wg_psi, d_pair) + self._contract(
            self.w[:, None, :] * self._gather_weighted(fp), pair_psi
        )
        return n_psi, n_theta


_plan_cache: dict[tuple, ConvolutionPlan] = {}


def _get_plan(p: Params) -> ConvolutionPlan:
    key = (p.L, p.M, p.alpha, p.beta)
    plan = _plan_cache.get(key)
    if plan is None:
        plan = _plan_cache[key] = ConvolutionPlan(p)
    return plan


def convolution(s: SpectralState, p: Params) -> ConvolutionTerms:
    """Direct evaluation of the quadratic interaction terms N_psi, N_theta."""
    n_psi, n_theta = _get_plan(p).evaluate(s.psi_hat, s.theta_hat)
    return ConvolutionTerms(n_psi=n_psi, n_theta=n_theta)


def gele_rhs(s: SpectralState, p: Params) -> SpectralState:
    """Time derivative of the spectral state (returned in state layout)."""
    L, M = s.L, s.M
    al = p.alpha_l(np.arange(L + 1, dtype=float))[:, None]
    bm = p.beta_m(np.arange(1, M + 1, dtype=float))[None, :]
    k2 = al**2 + bm**2
    conv = convolution(s, p)
    dtheta = -k2 * s.theta_hat + 1j * al * s.psi_hat + conv.n_theta
    dpsi = -p.sigma * k2 * s.psi_hat - (1j * al * p.sigma * p.Ra * s.theta_hat + conv.n_psi) / k2
    return SpectralState(dpsi, dtheta, s.t)


def step(s: SpectralState, p: Params, dt: float) -> SpectralState:
    """One IMEX Euler step: full linear operator implicit, N terms explicit."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    prop = LinearPropagator(p, dt, s.L, s.M)
    n_psi, n_theta = _get_plan(p).evaluate(s.psi_hat, s.theta_hat)
    rp = s.psi_hat + dt * (-n_psi * prop.inv_k2)
    rt = s.theta_hat + dt * n_theta
    ps, th = prop.apply(rp, rt)
    ps[0] = ps[0].real
    th[0] = th[0].real
    out = SpectralState(ps, th, s.t + dt)
    if not out.is_finite():
        raise FloatingPointError(f"non-finite amplitudes after step at t = {out.t:.6g}")
    return out


def integrate(
    s0: SpectralState,
    p: Params,
    cfg: StepperConfig,
    nonlinear: str = "auto",
    snapshots: bool = False,
) -> Trajectory:
    """Repeated IMEX stepping with diagnostics sampled every output_every steps.

    nonlinear selects the evaluation of the convolution terms: "direct"
    (explicit double sums), "transform" (dealiased pseudospectral products),
    or "auto" (transform above a work threshold).  Both routes agree to
    relative 1e-10 on band-limited states.
    """
    if nonlinear == "auto":
        work = (2 * p.L + 1) ** 2 * p.M * (p.M + 1)
        nonlinear = "transform" if work > _TRANSFORM_THRESHOLD else "direct"
    if nonlinear == "direct":
        plan = _get_plan(p)
        fn = plan.evaluate
    elif nonlinear == "transform":
        from .pseudospectral import TransformPlan

        tplan = TransformPlan.for_truncation(p)
        fn = tplan.nonlinear
    else:
        raise ValueError(f"unknown nonlinear evaluation {nonlinear!r}")
    return imex_integrate(s0, p, cfg, fn, scheme="euler", snapshots=snapshots)


def equilibrium_modes(traj: Trajectory, rel_tol: float = 1e-6) -> SpectralState:
    """Final state of a converged trajectory, for mode-amplitude inspection.

    Convergence means the (X, Y, Z) samples over the final 10% of the
    trajectory stay within rel_tol (relative to the state magnitude) of the
    last sample.

    Raises:
        ValueError: if the trajectory has not converged.
    """
    if traj.final_state is None:
        raise ValueError("trajectory carries no final state")
    n = len(traj)
    i0 = max(0, n - max(2, n // 10))
    v_end = np.array([traj.X[-1], traj.Y[-1], traj.Z[-1]])
    scale = max(float(np.linalg.norm(v_end)), 1e-12)
    window = np.stack([traj.X[i0:], traj.Y[i0:], traj.Z[i0:]], axis=1)
    dev = float(np.max(np.linalg.norm(window - v_end, axis=1))) / scale
    if dev >= rel_tol:
        raise ValueError(f"trajectory not converged: relative deviation {dev:.3g} >= {rel_tol:g}")
    return traj.final_state
