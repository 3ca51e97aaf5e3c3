"""Trajectory post-processing: peaks, attractor classification, Lyapunov.

The classifier follows a fixed decision cascade on a post-transient
trajectory: converged tail -> FixedPoint; few tight Z-maximum clusters with
repeating inter-peak intervals -> LimitCycle; line-dominated Z spectrum with
peaks filling an interval -> LimitTorus; positive largest-Lyapunov estimate
with a broadband spectrum -> Chaotic; otherwise Undetermined.  All thresholds
live in :class:`ClassifierConfig` so the labels are reproducible.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .state import SpectralState
from .trajectory import Trajectory

__all__ = [
    "AttractorKind",
    "AttractorVerdict",
    "BifurcationRow",
    "ClassifierConfig",
    "InsufficientDataError",
    "truncate_transient",
    "find_z_maxima",
    "classify",
    "lyapunov_largest",
    "streamwise_periodicity",
]


class AttractorKind(str, enum.Enum):
    FIXED_POINT = "FixedPoint"
    LIMIT_CYCLE = "LimitCycle"
    LIMIT_TORUS = "LimitTorus"
    CHAOTIC = "Chaotic"
    UNDETERMINED = "Undetermined"


class InsufficientDataError(ValueError):
    """Trajectory too short for a classification verdict."""


@dataclass(frozen=True)
class ClassifierConfig:
    """Thresholds of the classification cascade (defaults as documented)."""

    fixed_point_tol: float = 1e-6  # relative state change over the final 10%
    # relative intra-cluster Z_max spread; peak modulation below one percent
    # counts as a limit cycle (weakly modulated cycles sit near 1e-2 while
    # genuine tori show spreads of order 1e-1)
    cluster_spread: float = 1e-2
    max_clusters: int = 8
    interval_tol: float = 0.05  # relative repeat tolerance of peak intervals
    line_variance: float = 0.95  # spectral variance captured by the top lines
    max_lines: int = 10
    line_halfwidth: int = 3  # window-leakage bins absorbed per line
    lyap_threshold: float = 0.1  # 1/t units
    min_peaks: int = 20


@dataclass
class AttractorVerdict:
    """Classification outcome with the diagnostics that produced it.

    z_periodicity (the number of distinct Z_max clusters) is present exactly
    when kind is LimitCycle.
    """

    kind: AttractorKind
    z_periodicity: int | None = None
    metrics: dict = field(default_factory=dict)


@dataclass
class BifurcationRow:
    """One r-sample of a bifurcation sweep."""

    r: float
    kind: AttractorKind
    z_periodicity: int | None
    z_max_values: list[float]
    z_max_range: tuple[float, float]
    n_peaks: int
    lyapunov: float | None = None
    error: str | None = None


def truncate_transient(traj: Trajectory, t_cut: float = 3.0) -> Trajectory:
    """Drop samples with t <= t_cut."""
    return traj.window(t_min=t_cut)


def find_z_maxima(traj: Trajectory) -> tuple[np.ndarray, np.ndarray]:
    """Strict local maxima of the Z series with 3-point parabolic refinement.

    Returns (t_peaks, z_peaks).  Requires uniform sampling.
    """
    z = np.asarray(traj.Z, float)
    t = np.asarray(traj.t, float)
    if z.size < 3:
        return np.array([]), np.array([])
    interior = np.flatnonzero((z[1:-1] > z[:-2]) & (z[1:-1] > z[2:])) + 1
    if interior.size == 0:
        return np.array([]), np.array([])
    zm, z0, zp = z[interior - 1], z[interior], z[interior + 1]
    denom = zm - 2.0 * z0 + zp
    delta = np.where(denom != 0.0, 0.5 * (zm - zp) / denom, 0.0)
    dt = t[1] - t[0]
    t_pk = t[interior] + delta * dt
    z_pk = z0 - 0.25 * (zm - zp) * delta
    return t_pk, z_pk


def _fixed_point_deviation(traj: Trajectory) -> float:
    n = len(traj)
    i0 = max(0, n - max(2, n // 10))
    v = np.stack([traj.X, traj.Y, traj.Z], axis=1)
    v_end = v[-1]
    scale = max(float(np.linalg.norm(v_end)), 1e-12)
    return float(np.max(np.linalg.norm(v[i0:] - v_end, axis=1))) / scale


def _cluster_peaks(z_pk: np.ndarray, cfg: ClassifierConfig) -> tuple[int | None, float]:
    """Smallest cluster count whose intra-cluster spreads pass, and the
    single-cluster relative spread."""
    scale = max(float(np.max(np.abs(z_pk))), 1e-12)
    zs = np.sort(z_pk)
    total_spread = float(zs[-1] - zs[0]) / scale
    gaps = np.diff(zs)
    for p in range(1, cfg.max_clusters + 1):
        if p == 1:
            bounds = []
        else:
            bounds = np.sort(np.argsort(gaps)[-(p - 1):])
        groups = np.split(zs, [b + 1 for b in bounds])
        if all(
            (g.size > 0 and float(g[-1] - g[0]) / scale < cfg.cluster_spread) for g in groups
        ):
            return p, total_spread
    return None, total_spread


def _intervals_repeat(t_pk: np.ndarray, p: int, cfg: ClassifierConfig) -> bool:
    iv = np.diff(t_pk)
    if iv.size < 2 * p:
        return False
    mean_all = float(np.mean(iv))
    if mean_all <= 0:
        return False
    for k in range(p):
        g = iv[k::p]
        if g.size and float(np.std(g)) / mean_all > cfg.interval_tol:
            return False
    return True


def _line_fraction(z: np.ndarray, cfg: ClassifierConfig) -> float:
    """Fraction of off-mean Z variance captured by the top spectral lines.

    Hann-windowed periodogram; each extracted line absorbs its leakage
    neighborhood of +-line_halfwidth bins.
    """
    z = np.asarray(z, float)
    z = z - z.mean()
    w = np.hanning(z.size)
    power = np.abs(np.fft.rfft(z * w)) ** 2
    power[0] = 0.0
    total = float(power.sum())
    if total == 0.0:
        return 1.0
    captured = 0.0
    p = power.copy()
    for _ in range(cfg.max_lines):
        i = int(np.argmax(p))
        lo, hi = max(0, i - cfg.line_halfwidth), min(p.size, i + cfg.line_halfwidth + 1)
        captured += float(p[lo:hi].sum())
        p[lo:hi] = 0.0
    return captured / total


def classify(
    traj: Trajectory,
    cfg: ClassifierConfig | None = None,
    lyapunov: float | None = None,
) -> AttractorVerdict:
    """Attractor verdict for a post-transient trajectory.

    `lyapunov`, when available, feeds the chaotic branch of the cascade;
    without it a broadband non-converged trajectory is Undetermined.

    Raises:
        InsufficientDataError: if the trajectory has neither a convergent
            tail nor at least min_peaks Z maxima.
    """
    cfg = cfg or ClassifierConfig()
    if len(traj) < 10:
        raise InsufficientDataError(f"only {len(traj)} samples")
    metrics: dict = {}
    dev = _fixed_point_deviation(traj)
    metrics["convergence_norm"] = dev
    metrics["lyapunov"] = lyapunov
    if dev < cfg.fixed_point_tol:
        return AttractorVerdict(AttractorKind.FIXED_POINT, metrics=metrics)

    t_pk, z_pk = find_z_maxima(traj)
    metrics["n_peaks"] = int(t_pk.size)
    if t_pk.size < cfg.min_peaks:
        raise InsufficientDataError(
            f"{t_pk.size} peaks < {cfg.min_peaks} and no convergent tail"
        )
    n_clusters, peak_spread = _cluster_peaks(z_pk, cfg)
    metrics["peak_spread"] = peak_spread
    if n_clusters is not None and _intervals_repeat(t_pk, n_clusters, cfg):
        metrics["z_periodicity"] = n_clusters
        return AttractorVerdict(AttractorKind.LIMIT_CYCLE, z_periodicity=n_clusters, metrics=metrics)

    frac = _line_fraction(traj.Z, cfg)
    metrics["line_fraction"] = frac
    if frac > cfg.line_variance:
        return AttractorVerdict(AttractorKind.LIMIT_TORUS, metrics=metrics)
    if lyapunov is not None and lyapunov > cfg.lyap_threshold:
        return AttractorVerdict(AttractorKind.CHAOTIC, metrics=metrics)
    return AttractorVerdict(AttractorKind.UNDETERMINED, metrics=metrics)


def lyapunov_largest(
    advance,
    v0: np.ndarray,
    horizon: float,
    renorm_interval: float,
    d0: float = 1e-7,
    skip_fraction: float = 0.1,
    seed: int = 0,
) -> float:
    """Largest Lyapunov exponent by two-trajectory renormalization.

    `advance(v, T)` integrates a flat state vector forward by time T (t units)
    and returns the new vector; the returned rate is then in 1/t.  The twin
    starts offset by d0 along a seeded random direction; the first
    skip_fraction of the renormalization intervals is discarded while the
    offset aligns with the leading direction.

    Raises:
        FloatingPointError: if either trajectory diverges.
    """
    v = np.array(v0, float)
    rng = np.random.Generator(np.random.Philox(seed))
    u = rng.standard_normal(v.size)
    u /= np.linalg.norm(u)
    w = v + d0 * u
    n = max(int(round(horizon / renorm_interval)), 2)
    n_skip = int(math.ceil(skip_fraction * n))
    log_sum = 0.0
    counted = 0
    for i in range(n):
        v = np.asarray(advance(v, renorm_interval), float)
        w = np.asarray(advance(w, renorm_interval), float)
        d = float(np.linalg.norm(w - v))
        if not np.isfinite(d) or d == 0.0:
            raise FloatingPointError("Lyapunov twin collapsed or diverged")
        if i >= n_skip:
            log_sum += math.log(d / d0)
            counted += 1
        w = v + (d0 / d) * (w - v)
    return log_sum / (counted * renorm_interval)


def streamwise_periodicity(s: SpectralState) -> int:
    """Dominant streamwise mode number: argmax over l >= 1 of sum_m |theta_hat_lm|^2."""
    power = np.sum(np.abs(s.theta_hat[1:]) ** 2, axis=1)
    return int(np.argmax(power)) + 1
