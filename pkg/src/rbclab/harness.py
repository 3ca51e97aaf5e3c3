"""Run orchestration shared by the CLI and the test harness.

Builds seeded initial states, runs any of the three models behind one
Trajectory interface, estimates largest-Lyapunov exponents with
model-appropriate advancers, and drives bifurcation sweeps over r.  Everything
here is deterministic in (config, seed); the PRNG is numpy's Philox
(counter-based, version-stable), so seeds are portable.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import gele
from .analysis import (
    AttractorKind,
    AttractorVerdict,
    BifurcationRow,
    ClassifierConfig,
    InsufficientDataError,
    classify,
    find_z_maxima,
    lyapunov_largest,
    truncate_transient,
)
from .dns import Grid, default_grid, integrate_dns
from .lorenz import integrate_lorenz
from .params import Params, make_params
from .pseudospectral import TransformPlan, min_grid
from .state import LorenzState, SpectralState
from .stepping import DT_CEILING, LinearPropagator, StepperConfig
from .trajectory import Trajectory
from .transforms import lorenz_to_spectral, synthesize
from .diagnostics import energies_spectral, energy_rates

__all__ = [
    "ICSpec",
    "make_initial_state",
    "run_model",
    "lorenz_energy_coefficients",
    "model_advancer",
    "estimate_lyapunov",
    "classify_run",
    "sweep_r",
    "write_bifurcation_csv",
    "read_bifurcation_csv",
    "compare_trajectories",
]

MODELS = ("lorenz", "gele", "dns")


@dataclass(frozen=True)
class ICSpec:
    """Initial-condition specification.

    kind "lorenz_like" places (X, Y, Z) on the three Lorenz amplitudes and
    leaves every other mode zero.  The random kinds fill all retained modes
    with seeded uniform entries bounded by epsilon: "random_modes" bounds the
    mode amplitudes, "random_fields" additionally rescales so the synthesized
    physical fields satisfy max(|psi|, |theta|) < epsilon.
    """

    kind: str = "lorenz_like"
    X: float = 0.01
    Y: float = 0.0
    Z: float = 0.0
    epsilon: float = 1e-4

    def __post_init__(self):
        if self.kind not in ("lorenz_like", "random_modes", "random_fields"):
            raise ValueError(f"unknown IC kind {self.kind!r}")
        if self.kind != "lorenz_like" and not 0.0 < self.epsilon <= 1.0:
            raise ValueError("epsilon must lie in (0, 1] for random ICs")


def make_initial_state(ic: ICSpec, p: Params, seed: int | None = None) -> SpectralState:
    """Seeded initial spectral state at truncation (p.L, p.M).

    Raises:
        ValueError: if a random kind is requested without a seed.
    """
    if ic.kind == "lorenz_like":
        return lorenz_to_spectral(ic.X, ic.Y, ic.Z, p)
    if seed is None:
        raise ValueError(f"IC kind {ic.kind!r} requires a seed")
    rng = np.random.Generator(np.random.Philox(seed))
    shape = (p.L + 1, p.M)
    # re/im each bounded by eps/sqrt(2) keeps every |amplitude| < eps
    half = ic.epsilon / np.sqrt(2.0)
    psi = rng.uniform(-half, half, shape) + 1j * rng.uniform(-half, half, shape)
    theta = rng.uniform(-half, half, shape) + 1j * rng.uniform(-half, half, shape)
    s = SpectralState(psi, theta, 0.0)
    s.enforce_reality()
    if ic.kind == "random_fields":
        # the bound applies to the continuum fields; check on an oversampled
        # grid and keep a margin for the remaining interpolation slack
        f = synthesize(s, p, max(4 * (2 * p.L + 1), 32), max(4 * (p.M + 1), 32))
        for hat, block in ((s.psi_hat, f.psi), (s.theta_hat, f.theta)):
            peak = float(np.max(np.abs(block)))
            if peak >= 0.9 * ic.epsilon:
                hat *= 0.9 * ic.epsilon / peak
    return s


# --- Lorenz model behind the Trajectory interface --------------------------


def lorenz_energy_coefficients(p: Params) -> tuple[float, float, float, float]:
    """(cK, cP, cQ, cV) with E_K = cK X^2, E_P = cP Z, Q = cQ Z, V = cV X^2.

    Only the psi_11 amplitude (prop. to X) carries kinetic energy and only
    theta_02 (prop. to Z) carries potential energy, so the full energy
    formulas collapse to these four constants.
    """
    sx = lorenz_to_spectral(1.0, 0.0, 0.0, p)
    sz = lorenz_to_spectral(0.0, 0.0, 1.0, p)
    cK = energies_spectral(sx, p)[0]
    cP = energies_spectral(sz, p)[1]
    cQ = energy_rates(sz, p)[0]
    cV = energy_rates(sx, p)[1]
    return cK, cP, cQ, cV


def _lorenz_trajectory(s0: LorenzState, p: Params, cfg: StepperConfig) -> Trajectory:
    """Integrate the Lorenz system and report it like the spectral models."""
    dtau = cfg.dt * p.kappa2_11
    lt = integrate_lorenz(s0, tau_end=cfg.t_end * p.kappa2_11, dtau=dtau, p=p)
    sl = slice(None, None, cfg.output_every)
    X, Y, Z = lt.X[sl], lt.Y[sl], lt.Z[sl]
    t = lt.tau[sl] / p.kappa2_11
    cK, cP, cQ, cV = lorenz_energy_coefficients(p)
    E_K = cK * X**2
    E_P = cP * Z
    final = lorenz_to_spectral(lt.X[-1], lt.Y[-1], lt.Z[-1], p, t=float(lt.tau[-1] / p.kappa2_11))
    return Trajectory(
        t=t, X=X, Y=Y, Z=Z,
        E_K=E_K, E_P=E_P, E_T=E_K + E_P,
        Q=cQ * Z, V=cV * X**2,
        final_state=final,
    )


def run_model(
    model: str,
    p: Params,
    ic: ICSpec,
    cfg: StepperConfig,
    seed: int | None = None,
    grid: Grid | None = None,
    snapshots: bool = False,
    nonlinear: str = "auto",
) -> Trajectory:
    """One integration of the selected model, any IC kind, unified output.

    For the DNS the grid defaults to the r-dependent production resolution;
    p's truncation must match the grid's.  nonlinear selects the quadratic-term
    evaluation for the gele model ("direct", "transform", or "auto"); the
    direct double sums keep exactly-zero mode families exactly zero, which
    matters when an initial condition lies on an invariant subspace.
    """
    if model == "lorenz":
        if ic.kind != "lorenz_like":
            raise ValueError("the lorenz model supports only lorenz_like ICs")
        return _lorenz_trajectory(LorenzState(ic.X, ic.Y, ic.Z), p, cfg)
    s0 = make_initial_state(ic, p, seed)
    if model == "gele":
        return gele.integrate(s0, p, cfg, nonlinear=nonlinear, snapshots=snapshots)
    if model == "dns":
        g = grid if grid is not None else default_grid(p.r)
        return integrate_dns(s0, p, g, cfg, snapshots=snapshots)
    raise ValueError(f"unknown model {model!r}; expected one of {MODELS}")


# --- Lyapunov adapters -----------------------------------------------------


def _pack(ps: np.ndarray, th: np.ndarray) -> np.ndarray:
    return np.concatenate([ps.real.ravel(), ps.imag.ravel(), th.real.ravel(), th.imag.ravel()])


def _unpack(v: np.ndarray, L: int, M: int) -> tuple[np.ndarray, np.ndarray]:
    parts = v.reshape(4, L + 1, M)
    return parts[0] + 1j * parts[1], parts[2] + 1j * parts[3]


def model_advancer(model: str, p: Params, dt: float, grid: Grid | None = None):
    """advance(v, T) callable over flat state vectors, for lyapunov_largest.

    The state vector is (X, Y, Z) for the Lorenz model and the stacked
    re/im parts of (psi_hat, theta_hat) for the spectral models.  Nonlinear
    terms are stepped forward-Euler (the AB2 history does not survive
    renormalization boundaries); the linear operator stays implicit.
    """
    if model == "lorenz":
        dtau = dt * p.kappa2_11

        def advance(v, T):
            lt = integrate_lorenz(LorenzState(v[0], v[1], v[2]), T * p.kappa2_11, dtau, p)
            return np.array([lt.X[-1], lt.Y[-1], lt.Z[-1]])

        return advance

    if model == "gele":
        work = (2 * p.L + 1) ** 2 * p.M * (p.M + 1)
        if work > gele._TRANSFORM_THRESHOLD:
            fn = TransformPlan.for_truncation(p).nonlinear
        else:
            fn = gele._get_plan(p).evaluate
    elif model == "dns":
        g = grid if grid is not None else default_grid(p.r)
        fn = TransformPlan.cached(p, g.N_x, g.N_z).nonlinear
    else:
        raise ValueError(f"unknown model {model!r}")
    prop = LinearPropagator(p, dt, p.L, p.M)

    def advance(v, T):
        ps, th = _unpack(v, p.L, p.M)
        for _ in range(max(int(round(T / dt)), 1)):
            n_psi, n_theta = fn(ps, th)
            rp = ps + dt * (-n_psi * prop.inv_k2)
            rt = th + dt * n_theta
            ps, th = prop.apply(rp, rt)
            ps[0] = ps[0].real
            th[0] = th[0].real
        return _pack(ps, th)

    return advance


def estimate_lyapunov(
    model: str,
    p: Params,
    state: SpectralState | LorenzState,
    dt: float,
    horizon: float = 3.0,
    renorm_interval: float = 0.05,
    grid: Grid | None = None,
    seed: int = 0,
) -> float:
    """Largest-Lyapunov estimate (1/t units) starting from a given state."""
    advance = model_advancer(model, p, dt, grid)
    if model == "lorenz":
        v0 = state.as_array() if isinstance(state, LorenzState) else None
        if v0 is None:
            raise TypeError("lorenz Lyapunov estimate needs a LorenzState")
    else:
        v0 = _pack(state.psi_hat, state.theta_hat)
    return lyapunov_largest(advance, v0, horizon, renorm_interval, seed=seed)


# --- classification and sweeps ---------------------------------------------


def classify_run(
    model: str,
    p: Params,
    traj: Trajectory,
    t_cut: float = 3.0,
    cls_cfg: ClassifierConfig | None = None,
    dt_lyap: float = 1e-4,
    grid: Grid | None = None,
    with_lyapunov: bool = True,
) -> AttractorVerdict:
    """Truncate the transient and classify; on an Undetermined first pass,
    estimate the largest Lyapunov exponent from the final state and retry."""
    post = truncate_transient(traj, t_cut)
    verdict = classify(post, cls_cfg)
    if verdict.kind is AttractorKind.UNDETERMINED and with_lyapunov and traj.final_state is not None:
        state = traj.final_state
        if model == "lorenz":
            state = LorenzState(float(traj.X[-1]), float(traj.Y[-1]), float(traj.Z[-1]))
        ly = estimate_lyapunov(model, p, state, dt=dt_lyap, grid=grid)
        verdict = classify(post, cls_cfg, lyapunov=ly)
    return verdict


def _grid_for(model: str, r: float, L: int | None, M: int | None) -> Grid | None:
    if model != "dns":
        return None
    if L is None or M is None:
        return default_grid(r)
    n_x, n_z = min_grid(L, M)
    return Grid(N_x=n_x, N_z=n_z, L_eff=L, M_eff=M)


def sweep_r(
    model: str,
    r_values,
    ic: ICSpec,
    L: int | None = None,
    M: int | None = None,
    dt: float | None = None,
    t_end: float = 8.0,
    output_every: int = 10,
    seed: int | None = 0,
    t_cut: float = 3.0,
    cls_cfg: ClassifierConfig | None = None,
    with_lyapunov: bool = True,
    on_row=None,
) -> list[BifurcationRow]:
    """One integrate+classify per r; failures are recorded, the sweep goes on.

    `ic` is either an ICSpec used for every row or a callable r -> ICSpec
    (so r-dependent defaults like Z = r - 1 stay consistent).  Rows are
    deterministic and mutually independent; `on_row(row)` fires as each
    completes (used for incremental CSV serialization).

    The default dt is model-dependent: the ceiling step sustains spurious
    chaotic transients in the Lorenz system and destabilizes the AB2 start of
    the grid models at large r, so sweeps default well below it.
    """
    if dt is None:
        dt = 1e-5 if model == "lorenz" else 5e-5
    rows: list[BifurcationRow] = []
    for r in r_values:
        try:
            rows.append(
                _sweep_row(model, float(r), ic, L, M, dt, t_end, output_every,
                           seed, t_cut, cls_cfg, with_lyapunov)
            )
        except (FloatingPointError, InsufficientDataError, ValueError) as exc:
            rows.append(
                BifurcationRow(
                    r=float(r), kind=AttractorKind.UNDETERMINED, z_periodicity=None,
                    z_max_values=[], z_max_range=(np.nan, np.nan), n_peaks=0,
                    error=f"{type(exc).__name__}: {exc}",
                )
            )
        if on_row is not None:
            on_row(rows[-1])
    return rows


def _sweep_row(model, r, ic, L, M, dt, t_end, output_every, seed, t_cut, cls_cfg, with_lyapunov):
    if callable(ic):
        ic = ic(r)
    grid = _grid_for(model, r, L, M)
    if grid is not None:
        p = make_params(r, grid.L_eff, grid.M_eff)
    elif model == "lorenz":
        p = make_params(r, 1, 2)
    else:
        p = make_params(r, L if L is not None else 10, M if M is not None else 10)
    cfg = StepperConfig(dt=dt, t_end=t_end, output_every=output_every)
    traj = run_model(model, p, ic, cfg, seed=seed, grid=grid)
    verdict = classify_run(model, p, traj, t_cut, cls_cfg, grid=grid, with_lyapunov=with_lyapunov)
    post = truncate_transient(traj, t_cut)
    _, z_pk = find_z_maxima(post)
    z_list = [float(z) for z in z_pk]
    z_range = (min(z_list), max(z_list)) if z_list else (float(post.Z[-1]), float(post.Z[-1]))
    return BifurcationRow(
        r=r,
        kind=verdict.kind,
        z_periodicity=verdict.z_periodicity,
        z_max_values=z_list,
        z_max_range=z_range,
        n_peaks=len(z_list),
        lyapunov=verdict.metrics.get("lyapunov"),
    )


BIFURCATION_COLUMNS = ["r", "kind", "z_periodicity", "z_max_min", "z_max_max", "n_peaks", "lyapunov"]


def write_bifurcation_csv(path: str, rows: list[BifurcationRow]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(BIFURCATION_COLUMNS)
        for row in rows:
            w.writerow(_bifurcation_record(row))


def _bifurcation_record(row: BifurcationRow) -> list:
    return [
        repr(float(row.r)),
        row.kind.value,
        "" if row.z_periodicity is None else row.z_periodicity,
        repr(float(row.z_max_range[0])),
        repr(float(row.z_max_range[1])),
        row.n_peaks,
        "" if row.lyapunov is None else repr(float(row.lyapunov)),
    ]


def read_bifurcation_csv(path: str) -> list[BifurcationRow]:
    rows = []
    with open(path, newline="") as fh:
        rd = csv.DictReader(fh)
        if rd.fieldnames != BIFURCATION_COLUMNS:
            raise ValueError(f"unexpected bifurcation CSV header {rd.fieldnames}")
        for rec in rd:
            rows.append(
                BifurcationRow(
                    r=float(rec["r"]),
                    kind=AttractorKind(rec["kind"]),
                    z_periodicity=int(rec["z_periodicity"]) if rec["z_periodicity"] else None,
                    z_max_values=[],
                    z_max_range=(float(rec["z_max_min"]), float(rec["z_max_max"])),
                    n_peaks=int(rec["n_peaks"]),
                    lyapunov=float(rec["lyapunov"]) if rec["lyapunov"] else None,
                )
            )
    return rows


# --- run comparison --------------------------------------------------------


def compare_trajectories(a: Trajectory, b: Trajectory) -> dict:
    """Max and rms differences of the (X, Y, Z) series on the overlap.

    The coarser-sampled series is compared at its own sample times with the
    other linearly interpolated.  Final-state mode differences are included
    when both trajectories carry final states of equal truncation.

    Raises:
        ValueError: if the time ranges do not overlap.
    """
    lo = max(float(a.t[0]), float(b.t[0]))
    hi = min(float(a.t[-1]), float(b.t[-1]))
    if hi <= lo:
        raise ValueError(f"time ranges [{a.t[0]}, {a.t[-1]}] and [{b.t[0]}, {b.t[-1]}] are disjoint")
    coarse, fine = (a, b) if len(a) <= len(b) else (b, a)
    keep = (coarse.t >= lo) & (coarse.t <= hi)
    t = coarse.t[keep]
    report: dict = {"t_overlap": [lo, hi], "n_samples": int(t.size)}
    for name in ("X", "Y", "Z"):
        d = getattr(coarse, name)[keep] - np.interp(t, fine.t, getattr(fine, name))
        report[f"max_d{name}"] = float(np.max(np.abs(d)))
        report[f"rms_d{name}"] = float(np.sqrt(np.mean(d**2)))
    fa, fb = a.final_state, b.final_state
    if fa is not None and fb is not None and fa.psi_hat.shape == fb.psi_hat.shape:
        report["max_dpsi_hat"] = float(np.max(np.abs(fa.psi_hat - fb.psi_hat)))
        report["max_dtheta_hat"] = float(np.max(np.abs(fa.theta_hat - fb.theta_hat)))
    return report
