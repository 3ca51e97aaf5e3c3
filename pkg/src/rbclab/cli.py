"""Command-line front end: run, sweep, compare, classify, project.

Configuration can come from a YAML file (--config) whose keys mirror the
flag names; flags override file values.  Every run directory receives the
fully resolved configuration, so re-running from it reproduces the outputs
byte for byte.  Exit codes: 0 success, 1 configuration error, 2 solver
failure.
"""

from __future__ import annotations

import csv
import json
import os
import sys

import click
import numpy as np
import yaml

from .analysis import (
    AttractorKind,
    ClassifierConfig,
    InsufficientDataError,
    classify,
    truncate_transient,
)
from .dns import Grid, default_grid, read_field_dump, write_field_dump
from .pseudospectral import min_grid
from .harness import (
    BIFURCATION_COLUMNS,
    ICSpec,
    _bifurcation_record,
    classify_run,
    compare_trajectories,
    run_model,
    sweep_r,
)
from .params import make_params
from .state import read_snapshot_file, write_snapshot_file
from .stepping import BlowUpError, StepperConfig
from .trajectory import read_trajectory_csv, write_trajectory_csv
from .transforms import project_XYZ_from_fields, synthesize

_DEFAULT_LM = {"lorenz": (1, 2), "gele": (10, 10)}


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    with open(path) as fh:
        doc = yaml.safe_load(fh) or {}
    if not isinstance(doc, dict):
        raise ValueError(f"config file {path} must hold a mapping")
    return doc


def _merge(cfg: dict, **flags) -> dict:
    """File values overridden by any flag the user actually passed."""
    out = dict(cfg)
    for key, val in flags.items():
        if val is not None:
            out[key] = val
    return out


def _ic_from(cfg: dict, r: float) -> ICSpec:
    raw = cfg.get("ic", "lorenz_like")
    if isinstance(raw, str):
        raw = {"kind": raw}
    kind = raw.get("kind", "lorenz_like")
    return ICSpec(
        kind=kind,
        X=float(raw.get("X", 0.01)),
        Y=float(raw.get("Y", 0.0)),
        Z=float(raw.get("Z", r - 1.0)),
        epsilon=float(raw.get("epsilon", 1e-4)),
    )


def _resolve_run(cfg: dict) -> dict:
    if "model" not in cfg:
        raise ValueError("model is required (flag --model or config key 'model')")
    model = cfg["model"]
    if "r" not in cfg:
        raise ValueError("r is required")
    r = float(cfg["r"])
    if model == "dns":
        g = default_grid(r)
        L = int(cfg.get("L", g.L_eff))
        M = int(cfg.get("M", g.M_eff))
    else:
        dl, dm = _DEFAULT_LM.get(model, (10, 10))
        L = int(cfg.get("L", dl))
        M = int(cfg.get("M", dm))
    ic = _ic_from(cfg, r)
    return {
        "model": model,
        "r": r,
        "L": L,
        "M": M,
        "dt": float(cfg.get("dt", 1e-5)),
        "t_end": float(cfg.get("t_end", 5.0)),
        "output_every": int(cfg.get("output_every", 100)),
        "seed": None if cfg.get("seed") is None else int(cfg["seed"]),
        "nonlinear": str(cfg.get("nonlinear", "auto")),
        "ic": {"kind": ic.kind, "X": ic.X, "Y": ic.Y, "Z": ic.Z, "epsilon": ic.epsilon},
    }


def _verdict_doc(verdict) -> dict:
    return {
        "kind": verdict.kind.value,
        "z_periodicity": verdict.z_periodicity,
        "metrics": {k: v for k, v in verdict.metrics.items() if v is not None},
    }


_run_options = [
    click.option("--config", "config_path", type=click.Path(exists=True), default=None),
    click.option("--model", type=click.Choice(["lorenz", "gele", "dns"]), default=None),
    click.option("--r", type=float, default=None),
    click.option("--L", "L", type=int, default=None),
    click.option("--M", "M", type=int, default=None),
    click.option("--dt", type=float, default=None),
    click.option("--t-end", "t_end", type=float, default=None),
    click.option("--output-every", "output_every", type=int, default=None),
    click.option("--ic", type=click.Choice(["lorenz_like", "random_modes", "random_fields"]), default=None),
    click.option("--X", "X", type=float, default=None),
    click.option("--Y", "Y", type=float, default=None),
    click.option("--Z", "Z", type=float, default=None),
    click.option("--epsilon", type=float, default=None),
    click.option("--seed", type=int, default=None),
    click.option(
        "--nonlinear",
        type=click.Choice(["auto", "direct", "transform"]),
        default=None,
        help="Quadratic-term evaluation for the spectral expansion model.",
    ),
]


def _with_run_options(fn):
    for opt in reversed(_run_options):
        fn = opt(fn)
    return fn


def _gather_flags(model, r, L, M, dt, t_end, output_every, ic, X, Y, Z, epsilon, seed, nonlinear=None) -> dict:
    flags = _merge(
        {}, model=model, r=r, L=L, M=M, dt=dt, t_end=t_end,
        output_every=output_every, seed=seed, nonlinear=nonlinear,
    )
    ic_flags = _merge({}, kind=ic, X=X, Y=Y, Z=Z, epsilon=epsilon)
    if ic_flags:
        flags["ic"] = ic_flags
    return flags


def _merged_config(config_path: str | None, flags: dict) -> dict:
    cfg = _load_config(config_path)
    ic_file = cfg.get("ic")
    cfg = _merge(cfg, **{k: v for k, v in flags.items() if k != "ic"})
    if "ic" in flags:
        base = ic_file if isinstance(ic_file, dict) else ({"kind": ic_file} if ic_file else {})
        cfg["ic"] = _merge(base, **flags["ic"])
    return cfg


@click.group()
def cli():
    """Convection model laboratory: Lorenz, spectral expansion, and DNS."""


@cli.command("run")
@_with_run_options
@click.option("--out", type=click.Path(), required=True, help="Output directory.")
@click.option("--snapshots", is_flag=True, default=False, help="Keep per-sample snapshots.")
@click.option("--t-cut", "t_cut", type=float, default=3.0, show_default=True)
def cmd_run(config_path, out, snapshots, t_cut, ic, X, Y, Z, epsilon, **flags):
    """Integrate one model and write trajectory, snapshot, and verdict files."""
    flags = _gather_flags(ic=ic, X=X, Y=Y, Z=Z, epsilon=epsilon, **flags)
    rc = _resolve_run(_merged_config(config_path, flags))
    p = make_params(rc["r"], rc["L"], rc["M"])
    icspec = ICSpec(**rc["ic"])
    cfg = StepperConfig(dt=rc["dt"], t_end=rc["t_end"], output_every=rc["output_every"])
    grid = None
    if rc["model"] == "dns":
        g = default_grid(rc["r"])
        if (rc["L"], rc["M"]) == (g.L_eff, g.M_eff):
            grid = g
        else:
            grid = Grid(*min_grid(rc["L"], rc["M"]), L_eff=rc["L"], M_eff=rc["M"])
    traj = run_model(
        rc["model"], p, icspec, cfg, seed=rc["seed"], grid=grid,
        snapshots=snapshots, nonlinear=rc["nonlinear"],
    )

    os.makedirs(out, exist_ok=True)
    _atomic_write(os.path.join(out, "config.yaml"), yaml.safe_dump(rc, sort_keys=True))
    _atomic_csv(os.path.join(out, "trajectory.csv"), traj)
    final = traj.final_state
    write_snapshot_file(os.path.join(out, "final_state.json"), final, p.sigma, p.r)
    n_x = max(64, 2 * (2 * final.L + 1))
    n_z = max(64, 2 * (final.M + 1))
    write_field_dump(
        os.path.join(out, "fields.txt"), synthesize(final, p, n_x, n_z), p.l_x
    )
    if snapshots:
        snap_dir = os.path.join(out, "snapshots")
        os.makedirs(snap_dir, exist_ok=True)
        for i, (ts, s) in enumerate(traj.snapshots):
            write_snapshot_file(os.path.join(snap_dir, f"{i:06d}.json"), s, p.sigma, p.r)
    try:
        verdict = classify_run(rc["model"], p, traj, t_cut=t_cut)
        doc = _verdict_doc(verdict)
    except ValueError as exc:
        doc = {"kind": None, "error": str(exc)}
    _atomic_write(os.path.join(out, "verdict.json"), json.dumps(doc, indent=2) + "\n")
    click.echo(yaml.safe_dump(rc, sort_keys=True).rstrip())
    click.echo(f"verdict: {doc.get('kind')}")


@cli.command("sweep")
@_with_run_options
@click.option("--r-list", "r_list", type=str, default=None,
              help="Comma list or start:stop[:step] range of r values.")
@click.option("--lm-list", "lm_list", type=str, default=None,
              help="Comma list of LxM pairs (e.g. 1x2,4x4) at fixed r.")
@click.option("--t-cut", "t_cut", type=float, default=3.0, show_default=True)
@click.option("--no-lyapunov", is_flag=True, default=False,
              help="Skip Lyapunov estimates for Undetermined rows.")
@click.option("--out", type=click.Path(), required=True, help="Output CSV path.")
def cmd_sweep(config_path, r_list, lm_list, t_cut, no_lyapunov, out, ic, X, Y, Z, epsilon, **flags):
    """Bifurcation sweep over r, or a truncation sweep over (L, M) pairs."""
    flags = _gather_flags(ic=ic, X=X, Y=Y, Z=Z, epsilon=epsilon, **flags)
    cfg = _merged_config(config_path, flags)
    r_list = r_list if r_list is not None else cfg.get("r_list")
    lm_list = lm_list if lm_list is not None else cfg.get("lm_list")
    if (r_list is None) == (lm_list is None):
        raise ValueError("exactly one of --r-list / --lm-list is required")
    if lm_list is not None:
        _sweep_lm(cfg, _parse_lm_list(lm_list), t_cut, out)
        return
    r_values = _parse_r_list(r_list)
    model = cfg.get("model", "dns")
    tmp = out + ".tmp"
    with open(tmp, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(BIFURCATION_COLUMNS)

        def on_row(row):
            w.writerow(_bifurcation_record(row))
            fh.flush()
            click.echo(f"r = {row.r:g}: {row.kind.value}" + (f" ({row.error})" if row.error else ""))

        sweep_r(
            model, r_values, lambda r: _ic_from(cfg, r),
            L=cfg.get("L"), M=cfg.get("M"),
            dt=None if cfg.get("dt") is None else float(cfg["dt"]),
            t_end=float(cfg.get("t_end", 8.0)),
            output_every=int(cfg.get("output_every", 10)),
            seed=None if cfg.get("seed") is None else int(cfg["seed"]),
            t_cut=t_cut,
            with_lyapunov=not no_lyapunov,
            on_row=on_row,
        )
    os.replace(tmp, out)


def _sweep_lm(cfg: dict, lm_pairs: list[tuple[int, int]], t_cut: float, out: str) -> None:
    if "r" not in cfg:
        raise ValueError("an (L, M) sweep requires r")
    r = float(cfg["r"])
    model = cfg.get("model", "gele")
    if model != "gele":
        raise ValueError("(L, M) sweeps apply to the gele model")
    ic = _ic_from(cfg, r)
    scfg = StepperConfig(
        dt=float(cfg.get("dt", 1e-5)),
        t_end=float(cfg.get("t_end", 5.0)),
        output_every=int(cfg.get("output_every", 100)),
    )
    seed = None if cfg.get("seed") is None else int(cfg["seed"])
    tmp = out + ".tmp"
    with open(tmp, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["L", "M", "kind", "X", "Y", "Z"])
        for L, M in lm_pairs:
            p = make_params(r, L, M)
            try:
                traj = run_model("gele", p, ic, scfg, seed=seed)
                x, y, z = float(traj.X[-1]), float(traj.Y[-1]), float(traj.Z[-1])
                eff_cut = min(t_cut, 0.5 * scfg.t_end)
                try:
                    verdict = classify_run("gele", p, traj, t_cut=eff_cut, with_lyapunov=False)
                    kind = verdict.kind.value
                except InsufficientDataError:
                    kind = AttractorKind.UNDETERMINED.value
            except FloatingPointError as exc:
                kind, x, y, z = f"error: {exc}", np.nan, np.nan, np.nan
            w.writerow([L, M, kind, repr(x), repr(y), repr(z)])
            fh.flush()
            click.echo(f"(L, M) = ({L}, {M}): {kind}")
    os.replace(tmp, out)


@cli.command("compare")
@click.argument("run_a", type=click.Path(exists=True))
@click.argument("run_b", type=click.Path(exists=True))
def cmd_compare(run_a, run_b):
    """Difference report between two runs (directories or trajectory CSVs)."""
    a = _load_run(run_a)
    b = _load_run(run_b)
    report = compare_trajectories(a, b)
    click.echo(json.dumps(report, indent=2))


def _load_run(path: str):
    if os.path.isdir(path):
        traj = read_trajectory_csv(os.path.join(path, "trajectory.csv"))
        snap = os.path.join(path, "final_state.json")
        if os.path.exists(snap):
            traj.final_state, _, _ = read_snapshot_file(snap)
        return traj
    return read_trajectory_csv(path)


@cli.command("classify")
@click.argument("csv_path", type=click.Path(exists=True))
@click.option("--t-cut", "t_cut", type=float, default=3.0, show_default=True)
@click.option("--lyapunov", type=float, default=None,
              help="Externally computed largest-Lyapunov estimate (1/t).")
def cmd_classify(csv_path, t_cut, lyapunov):
    """Re-classify an existing trajectory CSV."""
    traj = read_trajectory_csv(csv_path)
    post = truncate_transient(traj, t_cut) if t_cut > float(traj.t[0]) else traj
    verdict = classify(post, ClassifierConfig(), lyapunov=lyapunov)
    click.echo(json.dumps(_verdict_doc(verdict), indent=2))


@cli.command("project")
@click.argument("dump_path", type=click.Path(exists=True))
@click.option("--r", type=float, required=True, help="Normalized Rayleigh number of the run.")
def cmd_project(dump_path, r):
    """Lorenz amplitudes (X, Y, Z) of a field dump, by direct quadrature."""
    f, _ = read_field_dump(dump_path)
    p = make_params(r, 1, 2)
    x, y, z = project_XYZ_from_fields(f, p)
    click.echo(json.dumps({"t": f.t, "X": x, "Y": y, "Z": z}))


def _parse_r_list(text) -> list[float]:
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    text = str(text).strip()
    if not text:
        raise ValueError("empty r list")
    if ":" in text:
        parts = [float(v) for v in text.split(":")]
        if len(parts) == 2:
            start, stop, step = parts[0], parts[1], 1.0
        elif len(parts) == 3:
            start, stop, step = parts
        else:
            raise ValueError(f"bad r range {text!r}; expected start:stop[:step]")
        if step <= 0 or stop < start:
            raise ValueError(f"bad r range {text!r}")
        n = int(np.floor((stop - start) / step + 1e-9)) + 1
        return [start + i * step for i in range(n)]
    return [float(v) for v in text.split(",")]


def _parse_lm_list(text) -> list[tuple[int, int]]:
    if isinstance(text, (list, tuple)):
        return [(int(a), int(b)) for a, b in text]
    pairs = []
    for item in str(text).split(","):
        item = item.strip()
        if not item:
            continue
        a, sep, b = item.partition("x")
        if not sep:
            raise ValueError(f"bad (L, M) pair {item!r}; expected LxM")
        pairs.append((int(a), int(b)))
    if not pairs:
        raise ValueError("empty (L, M) list")
    return pairs


def _atomic_write(path: str, text: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _atomic_csv(path: str, traj) -> None:
    tmp = path + ".tmp"
    write_trajectory_csv(tmp, traj)
    os.replace(tmp, path)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Abort:
        return 1
    except click.ClickException as exc:
        click.echo(f"config error: {exc.format_message()}", err=True)
        return 1
    except (BlowUpError, FloatingPointError) as exc:
        click.echo(f"solver failure: {exc}", err=True)
        return 2
    except (ValueError, OSError) as exc:
        click.echo(f"config error: {exc}", err=True)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
