import json

import numpy as np
import pytest


@pytest.fixture
def trajectory_csv(tmp_path):
    """Small but schema-complete trajectory file."""
    t = np.linspace(0.0, 2.0, 201)
    X = 10.0 * np.sin(7.0 * t)
    Y = 10.0 * np.cos(7.0 * t)
    Z = 25.0 + 5.0 * np.sin(14.0 * t)
    E_K = 0.5 * (X**2 + Y**2)
    E_P = -100.0 * Z
    path = tmp_path / "trajectory.csv"
    lines = ["t,X,Y,Z,E_K,E_P,E_T,Q,V"]
    for i in range(t.size):
        row = [t[i], X[i], Y[i], Z[i], E_K[i], E_P[i], E_K[i] + E_P[i], 1.0, -1.0]
        lines.append(",".join(repr(float(v)) for v in row))
    path.write_text("\n".join(lines) + "\n")
    return str(path)


@pytest.fixture
def state_json(tmp_path):
    L, M = 4, 4
    rng = np.random.default_rng(3)
    doc = {
        "sigma": 10.0,
        "r": 30.0,
        "L": L,
        "M": M,
        "t": 5.0,
        "psi_hat": [
            [[float(rng.normal()), float(rng.normal())] for _ in range(M)]
            for _ in range(L + 1)
        ],
        "theta_hat": [
            [[float(rng.normal()), float(rng.normal())] for _ in range(M)]
            for _ in range(L + 1)
        ],
    }
    path = tmp_path / "state.json"
    path.write_text(json.dumps(doc))
    return str(path)


@pytest.fixture
def field_dump(tmp_path):
    N_x, N_z = 16, 10
    x = np.arange(N_x) * 2.0 * np.sqrt(2.0) / N_x
    z = np.linspace(0.0, 1.0, N_z)
    psi = np.sin(np.pi * x)[:, None] * np.sin(np.pi * z)[None, :]
    theta = np.cos(np.pi * x)[:, None] * np.sin(2 * np.pi * z)[None, :]
    lines = [json.dumps({"N_x": N_x, "N_z": N_z, "l_x": 2.0 * np.sqrt(2.0), "t": 5.0})]
    for f in (psi, theta):
        for i in range(N_x):
            lines.append(" ".join(repr(float(v)) for v in f[i]))
        lines.append("")
    path = tmp_path / "fields.txt"
    path.write_text("\n".join(lines))
    return str(path)


@pytest.fixture
def bifurcation_csv(tmp_path):
    rows = [
        "r,kind,z_periodicity,z_max_min,z_max_max,n_peaks,lyapunov",
        "30.0,FixedPoint,,29.75,29.75,0,",
        "40.0,FixedPoint,,39.2,39.2,0,",
        "55.0,LimitCycle,1,55.85,55.85,450,",
        "70.0,LimitTorus,,68.2,74.9,500,",
        "80.0,LimitTorus,,75.1,88.0,520,",
        "150.0,Chaotic,,120.0,170.0,600,3.1",
    ]
    path = tmp_path / "bifurcation.csv"
    path.write_text("\n".join(rows) + "\n")
    return str(path)
