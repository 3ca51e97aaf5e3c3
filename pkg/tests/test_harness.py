import numpy as np
import pytest

from rbclab.analysis import AttractorKind, BifurcationRow
from rbclab.diagnostics import energies_spectral, energy_rates
from rbclab.harness import (
    ICSpec,
    compare_trajectories,
    estimate_lyapunov,
    lorenz_energy_coefficients,
    make_initial_state,
    read_bifurcation_csv,
    run_model,
    sweep_r,
    write_bifurcation_csv,
)
from rbclab.params import make_params
from rbclab.state import LorenzState
from rbclab.stepping import StepperConfig
from rbclab.transforms import lorenz_to_spectral


class TestICSpec:
    def test_defaults(self):
        ic = ICSpec()
        assert ic.kind == "lorenz_like"

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            ICSpec(kind="gaussian")

    @pytest.mark.parametrize("eps", [0.0, -1e-4, 1.5])
    def test_epsilon_range(self, eps):
        with pytest.raises(ValueError):
            ICSpec(kind="random_modes", epsilon=eps)


class TestMakeInitialState:
    def test_lorenz_like_places_core_modes(self, p30):
        s = make_initial_state(ICSpec(X=0.01, Y=0.0, Z=29.0), p30)
        assert s.get_psi(1, 1) == pytest.approx(-0.015j, abs=1e-15)

    def test_random_requires_seed(self, p30_m6):
        with pytest.raises(ValueError):
            make_initial_state(ICSpec(kind="random_modes"), p30_m6)

    def test_random_modes_bounded_and_deterministic(self, p30_m6):
        ic = ICSpec(kind="random_modes", epsilon=1e-4)
        a = make_initial_state(ic, p30_m6, seed=7)
        b = make_initial_state(ic, p30_m6, seed=7)
        c = make_initial_state(ic, p30_m6, seed=8)
        assert np.max(np.abs(a.psi_hat)) < 1e-4
        assert np.max(np.abs(a.theta_hat)) < 1e-4
        assert a.reality_defect() == 0.0
        np.testing.assert_array_equal(a.psi_hat, b.psi_hat)
        assert np.any(a.psi_hat != c.psi_hat)

    def test_random_fields_bounded_on_grid(self, p30_m6):
        from rbclab.transforms import synthesize

        ic = ICSpec(kind="random_fields", epsilon=1e-4)
        s = make_initial_state(ic, p30_m6, seed=3)
        f = synthesize(s, p30_m6, 64, 32)
        assert np.max(np.abs(f.psi)) < 1e-4
        assert np.max(np.abs(f.theta)) < 1e-4


class TestLorenzEnergyBridge:
    def test_coefficients_reproduce_full_formulas(self, p30):
        cK, cP, cQ, cV = lorenz_energy_coefficients(p30)
        X, Y, Z = 3.0, -1.0, 25.0
        s = lorenz_to_spectral(X, Y, Z, p30)
        E_K, E_P, _ = energies_spectral(s, p30)
        Q, V = energy_rates(s, p30)
        assert cK * X**2 == pytest.approx(E_K, rel=1e-12)
        assert cP * Z == pytest.approx(E_P, rel=1e-12)
        assert cQ * Z == pytest.approx(Q, rel=1e-12)
        assert cV * X**2 == pytest.approx(V, rel=1e-12)

    def test_lorenz_run_reports_energies(self, p30):
        cfg = StepperConfig(dt=1e-4, t_end=0.2, output_every=10)
        traj = run_model("lorenz", p30, ICSpec(X=0.01, Y=0, Z=29.0), cfg)
        assert traj.E_K[0] == pytest.approx(4.71e-3, rel=1e-2)
        assert traj.final_state is not None
        np.testing.assert_allclose(traj.E_T, traj.E_K + traj.E_P)


class TestRunModel:
    def test_gele_and_lorenz_agree(self, p30):
        cfg = StepperConfig(dt=1e-5, t_end=0.05, output_every=100)
        ic = ICSpec(X=0.01, Y=0, Z=29.0)
        a = run_model("lorenz", p30, ic, cfg)
        b = run_model("gele", p30, ic, cfg)
        assert np.max(np.abs(a.X - b.X)) < 1e-8
        assert np.max(np.abs(a.Z - b.Z)) < 1e-8

    def test_lorenz_rejects_random_ic(self, p30):
        with pytest.raises(ValueError):
            run_model("lorenz", p30, ICSpec(kind="random_modes"), StepperConfig(t_end=0.01), seed=1)

    def test_unknown_model(self, p30):
        with pytest.raises(ValueError):
            run_model("galerkin", p30, ICSpec(), StepperConfig(t_end=0.01))


class TestLyapunov:
    def test_lorenz_fixed_point_contracts(self):
        p = make_params(5.0, 1, 2)
        c = float(np.sqrt(p.b * (p.r - 1.0)))
        lam = estimate_lyapunov("lorenz", p, LorenzState(c, c, p.r - 1.0), dt=1e-4, horizon=1.0)
        assert lam < 0.0

    def test_gele_origin_contracts_subcritical(self):
        p = make_params(0.5, 2, 2)
        s = lorenz_to_spectral(1e-3, 0, 0, p)
        lam = estimate_lyapunov("gele", p, s, dt=1e-4, horizon=1.0)
        assert lam < 0.0


class TestBifurcationIO:
    def test_csv_roundtrip(self, tmp_path):
        rows = [
            BifurcationRow(30.0, AttractorKind.FIXED_POINT, None, [], (29.75, 29.75), 0, None),
            BifurcationRow(55.0, AttractorKind.LIMIT_CYCLE, 1, [55.8], (55.8, 55.9), 120, None),
            BifurcationRow(150.0, AttractorKind.CHAOTIC, None, [88.0], (80.1, 96.2), 300, 3.7),
        ]
        path = str(tmp_path / "bif.csv")
        write_bifurcation_csv(path, rows)
        back = read_bifurcation_csv(path)
        assert [r.kind for r in back] == [r.kind for r in rows]
        assert back[1].z_periodicity == 1
        assert back[2].lyapunov == pytest.approx(3.7)
        assert back[0].z_max_range == (29.75, 29.75)

    def test_sweep_records_failures_and_continues(self):
        """A solver blow-up becomes an error row, not an exception."""
        ic = ICSpec(X=1e8, Y=1e8, Z=1e8)
        rows = sweep_r("gele", [30.0], ic, L=1, M=2, dt=1e-4, t_end=0.5,
                       output_every=10, t_cut=0.1, with_lyapunov=False)
        assert len(rows) == 1
        assert rows[0].error is not None
        assert rows[0].kind is AttractorKind.UNDETERMINED


class TestCompare:
    def _short_run(self, p, t_end=0.05):
        cfg = StepperConfig(dt=1e-4, t_end=t_end, output_every=10)
        return run_model("lorenz", p, ICSpec(X=0.01, Y=0, Z=29.0), cfg)

    def test_self_comparison_is_zero(self, p30):
        traj = self._short_run(p30)
        rep = compare_trajectories(traj, traj)
        assert rep["max_dX"] == 0.0
        assert rep["rms_dZ"] == 0.0
        assert rep["max_dpsi_hat"] == 0.0

    def test_disjoint_ranges_rejected(self, p30):
        a = self._short_run(p30)
        b = self._short_run(p30)
        b.t = b.t + 10.0
        with pytest.raises(ValueError):
            compare_trajectories(a, b)
