import numpy as np
import pytest

from conftest import random_state
from rbclab.dns import (
    Grid,
    cfl_dt,
    default_grid,
    integrate_dns,
    nonlinear_terms,
    read_field_dump,
    step_dns,
    write_field_dump,
)
from rbclab.params import make_params
from rbclab.state import PhysicalFields, x_grid, z_grid
from rbclab.stepping import DT_CEILING, StepperConfig
from rbclab.transforms import lorenz_to_spectral, synthesize


@pytest.fixture
def small_setup(rng):
    g = Grid(N_x=32, N_z=16, L_eff=6, M_eff=6)
    p = make_params(30.0, 6, 6)
    return p, g


def test_grid_validates_dealiasing():
    Grid(N_x=80, N_z=80, L_eff=26, M_eff=26)  # the production grid passes
    with pytest.raises(ValueError):
        Grid(N_x=32, N_z=16, L_eff=11, M_eff=6)
    with pytest.raises(ValueError):
        Grid(N_x=32, N_z=8, L_eff=6, M_eff=6)
    with pytest.raises(ValueError):
        Grid(N_x=32, N_z=16, L_eff=6, M_eff=6, dealias_pad=1.2)


def test_default_grid_switches_with_r():
    assert default_grid(30.0).N_x == 80
    assert default_grid(150.0).N_x == 128


def test_truncation_mismatch_rejected(small_setup):
    p, g = small_setup
    with pytest.raises(ValueError):
        step_dns(lorenz_to_spectral(1, 0, 0, p.with_truncation(4, 4)), p.with_truncation(4, 4), g, 1e-5)


class TestCFL:
    def test_zero_state_gives_ceiling(self, small_setup):
        p, g = small_setup
        from rbclab.state import zero_state

        assert cfl_dt(zero_state(6, 6), p, g) == DT_CEILING

    def test_bound_shrinks_with_velocity(self, small_setup):
        p, g = small_setup
        s1 = lorenz_to_spectral(1.0, 0, 0, p)
        s2 = lorenz_to_spectral(100.0, 0, 0, p)
        assert cfl_dt(s2, p, g) < cfl_dt(s1, p, g) <= DT_CEILING

    def test_safety_validation(self, small_setup):
        p, g = small_setup
        s = lorenz_to_spectral(1.0, 0, 0, p)
        with pytest.raises(ValueError):
            cfl_dt(s, p, g, safety=0.0)


class TestStepping:
    def test_single_step_matches_integrator(self, small_setup, rng):
        p, g = small_setup
        s0 = random_state(rng, 6, 6, scale=0.05)
        s1, _ = step_dns(s0, p, g, 1e-5)
        cfg = StepperConfig(dt=1e-5, t_end=1e-5, output_every=1)
        traj = integrate_dns(s0, p, g, cfg, check_cfl=False)
        np.testing.assert_allclose(traj.final_state.psi_hat, s1.psi_hat, atol=1e-15)

    def test_ab2_uses_history(self, small_setup, rng):
        p, g = small_setup
        s0 = random_state(rng, 6, 6, scale=0.05)
        s1, hist = step_dns(s0, p, g, 1e-5)
        bootstrap, _ = step_dns(s1, p, g, 1e-5)
        ab2, _ = step_dns(s1, p, g, 1e-5, n_prev=hist)
        assert np.max(np.abs(ab2.psi_hat - bootstrap.psi_hat)) > 0.0

    def test_cfl_warning_fires(self, small_setup):
        p, g = small_setup
        import contextlib

        from rbclab.stepping import BlowUpError

        s0 = lorenz_to_spectral(500.0, 0.0, 29.0, p)
        cfg = StepperConfig(dt=1e-4, t_end=2e-3, output_every=1)
        # the warning fires on the first sample; the run itself may blow up
        with pytest.warns(RuntimeWarning, match="CFL"), contextlib.suppress(BlowUpError):
            integrate_dns(s0, p, g, cfg)


def test_nonlinear_terms_on_fields(small_setup, rng):
    p, g = small_setup
    s = random_state(rng, 6, 6, scale=0.1)
    f = synthesize(s, p, g.N_x, g.N_z)
    out = nonlinear_terms(f, p, g)
    assert out.psi.shape == f.psi.shape
    # the theta term for a zero temperature field vanishes
    f0 = PhysicalFields(f.psi, np.zeros_like(f.theta), f.x_coords, f.z_coords)
    out0 = nonlinear_terms(f0, p, g)
    assert np.max(np.abs(out0.theta)) < 1e-10


class TestFieldDump:
    def test_roundtrip_bit_exact(self, tmp_path, rng):
        p = make_params(30.0, 4, 4)
        s = random_state(rng, 4, 4)
        f = synthesize(s, p, 32, 16)
        path = str(tmp_path / "fields.txt")
        write_field_dump(path, f, p.l_x)
        back, l_x = read_field_dump(path)
        assert l_x == p.l_x
        assert back.t == f.t
        np.testing.assert_array_equal(back.psi, f.psi)
        np.testing.assert_array_equal(back.theta, f.theta)
        np.testing.assert_allclose(back.x_coords, f.x_coords)
        np.testing.assert_allclose(back.z_coords, f.z_coords)

    def test_dump_contains_boundary_rows(self, tmp_path):
        p = make_params(30.0, 1, 2)
        f = synthesize(lorenz_to_spectral(1.0, 0, 0, p), p, 16, 8)
        path = str(tmp_path / "fields.txt")
        write_field_dump(path, f, p.l_x)
        with open(path) as fh:
            fh.readline()
            first_row = [float(v) for v in fh.readline().split()]
        assert len(first_row) == 10  # 8 interior + 2 boundary columns
        assert first_row[0] == 0.0 and first_row[-1] == 0.0

    def test_corrupt_dump_rejected(self, tmp_path):
        p = make_params(30.0, 1, 2)
        f = synthesize(lorenz_to_spectral(1.0, 0, 0, p), p, 16, 8)
        path = str(tmp_path / "fields.txt")
        write_field_dump(path, f, p.l_x)
        with open(path) as fh:
            lines = fh.readlines()
        with open(path, "w") as fh:
            fh.writelines(lines[:-2])
        with pytest.raises(ValueError):
            read_field_dump(path)
