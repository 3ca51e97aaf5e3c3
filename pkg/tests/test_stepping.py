import numpy as np
import pytest

from rbclab.params import make_params
from rbclab.state import zero_state
from rbclab.stepping import (
    DT_CEILING,
    BlowUpError,
    LinearPropagator,
    StepperConfig,
    imex_integrate,
)


def _no_nonlinear(ps, th):
    return np.zeros_like(ps), np.zeros_like(th)


class TestStepperConfig:
    def test_defaults(self):
        cfg = StepperConfig()
        assert cfg.dt == 1e-5
        assert cfg.n_steps == 100_000

    @pytest.mark.parametrize("kw", [dict(dt=0.0), dict(dt=-1e-5), dict(t_end=0.0), dict(output_every=0), dict(dt=2e-4)])
    def test_validation(self, kw):
        with pytest.raises(ValueError):
            StepperConfig(**kw)

    def test_ceiling_is_inclusive(self):
        StepperConfig(dt=DT_CEILING)


class TestLinearPropagator:
    def test_is_inverse_of_backward_euler_matrix(self):
        """(I - dt A) applied after the propagator is the identity, mode by mode."""
        p = make_params(30.0, 3, 4)
        dt = 1e-4
        prop = LinearPropagator(p, dt, 3, 4)
        for l in (0, 2):
            for mj in (0, 3):
                al = p.alpha_l(l)
                k2 = al**2 + p.beta_m(mj + 1) ** 2
                A = np.array(
                    [
                        [-p.sigma * k2, -1j * al * p.sigma * p.Ra / k2],
                        [1j * al, -k2],
                    ]
                )
                Pm = np.array(
                    [
                        [prop.p11[l, mj], prop.p12[l, mj]],
                        [prop.p21[l, mj], prop.p22[l, mj]],
                    ]
                )
                np.testing.assert_allclose((np.eye(2) - dt * A) @ Pm, np.eye(2), atol=1e-12)

    def test_linear_decay_is_monotone(self):
        """Without nonlinear terms every subcritical mode amplitude decays."""
        p = make_params(0.5, 2, 2)
        s0 = zero_state(2, 2)
        s0.psi_hat[:] = 0.1 + 0.05j
        s0.theta_hat[:] = 0.1
        s0.enforce_reality()
        cfg = StepperConfig(dt=1e-4, t_end=0.5, output_every=100)
        traj = imex_integrate(s0, p, cfg, _no_nonlinear)
        assert np.max(np.abs(traj.final_state.psi_hat)) < np.max(np.abs(s0.psi_hat))
        assert np.max(np.abs(traj.final_state.theta_hat)) < 0.5 * np.max(np.abs(s0.theta_hat))


class TestIntegrate:
    def test_sampling_cadence(self):
        p = make_params(30.0, 1, 2)
        cfg = StepperConfig(dt=1e-4, t_end=0.01, output_every=20)
        traj = imex_integrate(zero_state(1, 2), p, cfg, _no_nonlinear)
        assert len(traj) == 6  # t = 0 plus 100/20 samples
        assert traj.t[-1] == pytest.approx(0.01)

    def test_snapshots_collected(self):
        p = make_params(30.0, 1, 2)
        cfg = StepperConfig(dt=1e-4, t_end=0.001, output_every=5)
        traj = imex_integrate(zero_state(1, 2), p, cfg, _no_nonlinear, snapshots=True)
        assert len(traj.snapshots) == len(traj)

    def test_monitor_called_at_samples(self):
        p = make_params(30.0, 1, 2)
        seen = []
        cfg = StepperConfig(dt=1e-4, t_end=0.001, output_every=5)
        imex_integrate(zero_state(1, 2), p, cfg, _no_nonlinear, monitor=lambda k, ps, th: seen.append(k))
        assert seen == [0, 5, 10]

    def test_blowup_error_carries_time(self):
        p = make_params(30.0, 1, 2)

        def exploding(ps, th):
            return 1e200 * (ps + 1.0), np.zeros_like(th)

        s0 = zero_state(1, 2)
        cfg = StepperConfig(dt=1e-4, t_end=0.1, output_every=1)
        with pytest.raises(BlowUpError) as exc:
            imex_integrate(s0, p, cfg, exploding)
        assert exc.value.t > 0.0

    def test_unknown_scheme_rejected(self):
        p = make_params(30.0, 1, 2)
        with pytest.raises(ValueError):
            imex_integrate(zero_state(1, 2), p, StepperConfig(t_end=1e-4), _no_nonlinear, scheme="rk4")
