import numpy as np
import pytest

from conftest import random_state
from rbclab.diagnostics import (
    balance_residual,
    divergence_constant,
    energies_grid,
    energies_spectral,
    energy_rates,
    energy_report,
)
from rbclab.gele import gele_rhs
from rbclab.params import make_params
from rbclab.state import SpectralState, zero_state
from rbclab.transforms import lorenz_to_spectral, synthesize


def test_zero_state_has_zero_energies(p30):
    s = zero_state(1, 2)
    assert energies_spectral(s, p30) == (0.0, 0.0, 0.0)
    assert energy_rates(s, p30) == (0.0, 0.0)


def test_initial_energies_at_r30(p30):
    """The Lorenz-like start (0.01, 0, 29) fixes E_K and E_P."""
    s = lorenz_to_spectral(0.01, 0.0, 29.0, p30)
    E_K, E_P, E_T = energies_spectral(s, p30)
    assert E_K == pytest.approx(4.71e-3, rel=1e-2)
    assert E_P == pytest.approx(-2.73e4, rel=1e-2)
    assert E_T == E_K + E_P


def test_single_theta_mode_potential_energy():
    """theta = sin(2 beta z) alone: E_P reduces to one analytic term.

    The grid quadrature of (-sigma Ra z) sin(2 pi z) over the domain must
    equal the closed-form coefficient, via int_0^1 z sin(2 pi z) dz = -1/(2 pi).
    """
    p = make_params(30.0, 1, 2)
    s = zero_state(1, 2)
    s.theta_hat[0, 1] = 1.0
    E_K, E_P, _ = energies_spectral(s, p)
    assert E_K == 0.0
    expected = -p.sigma * p.Ra * p.l_x * (-1.0 / (2.0 * np.pi))
    assert E_P == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("L,M", [(1, 2), (4, 4), (8, 8), (12, 12)])
def test_grid_energies_match_spectral(L, M, rng):
    p = make_params(30.0, L, M)
    s = random_state(rng, L, M, scale=0.3)
    f = synthesize(s, p, max(4 * (2 * L + 1), 32), max(4 * (M + 1), 32))
    ref = energies_spectral(s, p)
    got = energies_grid(f, p)
    scale = max(abs(ref[0]), abs(ref[1]))
    assert abs(got[0] - ref[0]) / scale < 1e-8
    assert abs(got[1] - ref[1]) / scale < 1e-8


def test_dissipation_rate_is_negative(rng):
    p = make_params(30.0, 4, 4)
    s = random_state(rng, 4, 4)
    Q, V = energy_rates(s, p)
    assert V < 0.0
    s0 = zero_state(4, 4)
    assert energy_rates(s0, p)[1] == 0.0


def test_energy_report_consistency(p30, rng):
    s = random_state(rng, 1, 2)
    rep = energy_report(s, p30)
    assert rep.E_T == rep.E_K + rep.E_P
    assert rep.V <= 0.0


class TestBalanceResidual:
    def test_needs_three_samples(self):
        with pytest.raises(ValueError):
            balance_residual(np.array([0.0, 1.0]), np.zeros(2), np.zeros(2), np.zeros(2))

    def test_constant_segment_is_balanced(self):
        t = np.linspace(0, 1, 11)
        E_T = np.full(11, -5.0)
        Q = np.full(11, 2.0)
        V = np.full(11, -2.0)
        res = balance_residual(t, E_T, Q, V)
        np.testing.assert_allclose(res, 0.0, atol=1e-14)

    def test_linear_growth_matches_rates(self):
        t = np.linspace(0, 1, 101)
        Q = np.full(101, 3.0)
        V = np.full(101, -1.0)
        E_T = 2.0 * t
        res = balance_residual(t, E_T, Q, V)
        np.testing.assert_allclose(res, 0.0, atol=1e-12)


class TestDivergenceConstant:
    def test_single_mode_value(self):
        p = make_params(30.0, 1, 2)
        # modes (0,1), (0,2) once; (1,1), (1,2) twice for the conjugate pair
        a2, b2 = p.alpha**2, p.beta**2
        expected = -(p.sigma + 1.0) * (
            b2 + 4 * b2 + 2 * (a2 + b2) + 2 * (a2 + 4 * b2)
        )
        assert divergence_constant(p) == pytest.approx(expected, rel=1e-13)

    @pytest.mark.parametrize("L,M", [(1, 2), (4, 4), (8, 8)])
    def test_matches_jacobian_trace(self, L, M, rng):
        """FD trace of the full nonlinear RHS is state-independent and equals
        the closed-form constant (the quadratic terms are trace-free)."""
        p = make_params(30.0, L, M)
        const = divergence_constant(p)
        h = 1e-6
        for trial in range(3):
            s = random_state(rng, L, M, scale=0.5)
            trace = 0.0
            for arr_name in ("psi_hat", "theta_hat"):
                arr = getattr(s, arr_name)
                for l in range(L + 1):
                    for m in range(M):
                        # central differences are exact for the quadratic terms
                        parts = (1.0,) if l == 0 else (1.0, 1.0j)
                        for unit in parts:
                            arr[l, m] += h * unit
                            fwd = getattr(gele_rhs(s, p), arr_name)[l, m]
                            arr[l, m] -= 2 * h * unit
                            bwd = getattr(gele_rhs(s, p), arr_name)[l, m]
                            arr[l, m] += h * unit
                            if unit == 1.0:
                                trace += (fwd.real - bwd.real) / (2 * h)
                            else:
                                trace += (fwd.imag - bwd.imag) / (2 * h)
            assert trace == pytest.approx(const, rel=1e-6)
