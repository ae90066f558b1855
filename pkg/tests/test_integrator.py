import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from modemd import integrator


def test_config_validation():
    with pytest.raises(ValueError):
        integrator.IntegratorConfig(eps_tau=0.0)
    with pytest.raises(ValueError):
        integrator.IntegratorConfig(eps_tau=1e-2)
    with pytest.raises(ValueError):
        integrator.IntegratorConfig(h_min=1.0, h_max=0.5)


def test_exponential_oracle():
    # y' = y from 1: endpoint is e, matched to near machine precision
    cfg = integrator.IntegratorConfig(eps_tau=1e-13)
    traj = integrator.integrate(lambda y, t: y, np.array([1.0]), 1.0, 1.0,
                                cfg)
    assert traj.states[-1][0] == pytest.approx(np.e, rel=1e-12)


def test_zero_rhs_exact():
    y0 = np.array([1.0, -2.0, 3.5])
    cfg = integrator.IntegratorConfig(eps_tau=1e-8)
    traj = integrator.integrate(lambda y, t: np.zeros_like(y), y0, 10.0,
                                2.0, cfg)
    for y in traj.states:
        np.testing.assert_array_equal(y, y0)


@pytest.mark.parametrize("eps", [1e-6, 1e-8, 1e-10, 1e-12])
def test_harmonic_endpoint_error_tracks_eps_tau(eps):
    # error within two orders of magnitude of eps_tau at each setting
    def rhs(y, t):
        return np.array([y[1], -y[0]])
    cfg = integrator.IntegratorConfig(eps_tau=eps)
    t_end = 20.0
    traj = integrator.integrate(rhs, np.array([1.0, 0.0]), t_end, t_end,
                                cfg)
    err = abs(traj.states[-1][0] - np.cos(t_end))
    assert eps / 100 < err < eps * 100


def test_order_scaling_slope_near_one():
    def rhs(y, t):
        return np.array([y[1], -y[0]])
    eps_values = np.array([1e-6, 1e-7, 1e-8, 1e-9, 1e-10, 1e-11, 1e-12])
    errs = []
    for eps in eps_values:
        cfg = integrator.IntegratorConfig(eps_tau=float(eps))
        traj = integrator.integrate(rhs, np.array([1.0, 0.0]), 20.0, 20.0,
                                    cfg)
        errs.append(abs(traj.states[-1][0] - np.cos(20.0)))
    slope = np.polyfit(np.log(eps_values), np.log(errs), 1)[0]
    assert slope == pytest.approx(1.0, abs=0.2)


def test_sample_times_hit_output_grid():
    cfg = integrator.IntegratorConfig(eps_tau=1e-10)
    traj = integrator.integrate(lambda y, t: -y, np.array([1.0]), 5.0, 1.0,
                                cfg)
    np.testing.assert_allclose(traj.times, np.arange(6.0), atol=1e-12)


def test_determinism():
    def rhs(y, t):
        return np.array([y[1], -np.sin(y[0])])
    cfg = integrator.IntegratorConfig(eps_tau=1e-9)
    a = integrator.integrate(rhs, np.array([1.0, 0.3]), 30.0, 5.0, cfg)
    b = integrator.integrate(rhs, np.array([1.0, 0.3]), 30.0, 5.0, cfg)
    assert a.n_rhs_evals == b.n_rhs_evals
    assert a.n_accepted == b.n_accepted
    np.testing.assert_array_equal(np.array(a.states), np.array(b.states))


def test_stiff_transient_rejects_then_recovers():
    # a sharp transient forces at least one rejection but not a failure
    def rhs(y, t):
        return np.array([-50.0 * (y[0] - np.cos(8.0 * t))])
    cfg = integrator.IntegratorConfig(eps_tau=1e-10, h_init=0.5)
    traj = integrator.integrate(rhs, np.array([5.0]), 3.0, 3.0, cfg)
    assert traj.n_rejected > 0
    assert np.isfinite(traj.states[-1]).all()


def test_nonfinite_rhs_raises():
    def rhs(y, t):
        return np.array([np.inf])
    with pytest.raises(integrator.IntegrationError):
        integrator.integrate(rhs, np.array([1.0]), 1.0, 1.0,
                             integrator.IntegratorConfig(eps_tau=1e-8))


def test_step_underflow_raises():
    # an unresolvable discontinuity drives h below h_min
    def rhs(y, t):
        return np.array([1e12 * np.sign(np.sin(1e6 * t))])
    cfg = integrator.IntegratorConfig(eps_tau=1e-12, h_min=1e-6)
    with pytest.raises(integrator.IntegrationError):
        integrator.integrate(rhs, np.array([0.0]), 10.0, 10.0, cfg)


@settings(max_examples=20, deadline=None)
@given(t_end=st.floats(0.5, 8.0), eps=st.sampled_from([1e-7, 1e-9, 1e-11]))
def test_linear_system_accuracy_property(t_end, eps):
    # rotation in the plane: exact solution is (cos t, sin t)
    def rhs(y, t):
        return np.array([-y[1], y[0]])
    cfg = integrator.IntegratorConfig(eps_tau=eps)
    traj = integrator.integrate(rhs, np.array([1.0, 0.0]), t_end, t_end,
                                cfg)
    expected = np.array([np.cos(t_end), np.sin(t_end)])
    assert np.linalg.norm(traj.states[-1] - expected) < 1e4 * eps
