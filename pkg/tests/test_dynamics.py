import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from modemd import diagnostics, dynamics, integrator, potential, rotation
from modemd.units import K_BOLTZMANN, ps_to_internal


def random_modebasis_state(rng, n_modes):
    q = rng.normal(size=4)
    q /= np.linalg.norm(q)
    return dynamics.ModeBasisState(
        x_cm=rng.normal(size=3), v_cm=0.05 * rng.normal(size=3), q=q,
        omega=0.2 * rng.normal(size=3),
        amps=0.02 * rng.normal(size=n_modes),
        amp_rates=0.05 * rng.normal(size=n_modes))


def test_state_pack_roundtrip(c20_system):
    mol, params, basis = c20_system
    rng = np.random.default_rng(1)
    s = random_modebasis_state(rng, basis.n_modes)
    back = dynamics.ModeBasisState.unpack(s.pack(), basis.n_modes)
    for field in ("x_cm", "v_cm", "q", "omega", "amps", "amp_rates"):
        np.testing.assert_array_equal(getattr(back, field),
                                      getattr(s, field))
    cs = dynamics.CartesianState(rng.normal(size=(20, 3)),
                                 rng.normal(size=(20, 3)))
    back = dynamics.CartesianState.unpack(cs.pack(), 20)
    np.testing.assert_array_equal(back.x, cs.x)
    np.testing.assert_array_equal(back.v, cs.v)


def test_representation_equivalence(c20_system):
    # the core identity: accelerations implied by the mode-basis equations
    # equal Newton's accelerations on the transformed state
    mol, params, basis = c20_system
    x0 = mol.coords_equilibrium
    rng = np.random.default_rng(7)
    for _ in range(100):
        s = random_modebasis_state(rng, basis.n_modes)
        deriv = dynamics.modebasis_rhs(s.pack(), basis, mol, params,
                                       eta=0.0)
        a_mode = dynamics.modebasis_accelerations(s, deriv, basis, x0)
        cart = dynamics.to_cartesian(s, basis, x0)
        dy = dynamics.cartesian_rhs(cart.pack(), mol, params)
        a_cart = dy[3 * mol.n_atoms:].reshape(-1, 3)
        rel = np.linalg.norm(a_mode - a_cart) / np.linalg.norm(a_cart)
        assert rel < 1e-9


def test_to_cartesian_velocity_consistency(c20_system):
    # d/dt of the position map equals the velocity map along the flow
    mol, params, basis = c20_system
    x0 = mol.coords_equilibrium
    rng = np.random.default_rng(3)
    s = random_modebasis_state(rng, basis.n_modes)
    y = s.pack()
    dy = dynamics.modebasis_rhs(y, basis, mol, params, eta=0.0)
    eps = 1e-6

    def coords_of(yy):
        st_ = dynamics.ModeBasisState.unpack(yy, basis.n_modes)
        return dynamics.to_cartesian(st_, basis, x0).x

    xdot = (coords_of(y + eps * dy) - coords_of(y - eps * dy)) / (2 * eps)
    v = dynamics.to_cartesian(s, basis, x0).v
    np.testing.assert_allclose(xdot, v, atol=1e-8)


def test_equipartition_energies(c20_system):
    mol, params, basis = c20_system
    T = 300.0
    kT = K_BOLTZMANN * T
    state, phases = dynamics.init_equipartition(mol, basis, T, seed=5)
    M = mol.total_mass
    # kT/2 in the center-of-mass motion
    assert 0.5 * M * float(state.v_cm @ state.v_cm) == pytest.approx(
        0.5 * kT, rel=1e-12)
    # kT/2 in rotation about the drawn axis
    x0 = mol.coords_equilibrium
    inertia = (mol.masses * np.einsum("ij,ij->i", x0, x0)).sum() \
        * np.eye(3) - np.einsum("i,ij,ik->jk", mol.masses, x0, x0)
    assert 0.5 * float(state.omega @ inertia @ state.omega) == \
        pytest.approx(0.5 * kT, rel=1e-12)
    # kT in every mode: (M/2)(A'^2 + w^2 A^2) = kT
    mode_e = 0.5 * M * (state.amp_rates**2
                        + basis.frequencies**2 * state.amps**2)
    np.testing.assert_allclose(mode_e, kT, rtol=1e-12)
    # x_cm = 0 and identity orientation
    np.testing.assert_array_equal(state.x_cm, 0.0)
    np.testing.assert_array_equal(state.q, rotation.IDENTITY)


def test_equipartition_seed_determinism(c20_system):
    mol, params, basis = c20_system
    a, pa = dynamics.init_equipartition(mol, basis, 300.0, seed=9)
    b, pb = dynamics.init_equipartition(mol, basis, 300.0, seed=9)
    np.testing.assert_array_equal(a.pack(), b.pack())
    np.testing.assert_array_equal(pa, pb)
    c, _ = dynamics.init_equipartition(mol, basis, 300.0, seed=10)
    assert not np.array_equal(a.pack(), c.pack())


def test_equipartition_rejects_bad_temperature(c20_system):
    mol, params, basis = c20_system
    with pytest.raises(ValueError):
        dynamics.init_equipartition(mol, basis, -5.0, seed=1)


def test_sma_prescription_matches_initial_data(c20_system):
    mol, params, basis = c20_system
    state, phases = dynamics.init_equipartition(mol, basis, 300.0, seed=11)
    scheme = dynamics.scheme_from_init("sma", basis, mol, 300.0, phases)
    amps, amp_rates = dynamics.prescribed_amplitudes(scheme, 0.0, basis)
    np.testing.assert_allclose(amps, state.amps, atol=1e-14)
    np.testing.assert_allclose(amp_rates, state.amp_rates, atol=1e-14)


def test_zma_amplitudes_zero(c20_system):
    mol, params, basis = c20_system
    scheme = dynamics.Scheme(dynamics.SchemeKind.ZMA)
    amps, amp_rates = dynamics.prescribed_amplitudes(scheme, 3.7, basis)
    np.testing.assert_array_equal(amps, 0.0)
    np.testing.assert_array_equal(amp_rates, 0.0)


def test_sma_scheme_requires_sinusoid_data():
    with pytest.raises(ValueError):
        dynamics.Scheme(dynamics.SchemeKind.SMA)


def test_zma_at_rest_stays_at_rest(c20_system):
    # zero thermal motion: the molecule must not move at all
    mol, params, basis = c20_system
    scheme = dynamics.Scheme(dynamics.SchemeKind.ZMA)
    y0 = np.concatenate([np.zeros(3), np.zeros(3), rotation.IDENTITY,
                         np.zeros(3)])
    rhs = dynamics.make_rhs(scheme, basis, mol, params, eta=1.0)
    traj = integrator.integrate(rhs, y0, ps_to_internal(1.0),
                                ps_to_internal(0.5),
                                integrator.IntegratorConfig(eps_tau=1e-10))
    for y in traj.states:
        np.testing.assert_allclose(y, y0, atol=1e-12)


def test_mc_variants_conserve_angular_momentum_rate(c20_system):
    # the torque equation is built to make dJ/dt = 0 for an isolated
    # molecule: check J along a short MCZMA trajectory
    mol, params, basis = c20_system
    state, phases = dynamics.init_equipartition(mol, basis, 300.0, seed=2)
    scheme = dynamics.Scheme(dynamics.SchemeKind.MCZMA)
    y0 = np.concatenate([state.x_cm, state.v_cm, state.q, state.omega])
    rhs = dynamics.make_rhs(scheme, basis, mol, params, eta=1.0)
    traj = integrator.integrate(rhs, y0, ps_to_internal(2.0),
                                ps_to_internal(0.5),
                                integrator.IntegratorConfig(eps_tau=1e-11))
    x0 = mol.coords_equilibrium
    js = []
    for t, y in zip(traj.times, traj.states):
        s = dynamics.ModeBasisState(y[0:3], y[3:6], y[6:10], y[10:13],
                                    np.zeros(basis.n_modes),
                                    np.zeros(basis.n_modes))
        cart = dynamics.to_cartesian(s, basis, x0)
        c = diagnostics.conserved_quantities(cart.x, cart.v, mol, params)
        js.append(c.angular_momentum)
    drift = np.linalg.norm(js[-1] - js[0]) / np.linalg.norm(js[0])
    assert drift < 1e-8


def test_exact_schemes_agree_over_short_run(c20_system):
    mol, params, basis = c20_system
    x0 = mol.coords_equilibrium
    state, _ = dynamics.init_equipartition(mol, basis, 300.0, seed=4)
    cfg = integrator.IntegratorConfig(eps_tau=1e-11)
    t_end = ps_to_internal(0.5)
    rhs_m = dynamics.make_rhs(
        dynamics.Scheme(dynamics.SchemeKind.EXACT_MODE_BASIS), basis, mol,
        params, eta=1.0)
    traj_m = integrator.integrate(rhs_m, state.pack(), t_end, t_end, cfg)
    rhs_c = dynamics.make_rhs(
        dynamics.Scheme(dynamics.SchemeKind.EXACT_CARTESIAN), basis, mol,
        params, eta=0.0)
    cart0 = dynamics.to_cartesian(state, basis, x0)
    traj_c = integrator.integrate(rhs_c, cart0.pack(), t_end, t_end, cfg)
    end_m = dynamics.to_cartesian(
        dynamics.ModeBasisState.unpack(traj_m.states[-1], basis.n_modes),
        basis, x0)
    end_c = dynamics.CartesianState.unpack(traj_c.states[-1], mol.n_atoms)
    assert diagnostics.position_rmsd(end_m.x, end_c.x) < 1e-9


def test_singular_projection_raises(c20_system):
    # collapsing the geometry onto a line makes the projection tensor
    # singular
    mol, params, basis = c20_system
    line = np.zeros((mol.n_atoms, 3))
    line[:, 0] = np.arange(mol.n_atoms, dtype=float)
    with pytest.raises(np.linalg.LinAlgError):
        dynamics._rotational_projection(
            np.array([0.0, 0.0, 1.0]), line, np.zeros_like(line), line,
            np.zeros_like(line), mol.masses, mol.total_mass)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_equipartition_mode_energy_property(seed, c20_system):
    mol, params, basis = c20_system
    state, _ = dynamics.init_equipartition(mol, basis, 300.0, seed=seed)
    kT = K_BOLTZMANN * 300.0
    mode_e = 0.5 * mol.total_mass * (
        state.amp_rates**2 + basis.frequencies**2 * state.amps**2)
    np.testing.assert_allclose(mode_e, kT, rtol=1e-10)
