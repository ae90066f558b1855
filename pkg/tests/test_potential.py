import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from modemd import molecule, potential

PARAMS = potential.PotentialParams()


def chain4():
    masses = np.full(4, 12.011)
    bonds = np.array([[0, 1], [1, 2], [2, 3]])
    coords = np.array([[0.0, 0.0, 0.0], [1.4, 0.0, 0.0],
                       [2.1, 1.2, 0.0], [2.0, 2.5, 0.4]])
    return molecule.Molecule("chain4", masses, bonds,
                             molecule.build_angles(bonds, 4), coords), coords


def test_energy_frozen_value():
    mol, coords = chain4()
    assert potential.energy(coords, mol, PARAMS) == pytest.approx(
        22.329945978574365, rel=1e-13)


def test_gradient_frozen_value():
    mol, coords = chain4()
    g = potential.gradient(coords, mol, PARAMS)
    np.testing.assert_allclose(g[0], [-7.625, -0.97505729, 0.0], atol=5e-9)


def test_single_bond_at_rest_length_zero_energy():
    masses = np.full(2, 12.011)
    bonds = np.array([[0, 1]])
    coords = np.array([[0.0, 0.0, 0.0], [PARAMS.L_b, 0.0, 0.0]])
    mol = molecule.Molecule("dimer", masses, bonds,
                            np.empty((0, 3), dtype=int), coords)
    assert potential.energy(coords, mol, PARAMS) == 0.0
    np.testing.assert_allclose(potential.gradient(coords, mol, PARAMS),
                               0.0, atol=1e-15)


def test_stretched_bond_energy_quadratic():
    masses = np.full(2, 12.011)
    bonds = np.array([[0, 1]])
    mol = molecule.Molecule("dimer", masses, bonds,
                            np.empty((0, 3), dtype=int),
                            np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]]))
    for dr in (0.1, -0.05, 0.3):
        coords = np.array([[0.0, 0.0, 0.0], [PARAMS.L_b + dr, 0.0, 0.0]])
        expected = 0.5 * PARAMS.kappa_b * dr**2
        assert potential.energy(coords, mol, PARAMS) == pytest.approx(
            expected, rel=1e-12)


def _random_chain_coords(draw):
    # keep atoms clearly separated and the angles away from collinearity
    pts = [np.zeros(3)]
    for _ in range(3):
        step = np.array([draw(st.floats(0.8, 1.8)),
                         draw(st.floats(0.4, 1.5)),
                         draw(st.floats(-0.8, 0.8))])
        pts.append(pts[-1] + step)
    coords = np.array(pts)
    for c, d, e in ((0, 1, 2), (1, 2, 3)):
        u = coords[c] - coords[d]
        v = coords[e] - coords[d]
        cos = u @ v / (np.linalg.norm(u) * np.linalg.norm(v))
        assume(abs(cos) < 0.95)
    return coords


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_gradient_matches_finite_difference(data):
    mol, _ = chain4()
    coords = _random_chain_coords(data.draw)
    g = potential.gradient(coords, mol, PARAMS)
    step = 1e-6
    flat = coords.ravel().copy()
    for i in range(flat.size):
        x0 = flat[i]
        flat[i] = x0 + step
        up = potential.energy(flat.reshape(-1, 3), mol, PARAMS)
        flat[i] = x0 - step
        dn = potential.energy(flat.reshape(-1, 3), mol, PARAMS)
        flat[i] = x0
        assert g.ravel()[i] == pytest.approx((up - dn) / (2 * step),
                                             rel=2e-5, abs=2e-4)


@settings(max_examples=30, deadline=None)
@given(st.data())
def test_energy_translation_and_rotation_invariant(data):
    mol, _ = chain4()
    coords = _random_chain_coords(data.draw)
    u0 = potential.energy(coords, mol, PARAMS)
    shift = np.array([data.draw(st.floats(-5, 5)) for _ in range(3)])
    assert potential.energy(coords + shift, mol, PARAMS) == pytest.approx(
        u0, rel=1e-10, abs=1e-10)
    angle = data.draw(st.floats(0, 2 * np.pi))
    c, s = np.cos(angle), np.sin(angle)
    rot = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    assert potential.energy(coords @ rot.T, mol, PARAMS) == pytest.approx(
        u0, rel=1e-10, abs=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.data())
def test_forces_sum_to_zero(data):
    # Newton's third law: no net force and no net torque on the molecule
    mol, _ = chain4()
    coords = _random_chain_coords(data.draw)
    g = potential.gradient(coords, mol, PARAMS)
    np.testing.assert_allclose(g.sum(axis=0), 0.0, atol=1e-10)
    np.testing.assert_allclose(np.cross(coords, -g).sum(axis=0), 0.0,
                               atol=1e-9)


def test_collinear_angle_raises():
    masses = np.full(3, 12.011)
    bonds = np.array([[0, 1], [1, 2]])
    coords = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0]])
    mol = molecule.Molecule("linear", masses, bonds,
                            molecule.build_angles(bonds, 3), coords)
    with pytest.raises(potential.PotentialError):
        potential.gradient(coords, mol, PARAMS)


def test_coincident_atoms_raise():
    masses = np.full(2, 12.011)
    bonds = np.array([[0, 1]])
    coords = np.zeros((2, 3))
    mol = molecule.Molecule("bad", masses, bonds,
                            np.empty((0, 3), dtype=int),
                            np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]]))
    with pytest.raises(potential.PotentialError):
        potential.energy(coords, mol, PARAMS)


def test_params_validation():
    with pytest.raises(ValueError):
        potential.PotentialParams(kappa_b=-1.0)
    with pytest.raises(ValueError):
        potential.PotentialParams(L_b=0.0)


def test_hessian_symmetric_and_matches_gradient():
    mol, coords = chain4()
    hess = potential.hessian(coords, mol, PARAMS)
    np.testing.assert_allclose(hess, hess.T, atol=1e-12)
    # row check against finite differences of the gradient
    step = 1e-5
    flat = coords.ravel().copy()
    flat[4] += step
    gp = potential.gradient(flat.reshape(-1, 3), mol, PARAMS).ravel()
    flat[4] -= 2 * step
    gm = potential.gradient(flat.reshape(-1, 3), mol, PARAMS).ravel()
    np.testing.assert_allclose(hess[4], (gp - gm) / (2 * step),
                               rtol=1e-4, atol=1e-4)
