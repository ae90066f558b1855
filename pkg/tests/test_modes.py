import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from modemd import modes

from conftest import prepared_system

EXPECTED_COUNTS = {"c20": 54, "c26": 72, "c60": 174, "c70": 204}

# smallest and largest vibration frequencies (internal units), frozen from
# the mass-weighted Hessian spectrum at the minimized geometry
FREQ_RANGE = {
    "c20": (4.404409531, 14.890352967),
    "c26": (3.661318183, 15.497294787),
    "c60": (2.100587830, 16.492666051),
    "c70": (1.669752597, 16.849912677),
}


@pytest.mark.parametrize("name", ["c20", "c26", "c60", "c70"])
def test_mode_counts_and_frequencies(name):
    mol, params, basis = prepared_system(name)
    assert basis.n_modes == EXPECTED_COUNTS[name] == 3 * mol.n_atoms - 6
    assert basis.zero_modes.shape == (6, mol.n_atoms, 3)
    lo, hi = FREQ_RANGE[name]
    assert basis.frequencies[0] == pytest.approx(lo, abs=1e-6)
    assert basis.frequencies[-1] == pytest.approx(hi, abs=1e-6)
    assert np.all(np.diff(basis.frequencies) >= 0)


@pytest.mark.parametrize("name", ["c20", "c26", "c60", "c70"])
def test_constraint_residuals_below_1e12(name):
    mol, params, basis = prepared_system(name)
    ortho, trans, rot = modes.constraint_residuals(
        basis, mol.masses, mol.coords_equilibrium)
    assert ortho < 1e-12
    assert trans < 1e-12
    assert rot < 1e-12


def test_mode_orthonormality_definition(c20_system):
    # sum_A (m_A / M) e^mu_A . e^nu_A = delta_mu_nu
    mol, params, basis = c20_system
    mw = mol.masses / mol.total_mass
    gram = np.einsum("a,maj,naj->mn", mw, basis.eigenvectors,
                     basis.eigenvectors)
    np.testing.assert_allclose(gram, np.eye(basis.n_modes), atol=1e-12)


def test_modes_annihilate_rigid_motions(c20_system):
    mol, params, basis = c20_system
    mw = mol.masses / mol.total_mass
    # no overlap with translations
    trans = np.einsum("a,maj->mj", mw, basis.eigenvectors)
    np.testing.assert_allclose(trans, 0.0, atol=1e-12)
    # no overlap with rotations about the equilibrium geometry
    rot = np.einsum("a,maj->m", mw,
                    np.cross(basis.eigenvectors, mol.coords_equilibrium))
    np.testing.assert_allclose(rot, 0.0, atol=1e-12)


def test_completeness_parseval(c20_system):
    # modes + rigid vectors span all of R^{3N}: projecting a random
    # displacement onto the basis and reconstructing recovers it
    mol, params, basis = c20_system
    rng = np.random.default_rng(12)
    disp = rng.normal(size=(mol.n_atoms, 3))
    mw = mol.masses / mol.total_mass
    full = np.concatenate([basis.eigenvectors, basis.zero_modes])
    coeffs = np.einsum("a,maj,aj->m", mw, full, disp)
    recon = np.einsum("m,maj->aj", coeffs, full)
    np.testing.assert_allclose(recon, disp, atol=1e-10)
    # Parseval: mass-weighted norm is preserved
    assert np.einsum("a,aj,aj->", mw, disp, disp) == pytest.approx(
        float(coeffs @ coeffs), rel=1e-12)


def test_deterministic_sign_convention(c20_system):
    mol, params, basis = c20_system
    from modemd import potential
    hess = potential.hessian(mol.coords_equilibrium, mol, params)
    again = modes.compute_modes(hess, mol.masses, mol.coords_equilibrium)
    np.testing.assert_array_equal(again.eigenvectors, basis.eigenvectors)


def test_wrong_zero_mode_count_raises():
    # a Hessian with a spurious soft direction (free dimer: 5 zero modes
    # in 3D is wrong for the expected-6 contract)
    rng = np.random.default_rng(0)
    n = 3
    masses = np.full(n, 12.011)
    x0 = rng.normal(size=(n, 3))
    hess = np.zeros((3 * n, 3 * n))  # everything is a zero mode
    with pytest.raises(modes.ModeError):
        modes.compute_modes(hess, masses, x0)


def test_negative_eigenvalue_raises(c20_system):
    mol, params, basis = c20_system
    from modemd import potential
    hess = potential.hessian(mol.coords_equilibrium, mol, params)
    with pytest.raises(modes.ModeError, match="negative"):
        modes.compute_modes(-hess, mol.masses, mol.coords_equilibrium)


def test_asymmetric_hessian_rejected(c20_system):
    mol, params, basis = c20_system
    bad = np.triu(np.ones((60, 60)))
    with pytest.raises(modes.ModeError):
        modes.compute_modes(bad, mol.masses, mol.coords_equilibrium)
