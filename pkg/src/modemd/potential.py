"""Harmonic bond/angle potential: energy, analytic gradient, numerical Hessian.

U = 1/2 kappa_b sum_bonds (r - L_b)^2 + 1/2 kappa_theta sum_angles (theta - theta_b)^2

Angles theta are evaluated with arccos of the normalized dot product of the
two bond arms.  Exactly collinear angles are treated as an error rather than
silently clamped.
"""

from dataclasses import dataclass

import numpy as np

# |cos theta| clamp applied before arccos; beyond this the angle is
# considered degenerate.
_COS_GUARD = 1.0 - 1e-12

# central-difference step (angstrom) for the Hessian
HESSIAN_FD_STEP = 1e-5


class PotentialError(ValueError):
    """Degenerate geometry: coincident bonded atoms or collinear angle."""


@dataclass(frozen=True)
class PotentialParams:
    """Bond/angle force-field parameters (kcal, angstrom, radians)."""

    kappa_b: float = 305.0      # kcal/A^2/mol
    L_b: float = 1.375          # A
    kappa_theta: float = 305.0  # kcal/rad^2/mol
    theta_b: float = 2.0 * np.pi / 3.0  # 120 degrees

    def __post_init__(self):
        if min(self.kappa_b, self.L_b, self.kappa_theta, self.theta_b) <= 0:
            raise ValueError("all potential parameters must be positive")


def _bond_geometry(coords, bonds):
    d = coords[bonds[:, 0]] - coords[bonds[:, 1]]
    r = np.linalg.norm(d, axis=1)
    if np.any(r == 0.0):
        bad = int(np.nonzero(r == 0.0)[0][0])
        raise PotentialError(f"coincident bonded atoms in bond {bad}")
    return d, r


def _angle_geometry(coords, angles):
    u = coords[angles[:, 0]] - coords[angles[:, 1]]
    v = coords[angles[:, 2]] - coords[angles[:, 1]]
    ru = np.linalg.norm(u, axis=1)
    rv = np.linalg.norm(v, axis=1)
    if np.any(ru == 0.0) or np.any(rv == 0.0):
        raise PotentialError("zero-length angle arm")
    c = np.einsum("ij,ij->i", u, v) / (ru * rv)
    return u, v, ru, rv, c


def energy(coords, mol, params):
    """Total potential energy (kcal/mol) of the configuration."""
    coords = np.asarray(coords, dtype=float).reshape(-1, 3)
    U = 0.0
    if len(mol.bonds):
        _, r = _bond_geometry(coords, mol.bonds)
        U += 0.5 * params.kappa_b * np.sum((r - params.L_b) ** 2)
    if len(mol.angles):
        _, _, _, _, c = _angle_geometry(coords, mol.angles)
        theta = np.arccos(np.clip(c, -1.0, 1.0))
        U += 0.5 * params.kappa_theta * np.sum((theta - params.theta_b) ** 2)
    return float(U)


def gradient(coords, mol, params):
    """Analytic gradient dU/dx, shape (N, 3), kcal/A/mol."""
    coords = np.asarray(coords, dtype=float).reshape(-1, 3)
    g = np.zeros_like(coords)

    if len(mol.bonds):
        d, r = _bond_geometry(coords, mol.bonds)
        # dU/dxC = kappa_b (r - L_b) * (xC - xD)/r
        fb = (params.kappa_b * (r - params.L_b) / r)[:, None] * d
        np.add.at(g, mol.bonds[:, 0], fb)
        np.add.at(g, mol.bonds[:, 1], -fb)

    if len(mol.angles):
        u, v, ru, rv, c = _angle_geometry(coords, mol.angles)
        if np.any(np.abs(c) > _COS_GUARD):
            bad = int(np.nonzero(np.abs(c) > _COS_GUARD)[0][0])
            raise PotentialError(
                f"collinear angle {tuple(int(i) for i in mol.angles[bad])}")
        theta = np.arccos(c)
        s = np.sqrt(1.0 - c * c)
        # dU/dc = -kappa_theta (theta - theta_b) / sin(theta)
        dUdc = -params.kappa_theta * (theta - params.theta_b) / s
        # dc/dxC = v/(ru rv) - c u/ru^2 ; dc/dxE symmetric; vertex gets the rest
        dcdC = v / (ru * rv)[:, None] - (c / ru**2)[:, None] * u
        dcdE = u / (ru * rv)[:, None] - (c / rv**2)[:, None] * v
        gC = dUdc[:, None] * dcdC
        gE = dUdc[:, None] * dcdE
        np.add.at(g, mol.angles[:, 0], gC)
        np.add.at(g, mol.angles[:, 2], gE)
        np.add.at(g, mol.angles[:, 1], -(gC + gE))

    return g


def hessian(coords, mol, params, step=HESSIAN_FD_STEP):
    """Hessian d2U/dx2 by central finite differences of the analytic gradient.

    Returns the explicitly symmetrized (3N, 3N) matrix.
    """
    coords = np.asarray(coords, dtype=float).reshape(-1, 3)
    n = coords.size
    H = np.empty((n, n))
    flat = coords.ravel().copy()
    for i in range(n):
        x0 = flat[i]
        flat[i] = x0 + step
        gp = gradient(flat.reshape(-1, 3), mol, params).ravel()
        flat[i] = x0 - step
        gm = gradient(flat.reshape(-1, 3), mol, params).ravel()
        flat[i] = x0
        H[i] = (gp - gm) / (2.0 * step)
    return 0.5 * (H + H.T)
