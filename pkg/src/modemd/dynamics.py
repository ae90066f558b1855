"""Right-hand sides for every evolution scheme, state transforms, and
thermal initialization.

Schemes:

    ExactCartesian  -- Newton's equations for all atoms
    ExactModeBasis  -- exact change of variables to (x_cm, v_cm, q, Omega,
                       mode amplitudes and rates)
    SMA / ZMA       -- only the 12 macroscopic degrees of freedom evolve;
                       amplitudes follow prescribed sinusoids (SMA) or
                       stay zero (ZMA), with the angular acceleration from
                       the direct rotational projection
    MCSMA / MCZMA   -- same amplitude prescriptions, but d(Omega)/dt comes
                       from the angular-momentum (torque) equation

Internally the rotational projection is evaluated in the body frame
(w = R^T Omega), which is algebraically identical to the space-frame
expressions and keeps the tensor contractions compact.
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import potential, rotation
from .units import K_BOLTZMANN

MATRIX_CONDITION_LIMIT = 1e12

_EYE3 = np.eye(3)


class SchemeKind(Enum):
    EXACT_CARTESIAN = "cartesian"
    EXACT_MODE_BASIS = "modebasis"
    SMA = "sma"
    ZMA = "zma"
    MCSMA = "mcsma"
    MCZMA = "mczma"

    @property
    def is_large_scale(self):
        return self in (SchemeKind.SMA, SchemeKind.ZMA,
                        SchemeKind.MCSMA, SchemeKind.MCZMA)

    @property
    def uses_sinusoids(self):
        return self in (SchemeKind.SMA, SchemeKind.MCSMA)


@dataclass(frozen=True)
class Scheme:
    kind: SchemeKind
    amp0: np.ndarray | None = None    # per-mode sinusoid amplitude (SMA-type)
    phase: np.ndarray | None = None   # per-mode phase (SMA-type)

    def __post_init__(self):
        if self.kind.uses_sinusoids and (self.amp0 is None or self.phase is None):
            raise ValueError(f"{self.kind.value} requires amp0 and phase")


@dataclass(frozen=True)
class CartesianState:
    x: np.ndarray   # (N, 3) angstrom
    v: np.ndarray   # (N, 3) angstrom / internal time

    def pack(self):
        return np.concatenate([self.x.ravel(), self.v.ravel()])

    @staticmethod
    def unpack(y, n_atoms):
        x = y[:3 * n_atoms].reshape(-1, 3)
        v = y[3 * n_atoms:].reshape(-1, 3)
        return CartesianState(x, v)


@dataclass(frozen=True)
class ModeBasisState:
    x_cm: np.ndarray      # (3,)
    v_cm: np.ndarray      # (3,)
    q: np.ndarray         # (4,) unit quaternion
    omega: np.ndarray     # (3,) angular velocity, space frame
    amps: np.ndarray      # (3N-6,)
    amp_rates: np.ndarray  # (3N-6,)

    def pack(self):
        return np.concatenate([self.x_cm, self.v_cm, self.q, self.omega,
                               self.amps, self.amp_rates])

    @staticmethod
    def unpack(y, n_modes):
        return ModeBasisState(
            x_cm=y[0:3], v_cm=y[3:6], q=y[6:10], omega=y[10:13],
            amps=y[13:13 + n_modes], amp_rates=y[13 + n_modes:13 + 2 * n_modes])


MACRO_DIM = 13  # x_cm, v_cm, q, omega


def _cross(a, b):
    """Cross product for (..., 3) arrays without np.cross call overhead."""
    a0, a1, a2 = a[..., 0], a[..., 1], a[..., 2]
    b0, b1, b2 = b[..., 0], b[..., 1], b[..., 2]
    out = np.empty(np.broadcast_shapes(a.shape, b.shape))
    out[..., 0] = a1 * b2 - a2 * b1
    out[..., 1] = a2 * b0 - a0 * b2
    out[..., 2] = a0 * b1 - a1 * b0
    return out


def _weighted_cross_sum(weights, a, b):
    """sum_A w_A (a_A x b_A) over rows, via six weighted dot products."""
    wa = weights[:, None] * a
    return np.array([wa[:, 1] @ b[:, 2] - wa[:, 2] @ b[:, 1],
                     wa[:, 2] @ b[:, 0] - wa[:, 0] @ b[:, 2],
                     wa[:, 0] @ b[:, 1] - wa[:, 1] @ b[:, 0]])


def delta_x(amps, basis):
    """Body-frame displacement field sum_mu A_mu e^mu_A, shape (N, 3)."""
    flat = basis.eigenvectors.reshape(len(basis.eigenvectors), -1)
    return (amps @ flat).reshape(-1, 3)


def cartesian_coords(state, basis, x0):
    """Atom positions x_A = x_cm + R (x0_A + delta x_A)."""
    R = rotation.rotation_matrix(state.q)
    y = x0 + delta_x(state.amps, basis)
    return state.x_cm + y @ R.T


def to_cartesian(state, basis, x0):
    """Map a ModeBasisState to the equivalent CartesianState."""
    R = rotation.rotation_matrix(state.q)
    y = x0 + delta_x(state.amps, basis)
    dx = y @ R.T                                   # Delta x_A, space frame
    x = state.x_cm + dx
    yd = delta_x(state.amp_rates, basis)
    v = state.v_cm + _cross(state.omega, dx) + yd @ R.T
    return CartesianState(x, v)


def cartesian_rhs(y, mol, params):
    """Packed rhs of Newton's equations."""
    n = mol.n_atoms
    x = y[:3 * n].reshape(-1, 3)
    v = y[3 * n:]
    acc = -potential.gradient(x, mol, params) / mol.masses[:, None]
    return np.concatenate([v, acc.ravel()])


def _solve_guarded(mat, vec, label):
    """Solve a 3x3 system by Cramer's rule with a near-singularity guard.

    The determinant is compared against the Frobenius-norm cube, which
    bounds 1/cond up to a constant factor; explicit scalar arithmetic
    avoids a LAPACK call per evaluation.
    """
    (a, b, c), (d, e, f), (g, h, i) = mat.tolist()
    ei_fh = e * i - f * h
    fg_di = f * g - d * i
    dh_eg = d * h - e * g
    det = a * ei_fh + b * fg_di + c * dh_eg
    scale = (a * a + b * b + c * c + d * d + e * e + f * f
             + g * g + h * h + i * i) ** 1.5
    if not np.isfinite(det) or abs(det) <= scale / MATRIX_CONDITION_LIMIT:
        raise np.linalg.LinAlgError(
            f"{label} is singular (|det| = {abs(det):.3e} "
            f"vs norm^3 = {scale:.3e})")
    x, y, z = vec.tolist()
    return np.array([
        (x * ei_fh - b * (y * i - f * z) + c * (y * h - e * z)) / det,
        (a * (y * i - f * z) + x * fg_di + c * (d * z - y * g)) / det,
        (a * (e * z - h * y) - b * (d * z - y * g) + x * dh_eg) / det,
    ])


def _rotational_projection(w, y, yd, x0, fb, masses, M):
    """Body-frame dOmega/dt from the direct rotational projection.

    Solves U . g = V where g = R^T dOmega/dt, with
        U = sum (m/M) [ (x0 . y) I - y (x) x0 ]
        V = sum (m/M) [ 2 (x0.w) yd - 2 (x0.yd) w - (w.y)(x0 x w) ]
            + (1/M) sum x0 x f_body
    """
    mw = (masses / M)[:, None]
    x0m = mw * x0
    U = float((x0m * y).sum()) * _EYE3 - y.T @ x0m
    V = 2.0 * ((x0 @ w) @ (mw * yd)) \
        - 2.0 * float((x0m * yd).sum()) * w \
        - _cross((y @ w) @ x0m, w) \
        + _cross(x0, fb).sum(axis=0) / M
    g = _solve_guarded(U, V, "rotational projection tensor")
    return g


def modebasis_rhs(yvec, basis, mol, params, eta):
    """Packed rhs of the exact mode-basis evolution equations."""
    n_modes = basis.n_modes
    s = ModeBasisState.unpack(yvec, n_modes)
    x0 = mol.coords_equilibrium
    masses = mol.masses
    M = mol.total_mass

    R = rotation.rotation_matrix(s.q)
    w = R.T @ s.omega                       # body-frame angular velocity
    y = x0 + delta_x(s.amps, basis)         # body-frame positions
    yd = delta_x(s.amp_rates, basis)        # body-frame velocity field
    coords = s.x_cm + y @ R.T
    forces = -potential.gradient(coords, mol, params)
    fb = forces @ R                         # body frame

    a_cm = forces.sum(axis=0) / M
    g = _rotational_projection(w, y, yd, x0, fb, masses, M)
    domega = R @ g

    # amplitude accelerations: project the body-frame atom accelerations
    e = basis.eigenvectors                  # (K, N, 3)
    mw = masses / M
    resid = fb / masses[:, None] - _cross(g, y) \
        - _cross(w, _cross(w, y)) - 2.0 * _cross(w, yd)
    amp_acc = np.einsum("kij,ij->k", e, mw[:, None] * resid)

    dq = rotation.quaternion_rhs(s.q, s.omega, eta)
    return np.concatenate([s.v_cm, a_cm, dq, domega, s.amp_rates, amp_acc])


def modebasis_accelerations(state, deriv, basis, x0):
    """Atom accelerations implied by a mode-basis state and its derivative.

    Differentiating v_A = v_cm + Omega x Delta_x + R yd once more gives

        a_A = a_cm + dOmega/dt x Delta_x + Omega x (Omega x Delta_x)
              + 2 Omega x (R yd) + R ydd

    with yd, ydd the first and second body-frame derivatives of the
    displacement field.
    """
    n_modes = basis.n_modes
    d = ModeBasisState.unpack(deriv, n_modes)
    a_cm, domega, amp_acc = d.v_cm, d.omega, d.amp_rates
    R = rotation.rotation_matrix(state.q)
    dx = (x0 + delta_x(state.amps, basis)) @ R.T
    yd_space = delta_x(state.amp_rates, basis) @ R.T
    ydd_space = delta_x(amp_acc, basis) @ R.T
    return (a_cm + _cross(domega, dx)
            + _cross(state.omega, _cross(state.omega, dx))
            + 2.0 * _cross(state.omega, yd_space) + ydd_space)


def prescribed_amplitudes(scheme, t, basis):
    """(A_mu, dA_mu/dt) of the large-scale amplitude prescription at time t."""
    if scheme.kind.uses_sinusoids:
        phase = basis.frequencies * t + scheme.phase
        return (scheme.amp0 * np.sin(phase),
                scheme.amp0 * basis.frequencies * np.cos(phase))
    zero = np.zeros(basis.n_modes)
    return zero, zero.copy()


def largescale_rhs(yvec, t, scheme, basis, mol, params, eta):
    """Packed rhs of the 13-component macroscopic system.

    SMA/ZMA use the direct rotational projection; MCSMA/MCZMA use the
    angular-momentum (torque) equation for dOmega/dt.
    """
    x_cm, v_cm, q, omega = yvec[0:3], yvec[3:6], yvec[6:10], yvec[10:13]
    x0 = mol.coords_equilibrium
    masses = mol.masses
    M = mol.total_mass

    amps, amp_rates = prescribed_amplitudes(scheme, t, basis)
    R = rotation.rotation_matrix(q)
    y = x0 + delta_x(amps, basis)
    yd = delta_x(amp_rates, basis)
    coords = x_cm + y @ R.T
    forces = -potential.gradient(coords, mol, params)
    a_cm = forces.sum(axis=0) / M

    if scheme.kind in (SchemeKind.SMA, SchemeKind.ZMA):
        w = R.T @ omega
        fb = forces @ R
        domega = R @ _rotational_projection(w, y, yd, x0, fb, masses, M)
    else:
        domega = _torque_equation_domega(scheme, basis, omega, R, y, yd,
                                         amps, forces, masses)
    dq = rotation.quaternion_rhs(q, omega, eta)
    return np.concatenate([v_cm, a_cm, dq, domega])


def _torque_equation_domega(scheme, basis, omega, R, y, yd, amps, forces,
                            masses):
    """dOmega/dt from d(J)/dt = external torque (zero for an isolated
    molecule)."""
    dx = y @ R.T                            # Delta x_A, space frame
    dxd = yd @ R.T                          # R d(delta x)/dt
    # B_A of the angular-momentum rate, with the dOmega/dt part split off
    b = 2.0 * _cross(omega, dxd) \
        + (dx @ omega)[:, None] * omega - float(omega @ omega) * dx
    if scheme.kind.uses_sinusoids:
        amp_acc = -basis.frequencies ** 2 * amps
        b += delta_x(amp_acc, basis) @ R.T
    mdx = masses[:, None] * dx
    j_mat = float((mdx * dx).sum()) * _EYE3 - dx.T @ mdx
    # sum_A dx x (m_A B_A - f_A) combines the rate term and the torque
    rhs_vec = _weighted_cross_sum(masses, dx, b - forces / masses[:, None])
    return _solve_guarded(j_mat, -rhs_vec, "inertia tensor")


def make_rhs(scheme, basis, mol, params, eta):
    """Bind a packed rhs function F(y, t) for the requested scheme."""
    if scheme.kind is SchemeKind.EXACT_CARTESIAN:
        return lambda y, t: cartesian_rhs(y, mol, params)
    if scheme.kind is SchemeKind.EXACT_MODE_BASIS:
        return lambda y, t: modebasis_rhs(y, basis, mol, params, eta)
    return lambda y, t: largescale_rhs(y, t, scheme, basis, mol, params, eta)


def init_equipartition(mol, basis, temperature, seed):
    """Thermal-equilibrium initial data at the given temperature.

    x_cm = 0 and q = identity; v_cm and Omega take random directions with
    magnitudes carrying kT/2 each of translational and rotational kinetic
    energy; every mode gets energy kT with a random phase.  Returns
    (state, phases) so SMA-type schemes can reuse the drawn phases.
    """
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    rng = np.random.default_rng(seed)
    kT = K_BOLTZMANN * temperature
    M = mol.total_mass
    x0 = mol.coords_equilibrium

    def random_unit():
        v = rng.normal(size=3)
        return v / np.linalg.norm(v)

    v_dir = random_unit()
    v_cm = np.sqrt(kT / M) * v_dir

    o_dir = random_unit()
    inertia = (mol.masses * np.einsum("ij,ij->i", x0, x0)).sum() * np.eye(3) \
        - np.einsum("i,ij,ik->jk", mol.masses, x0, x0)
    omega_mag = np.sqrt(kT / float(o_dir @ inertia @ o_dir))
    omega = omega_mag * o_dir

    if np.any(basis.frequencies <= 0):
        raise ValueError("mode basis contains a zero frequency")
    phases = rng.uniform(0.0, 2.0 * np.pi, size=basis.n_modes)
    amp_scale = np.sqrt(2.0 * kT / M)
    amps = amp_scale / basis.frequencies * np.sin(phases)
    amp_rates = amp_scale * np.cos(phases)

    state = ModeBasisState(
        x_cm=np.zeros(3), v_cm=v_cm, q=rotation.IDENTITY.copy(),
        omega=omega, amps=amps, amp_rates=amp_rates)
    return state, phases


def scheme_from_init(kind, basis, mol, temperature, phases):
    """Scheme record for a run started from init_equipartition output.

    The SMA sinusoid A_mu(t) = amp0_mu sin(omega_mu t + phi_mu) matches the
    equipartition amplitudes and rates at t = 0 when amp0_mu is the thermal
    amplitude sqrt(2 kT / M) / omega_mu with the same drawn phases.
    """
    kind = SchemeKind(kind) if not isinstance(kind, SchemeKind) else kind
    if kind.uses_sinusoids:
        kT = K_BOLTZMANN * temperature
        amp0 = np.sqrt(2.0 * kT / mol.total_mass) / basis.frequencies
        return Scheme(kind=kind, amp0=amp0, phase=np.asarray(phases))
    return Scheme(kind=kind)
