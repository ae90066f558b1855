"""Mass-weighted normal-mode basis: eigensolve, rigid-mode projection,
normalization.

Basis vectors e^mu satisfy, with M the total mass and x0 the equilibrium
geometry (center of mass at the origin):

    sum_A (m_A/M) e^mu_A . e^nu_A = delta^{mu nu}
    sum_A (m_A/M) e^mu_A = 0
    sum_A (m_A/M) e^mu_A x x0_A = 0

Frequencies are in inverse internal time units (see units.py).
"""

from dataclasses import dataclass

import numpy as np

# |omega^2| below this fraction of the largest eigenvalue counts as a zero mode
ZERO_MODE_RELATIVE_THRESHOLD = 1e-8
# relative eigenvalue spacing that groups modes into a degenerate cluster
DEGENERACY_CLUSTER_TOL = 1e-6


class ModeError(RuntimeError):
    """Eigenstructure inconsistent with a stable, generic equilibrium."""


@dataclass(frozen=True)
class ModeBasis:
    """Internal vibration basis of a molecule at equilibrium."""

    eigenvectors: np.ndarray   # (3N-6, N, 3), mass-orthonormalized
    frequencies: np.ndarray    # (3N-6,), ascending, 1/internal-time
    zero_modes: np.ndarray     # (6, N, 3) rigid translations/rotations

    @property
    def n_modes(self):
        return len(self.frequencies)


def _mass_dot(a, b, masses, total_mass):
    """Inner product sum_A (m_A/M) a_A . b_A for (..., N, 3) arrays."""
    return np.einsum("...ij,...ij->...", masses[:, None] / total_mass * a, b)


def rigid_mode_vectors(x0, masses):
    """Six mass-orthonormal rigid-motion vectors (3 translations, 3 rotations).

    x0 must be centered at the center of mass.  Raises ModeError for
    rotationally degenerate geometries (collinear molecules).
    """
    x0 = np.asarray(x0, dtype=float).reshape(-1, 3)
    masses = np.asarray(masses, dtype=float)
    n = len(x0)
    M = masses.sum()
    raw = np.zeros((6, n, 3))
    for k in range(3):
        raw[k, :, k] = 1.0
        axis = np.zeros(3)
        axis[k] = 1.0
        raw[3 + k] = np.cross(axis, x0)
    out = []
    for v in raw:
        w = v.copy()
        for u in out:
            w -= _mass_dot(u, w, masses, M) * u
        norm2 = _mass_dot(w, w, masses, M)
        if norm2 < 1e-12:
            raise ModeError("rigid rotation generators are rank deficient "
                            "(collinear or degenerate geometry)")
        out.append(w / np.sqrt(norm2))
    return np.array(out)


def _fix_sign(vec):
    flat = vec.ravel()
    idx = np.nonzero(np.abs(flat) > 1e-8)[0]
    if len(idx) and flat[idx[0]] < 0:
        return -vec
    return vec


def project_and_normalize(raw_modes, eigenvalues, rigid, masses):
    """Remove rigid components and re-orthonormalize the mode vectors.

    Modified Gram-Schmidt runs within clusters of (nearly) degenerate
    eigenvalues; well-separated modes keep their direction.  Raises
    ModeError if a vector collapses onto the rigid space.
    """
    masses = np.asarray(masses, dtype=float)
    M = masses.sum()
    modes = np.array(raw_modes, dtype=float)
    for k, v in enumerate(modes):
        for u in rigid:
            v -= _mass_dot(u, v, masses, M) * u
        norm2 = _mass_dot(v, v, masses, M)
        if norm2 < 1e-6:
            raise ModeError(f"mode {k} lies in the rigid subspace")
        modes[k] = v

    # cluster boundaries by relative eigenvalue spacing
    start = 0
    scale = max(np.max(np.abs(eigenvalues)), 1.0)
    for k in range(1, len(modes) + 1):
        end_of_cluster = (k == len(modes) or
                          abs(eigenvalues[k] - eigenvalues[k - 1])
                          > DEGENERACY_CLUSTER_TOL * scale)
        if end_of_cluster:
            for a in range(start, k):
                v = modes[a]
                for b in range(start, a):
                    v -= _mass_dot(modes[b], v, masses, M) * modes[b]
                norm2 = _mass_dot(v, v, masses, M)
                if norm2 < 1e-10:
                    raise ModeError("rank collapse inside degenerate cluster")
                modes[a] = _fix_sign(v / np.sqrt(norm2))
            start = k
    return modes


def compute_modes(hessian, masses, x0,
                  zero_threshold=ZERO_MODE_RELATIVE_THRESHOLD):
    """Solve the mass-weighted eigenproblem and build the ModeBasis.

    The generalized problem H e = m omega^2 e is reduced to a symmetric
    standard problem with the substitution e~ = sqrt(m) e.  The six
    smallest-magnitude eigenvalues must be the rigid modes; the remaining
    3N-6 eigenvectors are projected against the rigid space and
    renormalized.
    """
    masses = np.asarray(masses, dtype=float)
    x0 = np.asarray(x0, dtype=float).reshape(-1, 3)
    n = len(masses)
    H = np.asarray(hessian, dtype=float)
    if H.shape != (3 * n, 3 * n):
        raise ModeError("hessian shape does not match atom count")
    if not np.allclose(H, H.T, atol=1e-8 * max(np.abs(H).max(), 1.0)):
        raise ModeError("hessian is not symmetric")

    sqrt_m = np.repeat(np.sqrt(masses), 3)
    Hw = H / sqrt_m[:, None] / sqrt_m[None, :]
    Hw = 0.5 * (Hw + Hw.T)
    evals, evecs = np.linalg.eigh(Hw)

    scale = np.max(np.abs(evals))
    small = np.abs(evals) < zero_threshold * scale
    if small.sum() != 6:
        raise ModeError(
            f"expected 6 zero modes, found {int(small.sum())} eigenvalues "
            f"below {zero_threshold:.1e} of the spectral radius")
    keep = ~small
    if np.any(evals[keep] <= 0):
        raise ModeError("negative eigenvalue beyond the zero threshold: "
                        "unstable equilibrium")

    M = masses.sum()
    # e_A = sqrt(M/m_A) * etilde_A gives Eq.-4 normalization
    raw = (evecs[:, keep].T.reshape(-1, n, 3)
           * np.sqrt(M) / sqrt_m.reshape(n, 3))
    order = np.argsort(evals[keep])
    raw = raw[order]
    w2 = evals[keep][order]

    rigid = rigid_mode_vectors(x0, masses)
    modes = project_and_normalize(raw, w2, rigid, masses)
    return ModeBasis(eigenvectors=modes, frequencies=np.sqrt(w2),
                     zero_modes=rigid)


def constraint_residuals(basis, masses, x0):
    """Max violations of the orthonormality/translation/rotation constraints."""
    masses = np.asarray(masses, dtype=float)
    M = masses.sum()
    e = basis.eigenvectors
    gram = np.einsum("aij,bij->ab", e * (masses[:, None] / M), e)
    ortho = np.abs(gram - np.eye(len(e))).max()
    trans = np.abs(np.einsum("aij,i->aj", e, masses / M)).max()
    rotv = np.cross(e, x0[None, :, :])
    rot = np.abs(np.einsum("aij,i->aj", rotv, masses / M)).max()
    return ortho, trans, rot
