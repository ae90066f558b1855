"""Molecule ingestion, angle-topology construction, equilibrium minimization."""

import functools
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import minimize_scalar

from . import potential

DEFAULT_MIN_TOL = 1e-10   # gradient max-norm, kcal/A/mol
MAX_CG_ITER = 100_000


class MoleculeError(ValueError):
    """Invalid molecule file or topology."""


class MinimizationError(RuntimeError):
    """Equilibrium minimization failed to reach tolerance."""


def build_angles(bonds, n_atoms):
    """All bonded angle triples (C, D, E) with vertex D.

    One triple per unordered pair {C, E} of distinct neighbors of each
    vertex, with C < E, sorted by (D, C, E).  Output is independent of the
    bond-list input order.
    """
    neighbors = [set() for _ in range(n_atoms)]
    for i, j in np.asarray(bonds, dtype=int).reshape(-1, 2):
        neighbors[i].add(int(j))
        neighbors[j].add(int(i))
    triples = []
    for d in range(n_atoms):
        nb = sorted(neighbors[d])
        for a in range(len(nb)):
            for b in range(a + 1, len(nb)):
                triples.append((nb[a], d, nb[b]))
    triples.sort(key=lambda t: (t[1], t[0], t[2]))
    return np.array(triples, dtype=int).reshape(-1, 3)


@dataclass(frozen=True)
class Molecule:
    """Static molecular structure: masses, topology, reference geometry."""

    name: str
    masses: np.ndarray            # (N,) amu
    bonds: np.ndarray             # (B, 2) int, i < j
    angles: np.ndarray            # (A, 3) int, vertex in the middle
    coords_initial: np.ndarray    # (N, 3) angstrom
    coords_equilibrium: np.ndarray | None = field(default=None)

    def __post_init__(self):
        n = self.n_atoms
        bonds = self.bonds
        if len(bonds) and (bonds.min() < 0 or bonds.max() >= n):
            raise MoleculeError("bond index out of range")
        if len(bonds) != len({(min(i, j), max(i, j)) for i, j in bonds}):
            raise MoleculeError("duplicate bonds")
        if np.any(bonds[:, 0] == bonds[:, 1]) if len(bonds) else False:
            raise MoleculeError("self-bond")
        self._check_connected()
        bondset = {(min(i, j), max(i, j)) for i, j in bonds}
        for c, d, e in self.angles:
            if c == e:
                raise MoleculeError(f"degenerate angle ({c},{d},{e})")
            for pair in ((c, d), (d, e)):
                if (min(pair), max(pair)) not in bondset:
                    raise MoleculeError(
                        f"angle ({c},{d},{e}) references missing bond {pair}")

    def _check_connected(self):
        n = self.n_atoms
        if n == 1 and len(self.bonds) == 0:
            raise MoleculeError("single atom with no bonds: degenerate topology")
        adj = [[] for _ in range(n)]
        for i, j in self.bonds:
            adj[i].append(j)
            adj[j].append(i)
        seen = np.zeros(n, dtype=bool)
        stack = [0]
        seen[0] = True
        while stack:
            for k in adj[stack.pop()]:
                if not seen[k]:
                    seen[k] = True
                    stack.append(k)
        if not seen.all():
            raise MoleculeError("bond graph is not connected")

    @property
    def n_atoms(self):
        return len(self.masses)

    @functools.cached_property
    def total_mass(self):
        return float(self.masses.sum())

    def center_of_mass(self, coords):
        return self.masses @ np.asarray(coords).reshape(-1, 3) / self.total_mass

    def with_equilibrium(self, coords):
        return Molecule(self.name, self.masses, self.bonds, self.angles,
                        self.coords_initial, np.asarray(coords, dtype=float))


def load_molecule(path):
    """Parse a molecule data file.

    The format is line oriented; '#' starts a comment.  Sections:

        name <identifier>
        mass <amu>            (one mass applied to all atoms)  -- or --
        masses                (followed by N lines of one mass each)
        coords                (followed by N lines of "x y z", angstrom)
        bonds                 (followed by lines of "i j", zero-based)
        angles                (optional; lines of "c d e", vertex d)

    Atom count is inferred from the coords block.  Angles are built from the
    bond list when the section is absent.
    """
    path = Path(path)
    name = path.stem
    mass_scalar = None
    sections = {"masses": [], "coords": [], "bonds": [], "angles": []}
    current = None
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tokens = line.split()
            key = tokens[0].lower()
            if key == "name" and len(tokens) == 2:
                name = tokens[1]
                current = None
            elif key == "mass" and len(tokens) == 2:
                mass_scalar = float(tokens[1])
                current = None
            elif key in sections and len(tokens) == 1:
                current = key
            elif current is not None:
                try:
                    sections[current].append([float(t) for t in tokens])
                except ValueError as exc:
                    raise MoleculeError(
                        f"{path}:{lineno}: cannot parse {current} row: {line!r}"
                    ) from exc
            else:
                raise MoleculeError(f"{path}:{lineno}: unexpected line {line!r}")

    coords = np.array(sections["coords"], dtype=float)
    if coords.ndim != 2 or coords.shape[1] != 3 or len(coords) == 0:
        raise MoleculeError(f"{path}: missing or malformed coords section")
    n = len(coords)
    if sections["masses"]:
        masses = np.array(sections["masses"], dtype=float).ravel()
        if len(masses) != n:
            raise MoleculeError(f"{path}: {len(masses)} masses for {n} atoms")
    elif mass_scalar is not None:
        masses = np.full(n, mass_scalar)
    else:
        raise MoleculeError(f"{path}: no mass or masses section")

    bonds = np.array(sections["bonds"], dtype=float)
    if bonds.size == 0:
        bonds = np.empty((0, 2), dtype=int)
    elif bonds.ndim != 2 or bonds.shape[1] != 2:
        raise MoleculeError(f"{path}: malformed bonds section")
    bonds = np.sort(bonds.astype(int), axis=1)

    if sections["angles"]:
        angles = np.array(sections["angles"], dtype=float).astype(int)
        if angles.ndim != 2 or angles.shape[1] != 3:
            raise MoleculeError(f"{path}: malformed angles section")
    else:
        angles = build_angles(bonds, n)

    try:
        return Molecule(name, masses, bonds, angles, coords)
    except MoleculeError as exc:
        raise MoleculeError(f"{path}: {exc}") from exc


def write_molecule(path, mol, coords=None):
    """Write a molecule data file in the load_molecule format."""
    coords = mol.coords_initial if coords is None else np.asarray(coords)
    lines = [f"name {mol.name}"]
    if np.allclose(mol.masses, mol.masses[0]):
        lines.append(f"mass {mol.masses[0]:.17g}")
    else:
        lines.append("masses")
        lines += [f"{m:.17g}" for m in mol.masses]
    lines.append("coords")
    lines += [f"{x:.17g} {y:.17g} {z:.17g}" for x, y, z in coords]
    lines.append("bonds")
    lines += [f"{i} {j}" for i, j in mol.bonds]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _line_minimize(f, x, d):
    """Brent minimization of f along direction d; returns the new point."""
    scale = np.max(np.abs(d))
    if scale == 0.0:
        return x
    res = minimize_scalar(lambda a: f(x + a * d),
                          bracket=(0.0, 0.1 / scale), method="brent",
                          options={"xtol": 1e-12})
    return x + res.x * d


def minimize_equilibrium(mol, params, tol=DEFAULT_MIN_TOL, max_iter=MAX_CG_ITER):
    """Find the equilibrium geometry by conjugate-gradient descent.

    Polak-Ribiere CG with Brent line minimizations, restarted every 3N
    iterations, followed by a few Newton polishing steps on the analytic
    gradient (energy-based line searches stall at the rounding floor well
    above a 1e-10 gradient max-norm).  The result is translated so the
    center of mass sits at the origin.
    """
    x = np.array(mol.coords_initial, dtype=float)
    n3 = x.size
    e = lambda c: potential.energy(c, mol, params)
    g = lambda c: potential.gradient(c, mol, params)

    e_start = e(x)
    grad = g(x)
    d = -grad
    # CG phase: stop once close enough for Newton polishing
    cg_tol = max(tol, 1e-5)
    it = 0
    while np.max(np.abs(grad)) > cg_tol and it < max_iter:
        x = _line_minimize(e, x, d)
        grad_new = g(x)
        if it % (3 * n3) == 3 * n3 - 1:
            beta = 0.0
        else:
            beta = max(0.0, np.vdot(grad_new, grad_new - grad)
                       / max(np.vdot(grad, grad), 1e-300))
        d = -grad_new + beta * d
        if np.vdot(d, grad_new) >= 0.0:  # not a descent direction: restart
            d = -grad_new
        grad = grad_new
        it += 1

    # Newton polish toward machine-precision stationarity
    for _ in range(50):
        gmax = np.max(np.abs(grad))
        if gmax < tol:
            break
        H = potential.hessian(x, mol, params)
        # rigid modes make H singular: pseudo-inverse restricted to the
        # well-conditioned subspace
        step, *_ = np.linalg.lstsq(H, -grad.ravel(), rcond=1e-8)
        x_new = x + step.reshape(-1, 3)
        grad_new = g(x_new)
        if np.max(np.abs(grad_new)) >= gmax:
            break
        x, grad = x_new, grad_new

    gmax = np.max(np.abs(grad))
    if gmax > tol:
        raise MinimizationError(
            f"gradient max-norm {gmax:.3e} above tolerance {tol:.1e}")
    if e(x) > e_start + 1e-9:
        raise MinimizationError("minimization increased the energy")
    return x - mol.center_of_mass(x)
