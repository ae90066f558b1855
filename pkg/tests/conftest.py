"""Shared fixtures: prepared molecules and a disk cache for long runs.

Trajectory results are cached under tests/_cache keyed by every input that
determines them, so repeated test sessions skip the expensive
integrations.  Delete the directory to force recomputation.
"""

from importlib.resources import files
from pathlib import Path

import numpy as np
import pytest

from modemd import __version__, dynamics, integrator, modes, molecule, potential
from modemd.units import ps_to_internal

CACHE_DIR = Path(__file__).parent / "_cache"


def data_path(name):
    return files("modemd.data") / f"{name}.mol"


_system_cache = {}


def prepared_system(name):
    """(molecule-with-equilibrium, params, mode basis) for a data molecule."""
    if name not in _system_cache:
        params = potential.PotentialParams()
        mol = molecule.load_molecule(data_path(name))
        x_eq = molecule.minimize_equilibrium(mol, params)
        mol = mol.with_equilibrium(x_eq)
        hess = potential.hessian(x_eq, mol, params)
        basis = modes.compute_modes(hess, mol.masses, x_eq)
        _system_cache[name] = (mol, params, basis)
    return _system_cache[name]


@pytest.fixture(scope="session")
def c20_system():
    return prepared_system("c20")


@pytest.fixture(scope="session")
def all_systems():
    return {name: prepared_system(name)
            for name in ("c20", "c26", "c60", "c70")}


def cached_run(name, scheme_kind, *, eps_tau, t_end_ps, out_interval_ps,
               seed, temperature=300.0, eta=1.0):
    """Integrate one run (or load it from the disk cache).

    Returns (times_ps, states, stats dict).  States are the packed vectors
    of the scheme's own representation.
    """
    key = (f"{name}_{scheme_kind}_eps{eps_tau:.0e}_t{t_end_ps:g}"
           f"_dt{out_interval_ps:g}_s{seed}_T{temperature:g}_eta{eta:g}"
           f"_v{__version__}")
    path = CACHE_DIR / f"{key}.npz"
    if path.is_file():
        with np.load(path) as data:
            return (data["times_ps"], data["states"],
                    {k: float(data[k]) for k in
                     ("wall_seconds", "n_rhs_evals", "n_accepted",
                      "n_rejected")})
    mol, params, basis = prepared_system(name)
    kind = dynamics.SchemeKind(scheme_kind)
    state0, phases = dynamics.init_equipartition(mol, basis, temperature,
                                                 seed)
    if kind is dynamics.SchemeKind.EXACT_CARTESIAN:
        scheme = dynamics.Scheme(kind)
        y0 = dynamics.to_cartesian(state0, basis,
                                   mol.coords_equilibrium).pack()
    elif kind is dynamics.SchemeKind.EXACT_MODE_BASIS:
        scheme = dynamics.Scheme(kind)
        y0 = state0.pack()
    else:
        scheme = dynamics.scheme_from_init(kind, basis, mol, temperature,
                                           phases)
        y0 = np.concatenate([state0.x_cm, state0.v_cm, state0.q,
                             state0.omega])
    rhs = dynamics.make_rhs(scheme, basis, mol, params, eta)
    cfg = integrator.IntegratorConfig(eps_tau=eps_tau)
    import time
    start = time.perf_counter()
    traj = integrator.integrate(rhs, y0, ps_to_internal(t_end_ps),
                                ps_to_internal(out_interval_ps), cfg)
    wall = time.perf_counter() - start
    times_ps = np.array([t / ps_to_internal(1.0) for t in traj.times])
    states = np.array(traj.states)
    CACHE_DIR.mkdir(exist_ok=True)
    np.savez(path, times_ps=times_ps, states=states,
             wall_seconds=wall, n_rhs_evals=traj.n_rhs_evals,
             n_accepted=traj.n_accepted, n_rejected=traj.n_rejected)
    return times_ps, states, dict(wall_seconds=wall,
                                  n_rhs_evals=traj.n_rhs_evals,
                                  n_accepted=traj.n_accepted,
                                  n_rejected=traj.n_rejected)


def unpack_cartesian(name, scheme_kind, times_ps, states,
                     temperature=300.0, seed=0):
    """Per-sample (x, v, macro) for cached-run states of any scheme."""
    mol, params, basis = prepared_system(name)
    kind = dynamics.SchemeKind(scheme_kind)
    if kind.uses_sinusoids or kind in (dynamics.SchemeKind.ZMA,
                                       dynamics.SchemeKind.MCZMA):
        _, phases = dynamics.init_equipartition(mol, basis, temperature,
                                                seed)
        scheme = dynamics.scheme_from_init(kind, basis, mol, temperature,
                                           phases)
    else:
        scheme = dynamics.Scheme(kind)
    out = []
    for t_ps, y in zip(times_ps, states):
        from modemd.cli import sample_cartesian
        out.append(sample_cartesian(kind, y, ps_to_internal(float(t_ps)),
                                    scheme, mol, basis))
    return out
