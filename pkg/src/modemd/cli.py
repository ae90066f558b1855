"""Command-line front end.

    mdcli minimize --config run.cfg [--override key=value]
    mdcli modes    --config run.cfg ...
    mdcli evolve   --config run.cfg ...
    mdcli compare  --config cmp.cfg ...
    mdcli bench    --config bench.cfg ...

Config files are `key = value` lines with `#` comments.  Every output CSV
starts with `#`-prefixed header lines recording the scheme, accuracy
parameter, seed, damping strength, unit conventions, and code version, so
any artifact can be regenerated bit-for-bit from its own header.

Exit codes: 0 success, 1 user error (bad config, missing file), 2 numeric
failure (minimization, mode analysis, or integration breakdown).
"""

import dataclasses
from dataclasses import dataclass
from pathlib import Path

import click
import numpy as np

from . import __version__, diagnostics, dynamics, integrator, modes, molecule, potential
from .units import internal_to_ps, ps_to_internal

SCHEMA_VERSION = 1
EPS_TAU_RANGE = (1e-13, 1e-6)
BENCH_EPS_TAUS = (1e-6, 1e-8, 1e-10, 1e-12, 1e-13)

click.UsageError.exit_code = 1


class UserError(click.ClickException):
    exit_code = 1


class NumericError(click.ClickException):
    exit_code = 2


NUMERIC_FAILURES = (molecule.MinimizationError, modes.ModeError,
                    integrator.IntegrationError, potential.PotentialError,
                    diagnostics.RateFitError, np.linalg.LinAlgError,
                    ZeroDivisionError, FloatingPointError)


@dataclass
class RunConfig:
    molecule: str = ""
    scheme: str = "cartesian"
    temperature: float = 300.0       # kelvin
    t_end: float = 100.0             # ps
    out_interval: float = 10.0       # ps
    eps_tau: float = 1e-10
    seed: int = 0
    eta: float = 1.0
    outdir: str = "."
    # compare inputs: evolve-output .npz paths
    reference: str = ""
    trials: str = ""
    # bench matrix (comma-separated)
    molecules: str = ""
    schemes: str = ""
    eps_taus: str = ""
    allow_any_eps_tau: bool = False

    def validate(self):
        if self.t_end <= 0:
            raise UserError("t_end must be positive")
        if self.out_interval <= 0:
            raise UserError("out_interval must be positive")
        if not self.allow_any_eps_tau and not (
                EPS_TAU_RANGE[0] <= self.eps_tau <= EPS_TAU_RANGE[1]):
            raise UserError(
                f"eps_tau {self.eps_tau:g} outside "
                f"[{EPS_TAU_RANGE[0]:g}, {EPS_TAU_RANGE[1]:g}] "
                "(set allow_any_eps_tau = true to override)")
        if self.eta < 0:
            raise UserError("eta must be nonnegative")
        try:
            dynamics.SchemeKind(self.scheme)
        except ValueError:
            valid = ", ".join(k.value for k in dynamics.SchemeKind)
            raise UserError(f"unknown scheme {self.scheme!r}; one of: {valid}")
        return self


_FIELD_TYPES = {f.name: (f.type if isinstance(f.type, str)
                         else f.type.__name__)
                for f in dataclasses.fields(RunConfig)}


def _coerce(key, raw):
    kind = _FIELD_TYPES[key]
    if kind == "bool":
        if raw.lower() in ("true", "1", "yes"):
            return True
        if raw.lower() in ("false", "0", "no"):
            return False
        raise UserError(f"config key {key}: expected boolean, got {raw!r}")
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
    except ValueError:
        raise UserError(f"config key {key}: expected {kind}, got {raw!r}")
    return raw


def load_config(path, overrides):
    """Parse a key=value config file and apply --override pairs."""
    cfg = RunConfig()
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise UserError(f"cannot read config {path}: {exc}")
    pairs = []
    for lineno, line in enumerate(lines, start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise UserError(f"{path}:{lineno}: expected key = value")
        key, value = (part.strip() for part in body.split("=", 1))
        pairs.append((key, value, f"{path}:{lineno}"))
    for item in overrides:
        if "=" not in item:
            raise UserError(f"--override {item!r}: expected key=value")
        key, value = (part.strip() for part in item.split("=", 1))
        pairs.append((key, value, "--override"))
    for key, value, where in pairs:
        if key not in _FIELD_TYPES:
            raise UserError(f"{where}: unknown config key {key!r}")
        setattr(cfg, key, _coerce(key, value))
    return cfg.validate()


def _load_molecule(cfg):
    path = Path(cfg.molecule)
    if not path.is_file():
        raise UserError(f"molecule file not found: {path}")
    try:
        return molecule.load_molecule(path)
    except molecule.MoleculeError as exc:
        raise UserError(str(exc))


def prepare_system(cfg):
    """molecule -> equilibrium -> mode basis, the common pipeline head."""
    mol = _load_molecule(cfg)
    params = potential.PotentialParams()
    x_eq = molecule.minimize_equilibrium(mol, params)
    mol = mol.with_equilibrium(x_eq)
    hess = potential.hessian(x_eq, mol, params)
    basis = modes.compute_modes(hess, mol.masses, x_eq)
    return mol, params, basis


def csv_header(cfg, mol, columns, extra=()):
    lines = [
        f"# schema_version = {SCHEMA_VERSION}",
        f"# code_version = {__version__}",
        f"# molecule = {mol.name}",
        f"# scheme = {cfg.scheme}",
        f"# temperature_K = {cfg.temperature:.17g}",
        f"# eps_tau = {cfg.eps_tau:.17g}",
        f"# seed = {cfg.seed}",
        f"# eta = {cfg.eta:.17g}",
        "# units = angstrom, amu, kcal/mol, ps",
    ]
    lines += [f"# {k} = {v}" for k, v in extra]
    lines.append(",".join(columns))
    return lines


def write_csv(path, header_lines, rows):
    text = "\n".join(header_lines)
    for row in rows:
        text += "\n" + ",".join(
            f"{v:.17g}" if isinstance(v, float) else str(v) for v in row)
    Path(path).write_text(text + "\n", encoding="utf-8")


def run_trajectory(cfg, mol, params, basis):
    """Integrate one configured run; returns (times_ps, packed states,
    Trajectory stats, phases)."""
    kind = dynamics.SchemeKind(cfg.scheme)
    state0, phases = dynamics.init_equipartition(
        mol, basis, cfg.temperature, cfg.seed)
    if kind is dynamics.SchemeKind.EXACT_CARTESIAN:
        scheme = dynamics.Scheme(kind)
        y0 = dynamics.to_cartesian(state0, basis,
                                   mol.coords_equilibrium).pack()
    elif kind is dynamics.SchemeKind.EXACT_MODE_BASIS:
        scheme = dynamics.Scheme(kind)
        y0 = state0.pack()
    else:
        scheme = dynamics.scheme_from_init(kind, basis, mol,
                                           cfg.temperature, phases)
        y0 = np.concatenate([state0.x_cm, state0.v_cm, state0.q,
                             state0.omega])
    rhs = dynamics.make_rhs(scheme, basis, mol, params, cfg.eta)
    icfg = integrator.IntegratorConfig(eps_tau=cfg.eps_tau)
    timing = {}
    with diagnostics.timing_capture(timing):
        traj = integrator.integrate(rhs, y0, ps_to_internal(cfg.t_end),
                                    ps_to_internal(cfg.out_interval), icfg)
    times_ps = np.array([internal_to_ps(t) for t in traj.times])
    return times_ps, traj, timing["wall_seconds"], scheme


def sample_cartesian(kind, y, t_internal, scheme, mol, basis):
    """(x, v, macro) for one packed state of any scheme."""
    x0 = mol.coords_equilibrium
    if kind is dynamics.SchemeKind.EXACT_CARTESIAN:
        n = mol.n_atoms
        x = y[:3 * n].reshape(-1, 3).copy()
        v = y[3 * n:].reshape(-1, 3).copy()
        m = mol.masses
        x_cm = m @ x / mol.total_mass
        v_cm = m @ v / mol.total_mass
        macro = (x_cm, v_cm, None, None)
        return x, v, macro
    if kind is dynamics.SchemeKind.EXACT_MODE_BASIS:
        s = dynamics.ModeBasisState.unpack(y, basis.n_modes)
    else:
        amps, amp_rates = dynamics.prescribed_amplitudes(
            scheme, t_internal, basis)
        s = dynamics.ModeBasisState(y[0:3], y[3:6], y[6:10], y[10:13],
                                    amps, amp_rates)
    cart = dynamics.to_cartesian(s, basis, x0)
    return cart.x, cart.v, (s.x_cm, s.v_cm, s.q, s.omega)


def save_run(path, cfg, mol, times_ps, traj, scheme, wall_seconds):
    """Archive a run (full packed states + metadata) for compare."""
    meta = dict(schema_version=SCHEMA_VERSION, code_version=__version__,
                molecule=mol.name, molecule_path=str(cfg.molecule),
                scheme=cfg.scheme, temperature=cfg.temperature,
                eps_tau=cfg.eps_tau, seed=cfg.seed, eta=cfg.eta,
                t_end=cfg.t_end, out_interval=cfg.out_interval,
                wall_seconds=wall_seconds, n_rhs_evals=traj.n_rhs_evals,
                n_accepted=traj.n_accepted, n_rejected=traj.n_rejected)
    np.savez(path, times_ps=times_ps, states=np.array(traj.states),
             **{f"meta_{k}": np.array(v) for k, v in meta.items()})


def load_run(path):
    path = Path(path)
    if not path.is_file():
        raise UserError(f"run archive not found: {path}")
    with np.load(path, allow_pickle=False) as data:
        meta = {k[5:]: data[k][()] for k in data.files if k.startswith("meta_")}
        return np.asarray(data["times_ps"]), np.asarray(data["states"]), meta


def _outdir(cfg):
    out = Path(cfg.outdir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _run_tag(cfg, mol):
    return f"{mol.name}_{cfg.scheme}_eps{cfg.eps_tau:.0e}_seed{cfg.seed}"


@click.group()
def main():
    """Molecular dynamics in the normal-mode basis."""


def _config_options(fn):
    fn = click.option("--override", multiple=True, metavar="KEY=VALUE",
                      help="Override a config key.")(fn)
    fn = click.option("--config", "config_path", required=True,
                      type=click.Path(), help="key = value config file.")(fn)
    return fn


def _guarded(fn):
    def wrapper(config_path, override, **kw):
        cfg = load_config(config_path, override)
        try:
            fn(cfg, **kw)
        except NUMERIC_FAILURES as exc:
            raise NumericError(f"{type(exc).__name__}: {exc}")
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


@main.command()
@_config_options
@_guarded
def minimize(cfg):
    """Find the molecule's equilibrium geometry and report its energy."""
    mol = _load_molecule(cfg)
    params = potential.PotentialParams()
    x_eq = molecule.minimize_equilibrium(mol, params)
    grad = potential.gradient(x_eq, mol, params)
    energy = potential.energy(x_eq, mol, params)
    out = _outdir(cfg) / f"{mol.name}_equilibrium.mol"
    molecule.write_molecule(out, mol.with_equilibrium(x_eq), coords=x_eq)
    click.echo(f"{mol.name}: U_min = {energy:.9f} kcal/mol, "
               f"max |grad| = {np.abs(grad).max():.3e}, wrote {out}")


@main.command("modes")
@_config_options
@_guarded
def modes_cmd(cfg):
    """Mode frequencies (CSV) and the full basis dump for evolve."""
    mol, params, basis = prepare_system(cfg)
    out = _outdir(cfg)
    rows = []
    for k in range(6):
        rows.append((k, 1, 0.0, 0.0))
    for k, w in enumerate(basis.frequencies):
        rows.append((6 + k, 0, float(w), float(w / ps_to_internal(1.0))))
    header = csv_header(cfg, mol,
                        ["index", "is_zero_mode", "omega_internal",
                         "omega_per_ps"])
    csv_path = out / f"{mol.name}_modes.csv"
    write_csv(csv_path, header, rows)
    dump = out / f"{mol.name}_basis.npz"
    np.savez(dump, eigenvectors=basis.eigenvectors,
             frequencies=basis.frequencies, zero_modes=basis.zero_modes,
             coords_equilibrium=mol.coords_equilibrium)
    click.echo(f"{mol.name}: {basis.n_modes} positive modes, 6 zero modes; "
               f"wrote {csv_path} and {dump}")


@main.command()
@_config_options
@_guarded
def evolve(cfg):
    """Integrate one run; emit a per-sample diagnostics CSV and a state
    archive."""
    mol, params, basis = prepare_system(cfg)
    times_ps, traj, wall, scheme = run_trajectory(cfg, mol, params, basis)
    kind = dynamics.SchemeKind(cfg.scheme)
    rows = []
    cons0 = None
    for t_ps, y in zip(times_ps, traj.states):
        x, v, macro = sample_cartesian(kind, y, ps_to_internal(t_ps),
                                       scheme, mol, basis)
        cons = diagnostics.conserved_quantities(x, v, mol, params)
        if cons0 is None:
            cons0 = cons
        x_cm, v_cm, q, omega = macro
        q = q if q is not None else np.full(4, np.nan)
        omega = omega if omega is not None else np.full(3, np.nan)
        rows.append((float(t_ps), cons.energy,
                     abs(cons.energy - cons0.energy) / abs(cons0.energy),
                     float(np.linalg.norm(cons.momentum - cons0.momentum)
                           / np.linalg.norm(cons0.momentum)),
                     float(np.linalg.norm(cons.angular_momentum
                                          - cons0.angular_momentum)
                           / np.linalg.norm(cons0.angular_momentum)),
                     *map(float, x_cm), *map(float, v_cm),
                     *map(float, q), *map(float, omega)))
    out = _outdir(cfg)
    tag = _run_tag(cfg, mol)
    header = csv_header(
        cfg, mol,
        ["t_ps", "energy", "err_E", "err_P", "err_J",
         "x_cm_x", "x_cm_y", "x_cm_z", "v_cm_x", "v_cm_y", "v_cm_z",
         "q0", "q1", "q2", "q3", "omega_x", "omega_y", "omega_z"],
        extra=[("wall_seconds", f"{wall:.6f}"),
               ("n_rhs_evals", traj.n_rhs_evals),
               ("n_accepted", traj.n_accepted),
               ("n_rejected", traj.n_rejected)])
    csv_path = out / f"{tag}.csv"
    write_csv(csv_path, header, rows)
    save_run(out / f"{tag}.npz", cfg, mol, times_ps, traj, scheme, wall)
    click.echo(f"wrote {csv_path} ({len(rows)} samples, {wall:.2f} s, "
               f"{traj.n_rhs_evals} rhs evals)")


def _compare_one(ref_times, ref_states, ref_meta, trial_path, mol, params,
                 basis):
    times, states, meta = load_run(trial_path)
    for key in ("molecule", "seed"):
        if str(meta[key]) != str(ref_meta[key]):
            raise UserError(
                f"{trial_path}: {key} mismatch with reference "
                f"({meta[key]!r} vs {ref_meta[key]!r})")
    if len(times) != len(ref_times) or not np.allclose(times, ref_times):
        raise UserError(f"{trial_path}: sample grid differs from reference")
    ref_kind = dynamics.SchemeKind(str(ref_meta["scheme"]))
    kind = dynamics.SchemeKind(str(meta["scheme"]))
    scheme = _rebuild_scheme(kind, meta, mol, basis)
    ref_scheme = _rebuild_scheme(ref_kind, ref_meta, mol, basis)
    rows = []
    cons0 = None
    for t_ps, y, y_ref in zip(times, states, ref_states):
        t_int = ps_to_internal(float(t_ps))
        x, v, macro = sample_cartesian(kind, y, t_int, scheme, mol, basis)
        xr, vr, macro_r = sample_cartesian(ref_kind, y_ref, t_int,
                                           ref_scheme, mol, basis)
        cons = diagnostics.conserved_quantities(x, v, mol, params)
        if cons0 is None:
            cons0 = cons
        has_q = macro[2] is not None and macro_r[2] is not None
        row = [float(t_ps),
               diagnostics.position_rmsd(x, xr),
               abs(cons.energy - cons0.energy) / abs(cons0.energy),
               float(np.linalg.norm(cons.momentum - cons0.momentum)
                     / np.linalg.norm(cons0.momentum)),
               float(np.linalg.norm(cons.angular_momentum
                                    - cons0.angular_momentum)
                     / np.linalg.norm(cons0.angular_momentum)),
               float(np.linalg.norm(macro[0] - macro_r[0])),
               float(np.linalg.norm(macro[1] - macro_r[1]))]
        if has_q:
            row.append(float(np.linalg.norm(macro[3] - macro_r[3])
                             / np.linalg.norm(macro_r[3])))
            row.append(diagnostics.quaternion_distance(macro[2], macro_r[2]))
        else:
            row.extend([float("nan"), float("nan")])
        rows.append(tuple(row))
    return rows, meta


def _rebuild_scheme(kind, meta, mol, basis):
    if kind.uses_sinusoids:
        _, phases = dynamics.init_equipartition(
            mol, basis, float(meta["temperature"]), int(meta["seed"]))
        return dynamics.scheme_from_init(kind, basis, mol,
                                         float(meta["temperature"]), phases)
    return dynamics.Scheme(kind)


@main.command()
@_config_options
@_guarded
def compare(cfg):
    """Error metrics of one or more archived runs against a reference
    run."""
    if not cfg.reference or not cfg.trials:
        raise UserError("compare needs `reference` and `trials` config keys")
    ref_times, ref_states, ref_meta = load_run(cfg.reference)
    cfg.molecule = str(ref_meta["molecule_path"])
    mol, params, basis = prepare_system(cfg)
    out = _outdir(cfg)
    columns = ["t_ps", "err_x", "err_E", "err_P", "err_J",
               "err_x_cm", "err_v_cm", "err_omega", "err_q"]
    for trial in (t.strip() for t in cfg.trials.split(",") if t.strip()):
        rows, meta = _compare_one(ref_times, ref_states, ref_meta, trial,
                                  mol, params, basis)
        tag = (f"{mol.name}_{meta['scheme']}_eps{float(meta['eps_tau']):.0e}"
               f"_vs_{ref_meta['scheme']}")
        cfg.scheme = str(meta["scheme"])
        cfg.eps_tau = float(meta["eps_tau"])
        cfg.seed = int(meta["seed"])
        header = csv_header(cfg, mol, columns,
                            extra=[("reference_scheme", ref_meta["scheme"]),
                                   ("reference_eps_tau",
                                    f"{float(ref_meta['eps_tau']):.17g}")])
        path = out / f"compare_{tag}.csv"
        write_csv(path, header, rows)
        click.echo(f"wrote {path}")


@main.command()
@_config_options
@_guarded
def bench(cfg):
    """Wall-clock matrix over schemes and accuracy parameters, with ratios
    against exact Cartesian."""
    molecules = [m.strip() for m in
                 (cfg.molecules or cfg.molecule).split(",") if m.strip()]
    schemes = [s.strip() for s in cfg.schemes.split(",") if s.strip()] or \
        [k.value for k in dynamics.SchemeKind]
    eps_taus = ([float(e) for e in cfg.eps_taus.split(",") if e.strip()]
                if cfg.eps_taus else list(BENCH_EPS_TAUS))
    for s in schemes:
        dynamics.SchemeKind(s)
    out = _outdir(cfg)
    rows = []
    totals = {}
    atom_counts = {}
    for mol_path in molecules:
        cell_cfg = dataclasses.replace(cfg, molecule=mol_path,
                                       allow_any_eps_tau=True)
        mol, params, basis = prepare_system(cell_cfg)
        atom_counts[mol.name] = mol.n_atoms
        # epsilon-outer order interleaves the schemes in time, so load
        # transients on a shared machine bias every scheme's total alike
        for eps in eps_taus:
            for scheme_name in schemes:
                cell = dataclasses.replace(cell_cfg, scheme=scheme_name,
                                           eps_tau=eps)
                times_ps, traj, wall, _ = run_trajectory(cell, mol, params,
                                                         basis)
                rows.append((mol.name, scheme_name, float(eps), wall,
                             traj.n_rhs_evals, traj.n_accepted,
                             traj.n_rejected))
                key = (mol.name, scheme_name)
                totals[key] = totals.get(key, 0.0) + wall
    ratio_rows = []
    for (name, scheme_name), total in totals.items():
        base = totals.get((name, "cartesian"))
        ratio = total / base if base else float("nan")
        ratio_rows.append((name, scheme_name, total, ratio,
                           atom_counts[name]))
    mol0 = _load_molecule(dataclasses.replace(cfg, molecule=molecules[0]))
    header = csv_header(cfg, mol0,
                        ["molecule", "scheme", "eps_tau", "wall_seconds",
                         "n_rhs_evals", "n_accepted", "n_rejected"])
    write_csv(out / "bench_cells.csv", header, rows)
    header2 = csv_header(cfg, mol0,
                         ["molecule", "scheme", "total_wall_seconds",
                          "ratio_vs_cartesian", "n_atoms"])
    write_csv(out / "bench_totals.csv", header2, ratio_rows)
    click.echo(f"wrote {out / 'bench_cells.csv'} and "
               f"{out / 'bench_totals.csv'}")


if __name__ == "__main__":
    main()
