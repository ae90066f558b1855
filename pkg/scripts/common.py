"""Shared plumbing for the experiment drivers.

Each driver shells out to ``mdcli`` so the scripts exercise exactly the
interface a user would, and drops its CSV/NPZ artifacts under
``results/<experiment>/``.
"""

import subprocess
import sys
from importlib.resources import files
from pathlib import Path

RESULTS = Path(__file__).resolve().parent.parent / "results"

SEED = 1
TEMPERATURE = 300.0
T_END_PS = 100.0
OUT_INTERVAL_PS = 1.0
REFERENCE_EPS = 1e-13


def molecule_path(name):
    return str(files("modemd.data") / f"{name}.mol")


def write_config(path, **kv):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(f"{k} = {v}\n" for k, v in kv.items()))
    return path


def mdcli(command, config, *overrides):
    argv = [sys.executable, "-m", "modemd.cli", command,
            "--config", str(config)]
    for ov in overrides:
        argv += ["--override", ov]
    print("+", " ".join(argv[3:]), flush=True)
    subprocess.run(argv, check=True)


def base_config(outdir, molecule="c20", **extra):
    return write_config(
        outdir / "run.cfg", molecule=molecule, temperature=TEMPERATURE,
        t_end=T_END_PS, out_interval=OUT_INTERVAL_PS, seed=SEED,
        outdir=outdir, **extra)


def run_tag(molecule, scheme, eps, seed=SEED):
    return f"{molecule}_{scheme}_eps{eps:.0e}_seed{seed}"
