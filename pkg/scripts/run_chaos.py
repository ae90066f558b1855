"""Trajectory-divergence experiment: C20 runs across accuracy settings.

Integrates C20 in the exact Cartesian scheme at a ladder of accuracy
parameters plus one mode-basis trial, then compares every run against the
tightest (1e-13) Cartesian run.  The resulting compare_*.csv files carry
the per-sample position error versus time whose exponential growth rate
is the molecule's trajectory-divergence rate (fig2 input).

Run from the repository root:  python3 scripts/run_chaos.py
"""

from common import (REFERENCE_EPS, RESULTS, SEED, base_config, mdcli,
                    molecule_path, run_tag)

TRIAL_EPS = (1e-6, 1e-8, 1e-10, 1e-12)


def main():
    outdir = RESULTS / "chaos"
    cfg = base_config(outdir, molecule=molecule_path("c20"))
    mdcli("evolve", cfg, "scheme=cartesian", f"eps_tau={REFERENCE_EPS}")
    trials = []
    for eps in TRIAL_EPS:
        mdcli("evolve", cfg, "scheme=cartesian", f"eps_tau={eps}")
        trials.append(outdir / f"{run_tag('c20', 'cartesian', eps)}.npz")
    mdcli("evolve", cfg, "scheme=modebasis", "eps_tau=1e-10")
    trials.append(outdir / f"{run_tag('c20', 'modebasis', 1e-10)}.npz")
    reference = outdir / f"{run_tag('c20', 'cartesian', REFERENCE_EPS)}.npz"
    mdcli("compare", cfg, f"reference={reference}",
          "trials=" + ",".join(str(t) for t in trials))


if __name__ == "__main__":
    main()
