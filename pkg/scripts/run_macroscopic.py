"""Macroscopic-variable experiment: how well the approximations track the
center of mass and orientation of an exact run.

Uses the exact mode-basis run at eps_tau = 1e-13 as the reference (it
carries the quaternion and angular velocity explicitly), compares the
four large-scale approximations plus an exact run at eps_tau = 1e-12
against it, and leaves compare_*.csv files with err_x_cm / err_v_cm
(fig7 input) and err_q / err_omega (fig8 input).

Run from the repository root:  python3 scripts/run_macroscopic.py
"""

from common import (REFERENCE_EPS, RESULTS, base_config, mdcli,
                    molecule_path, run_tag)

TRIALS = (("modebasis", 1e-12), ("sma", REFERENCE_EPS),
          ("zma", REFERENCE_EPS), ("mcsma", REFERENCE_EPS),
          ("mczma", REFERENCE_EPS))


def main():
    outdir = RESULTS / "macroscopic"
    cfg = base_config(outdir, molecule=molecule_path("c20"))
    mdcli("evolve", cfg, "scheme=modebasis", f"eps_tau={REFERENCE_EPS}")
    trials = []
    for scheme, eps in TRIALS:
        mdcli("evolve", cfg, f"scheme={scheme}", f"eps_tau={eps}")
        trials.append(outdir / f"{run_tag('c20', scheme, eps)}.npz")
    reference = outdir / f"{run_tag('c20', 'modebasis', REFERENCE_EPS)}.npz"
    mdcli("compare", cfg, f"reference={reference}",
          "trials=" + ",".join(str(t) for t in trials))


if __name__ == "__main__":
    main()
