"""Conservation experiment: drift of E, P, J at the tightest accuracy.

Integrates C20 for 100 ps at eps_tau = 1e-13 in both exact schemes
(fig3 input) and in the four large-scale approximations (fig4-fig6
input).  The evolve CSVs carry the relative drift columns directly.

Run from the repository root:  python3 scripts/run_conservation.py
"""

from common import REFERENCE_EPS, RESULTS, base_config, mdcli, molecule_path

SCHEMES = ("cartesian", "modebasis", "sma", "zma", "mcsma", "mczma")


def main():
    cfg = base_config(RESULTS / "conservation",
                      molecule=molecule_path("c20"))
    for scheme in SCHEMES:
        mdcli("evolve", cfg, f"scheme={scheme}",
              f"eps_tau={REFERENCE_EPS}")


if __name__ == "__main__":
    main()
