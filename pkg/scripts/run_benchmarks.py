"""Runtime experiment: wall-clock cost across schemes and molecules.

Runs the full scheme x accuracy matrix on all four fullerenes over a
short window and writes bench_cells.csv / bench_totals.csv.  The totals
file carries per-scheme wall-clock ratios against exact Cartesian
(fig10 input) and atom counts for the runtime-versus-size trend
(fig9 input).

Run from the repository root:  python3 scripts/run_benchmarks.py
"""

from common import RESULTS, base_config, mdcli, molecule_path

MOLECULES = ("c20", "c26", "c60", "c70")
BENCH_T_END_PS = 2.0


def main():
    cfg = base_config(RESULTS / "benchmarks",
                      molecule=molecule_path(MOLECULES[0]),
                      t_end=BENCH_T_END_PS, out_interval=BENCH_T_END_PS)
    paths = ",".join(molecule_path(m) for m in MOLECULES)
    mdcli("bench", cfg, f"molecules={paths}")


if __name__ == "__main__":
    main()
