"""Internal unit system: angstrom, amu, kcal/mol.

The derived time unit is sqrt(amu * A^2 * mol / kcal) ~ 48.888 fs.  All
internal computations use these units; file I/O reports times in ps.
"""

# Boltzmann constant, kcal/(mol K)
K_BOLTZMANN = 1.9872e-3

# Standard atomic weight of carbon, amu
CARBON_MASS = 12.011

# One internal time unit expressed in picoseconds
PS_PER_INTERNAL = 4.88882e-2
INTERNAL_PER_PS = 1.0 / PS_PER_INTERNAL


def ps_to_internal(t_ps):
    return t_ps * INTERNAL_PER_PS


def internal_to_ps(t_int):
    return t_int * PS_PER_INTERNAL
