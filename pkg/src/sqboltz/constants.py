"""Physical constants in Gaussian-CGS units.

Fixed snapshot (2018 CODATA / SI exact values, converted to CGS) so that
every number produced by the rate formulas is reproducible bit for bit.
Quoted to more than 6 significant digits; do not "update" these without
re-freezing the regression values in the test suite.
"""

# Planck constant over 2*pi [erg s]
HBAR = 1.054571817e-27

# speed of light [cm/s] (exact)
C_LIGHT = 2.99792458e10

# Boltzmann constant [erg/K] (exact in SI, scaled to CGS)
K_BOLTZMANN = 1.380649e-16
