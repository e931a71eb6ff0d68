"""Physical constants, SI units (CODATA 2018; k_B and hbar exact by definition)."""

C_LIGHT = 2.99792458e8  # m/s
HBAR = 1.054571817e-34  # J s
K_B = 1.380649e-23      # J/K
