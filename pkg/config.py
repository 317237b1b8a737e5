"""Configuration for the Chern-Simons-Schrodinger phase toolkit"""

import os
from pathlib import Path

VERSION = "0.3.0"

# Validity band for the power nonlinearity exponent p
P_MIN = 1.001
P_MAX = 2.999

# Scalar root / extremum tolerances
ROOT_XTOL = 1e-12
EXTREMUM_XTOL = 1e-10
OMEGA1_EQUALITY_TOL = 1e-12
K1_LOWER_BRACKET = 1e-14

# Mass constant m(p) = int w_1^2: line quadrature on [-L, L], L = factor / (p - 1)
MASS_HALF_WIDTH_FACTOR = 80.0
MASS_INTERVALS = 200_000

# Sampled solitons live on [-L, L] with L = factor / sqrt(k)
SOLITON_HALF_WIDTH_FACTOR = 40.0
SOLITON_INTERVALS = 8000

# Translated-profile tables: U sampled on multiples of this spacing
ASYMPTOTICS_SPACING = 0.02
ASYMPTOTICS_RHOS = (100.0, 200.0, 400.0)

# psi curve export: k grid relative to the degenerate root k0
PSI_KMIN_FACTOR = 1e-3
PSI_KMAX_FACTOR = 10.0
PSI_POINTS = 400

# Ball minimization
MAX_SPACING = 0.05
ARMIJO_C = 1e-4
DEFAULT_MAX_ITERS = 2000
DEFAULT_GRAD_TOL = 1e-6
DEFAULT_STEP_INIT = 1.0
MAX_BACKTRACKS = 60
PRECONDITIONER_SHIFT = 1.0
BUMP_AMPLITUDE = 0.1
BUMP_WIDTH = 1.0

# Threshold sweep over p
SWEEP_PMIN = 1.1
SWEEP_PMAX = 2.9
SWEEP_STEPS = 180

# Output
CSV_FLOAT_FORMAT = "%.9g"
DEFAULT_SEED = 2012
OUTPUT_DIR = Path(os.environ.get("CSPHASE_OUTPUT_DIR", "runs"))

# Exit codes
EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_DOMAIN = 2
EXIT_IO = 3
EXIT_NO_ROOT = 4
EXIT_DIVERGED = 5
