"""
Configuration settings and constants for the phase-space verification harness
"""

# Version string; enters the config hash so artifacts from different releases never collide
VERSION = "1.0.0"

# Reproducibility
DEFAULT_SEED = 0x5EED
DEFAULT_TRIALS = 100
THREADS_ENV_VAR = "PHASECOVER_THREADS"

# Group defaults
DEFAULT_V_RADIUS = 1
RANDOM_TRIPLES = 200

# GRS / FGL checks
GRS_TOLERANCE = 0.05
GRS_N_MAX = 64

# Linear algebra cutoffs (relative to the largest eigen/singular value)
EIGEN_CUTOFF = 1e-12
SVD_CUTOFF = 1e-12
FRAME_CUTOFF = 1e-10

# Verification tolerances
REPRODUCTION_TOL = 1e-10
ADJOINT_TOL = 1e-12
DOMINATION_TOL = 1e-12
PARTITION_TOL = 1e-12
INVERSE_TOL = 1e-8
MOYAL_TOL = 1e-10
ENVELOPE_RTOL = 1e-12

# Artifact formatting
FLOAT_FORMAT = "%.12g"
SIGNIFICANT_DIGITS = 12
VERIFY_CELL_TOL = 1e-9
CONFIG_HASH_LENGTH = 16

# Artifact layout
CERTIFICATE_FILE = "certificate.csv"
EQUIVALENCE_FILE = "equivalence.csv"
INVARIANTS_FILE = "invariants.json"
PLOTDATA_DIR = "plotdata"

CERTIFICATE_COLUMNS = ["U_radius", "empirical_opnorm", "theory_bound", "config_hash"]
EQUIVALENCE_COLUMNS = [
    "space", "p", "q", "weight", "trial_count", "c_min", "c_max", "ratio", "config_hash"
]

# Exit codes
EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERIC = 2
EXIT_MISMATCH = 3

# Gabor defaults
DEFAULT_WINDOW_SIGMA = 1.0
MIN_REDUNDANCY = 2

# Localized frame defaults
LOCALIZED_DECAY = 0.5
LOCALIZED_PERTURBATION = 0.2

# Half-width of the box used for translation norms and admissibility sweeps on Z^d
SAMPLE_RADIUS = 16

# Invariant suite thresholds
INVARIANT_N_MAX = 256
ALGEBRA_PAIRS = 50
SPACE_TRIALS = 20
PROJECTOR_TOL = 1e-10
SINGULAR_TOL = 1e-10
CERTIFICATE_FINAL_TOL = 1e-6
CERTIFICATE_SLACK = 10.0
CERTIFIED_EPSILONS = (0.1, 0.01)
MULTIPLIER_FINAL_TOL = 1e-3
MULTIPLIER_UNIFORMITY = 1.5
SPECTRAL_GAP_FACTOR = 0.3
EQUIVALENCE_SPREAD_MAX = 10.0
EQUIVALENCE_UNIFORMITY = 4.0
ORACLE_TOL = 1e-10
ORACLE_TRIALS = 20
