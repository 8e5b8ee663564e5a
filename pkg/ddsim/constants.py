"""
Application Constants - FALLBACK DEFAULTS

Numeric tolerances and experiment defaults used when a configuration file
does not set a value. Output location can be overridden with DDSIM_OUT.
"""

# ===========================================
# Output
# ===========================================
DEFAULT_OUTPUT_DIR = "./data"
CSV_FLOAT_FORMAT = ".16e"  # 17 significant digits

# ===========================================
# Numerical Tolerances
# ===========================================
NORM_TOLERANCE = 1e-10          # normalised states
UNITARITY_TOLERANCE = 1e-10     # ||v v* - 1|| for system unitaries
QUBIT_NORM_TOLERANCE = 1e-8     # initial qubit vectors
DENSITY_TOLERANCE = 1e-10       # Hermiticity / trace / positivity of rho
AVERAGING_TOLERANCE = 1e-12     # decoupling-set averaging identity
NORM_DRIFT_GUARD = 1e-6         # run aborts beyond this drift
FOCK_LEAKAGE_GUARD = 1e-8       # top-two Fock level population
GRID_MULTIPLE_TOLERANCE = 1e-9  # "t is a multiple of ds"

# ===========================================
# Physical Defaults
# ===========================================
SHALLOW_POCKET_GAMMA = 4.0      # xi_C(x) = (2/pi / (x^2 + 4))^(1/2)
QP2_GAMMA = 1.0                 # every other Cauchy environment
FIG1_PULSE_INTERVAL = 0.5
FIG1_CUTOFF = 2.0
FIG1_CUTOFF_GRID_POINTS = 2 ** 16  # grid on [-2 cutoff, 2 cutoff) for the cut-off state
FIG1_T_MAX = 5.0
QP_ROTATION_ANGLE = 0.39269908169872414  # pi/8

# Spin-boson (single mode, truncated)
SPIN_BOSON_OMEGA_C = 1.0
SPIN_BOSON_OMEGA_A = 1.0
SPIN_BOSON_COUPLING = 0.2
SPIN_BOSON_FOCK_DIM = 64

# ===========================================
# Friedrichs-Lee
# ===========================================
FL_TOTAL_TIME = 6.0
FL_CELLS_PER_WINDOW = 8  # resolution of the narrowest comb window

# ===========================================
# Probe States
# ===========================================
DEFAULT_SEED = 20160321
PROBE_STATE_COUNT = 16
