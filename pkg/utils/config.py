"""
Configuration Module
Application constants and numerical defaults.
"""

# Application information
APP_NAME = "Haar Projection Lab"
APP_VERSION = "1.0.0"

# Grid settings
DEFAULT_J_MAX = 14
MIN_J_MAX = 1
MAX_J_MAX = 24
DEFAULT_WINDOW = (-1, 2)
MAX_GRID_POINTS = 2 ** 27

# Filter settings
FILTER_HEADROOM = 4             # k_max = j_max - FILTER_HEADROOM for r = 1/2
MIN_KERNEL_CELLS = 16           # finest kernel spans at least this many cells
MIN_BASE_KERNEL_CELLS = 64      # 2 * support_radius resolvable at k = 0
STANDARD_SUPPORT_RADII = (0.5, 2.0 ** -4)
MAX_MOMENT_CONDITION = 1e12

# Atom settings
ATOM_SUPPORT_RADIUS = 2.0 ** -5
DEFAULT_ATOM_M0 = 2
DEFAULT_ATOM_CELLS = 8

# Tolerances
EXACT_TOL = 1e-12
MOMENT_TOL = 1e-14
ORACLE_TOL = 1e-6

# Experiment defaults
DEFAULT_EXPERIMENT_J_MAX = 16
DEFAULT_M1 = 3
DEFAULT_BANK_SUPPORT = 2.0 ** -4
DEFAULT_N_RANGE = (3, 8)
DEFAULT_SAMPLES = 32
DEFAULT_SEED = 20240101
DEFAULT_SLOPE_TOL = 0.1
DEFAULT_R2_MIN = 0.9
CANDIDATE_FAMILIES = ('section5', 'section6', 'smooth_atom', 'random_bandlimited')
SET_BUILDERS = ('full_range', 'separated', 'custom')
ALPHA_PROFILES = ('top', 'equal')
FIT_AXES = ('N', 'log2N')

# Parallelism
THREADS_ENV_VAR = 'HPL_THREADS'

# Export settings
GROWTH_CSV_COLUMNS = ['N', 'lambda', 'set_desc', 'z_bar', 'z_under',
                      'gamma_hat', 'family', 'seed']
SUMMARY_CSV_COLUMNS = ['slope', 'intercept', 'r2', 'predicted', 'verdict']
CALIBRATION_CSV_COLUMNS = ['kernel', 'm1', 'support_radius', 'c0',
                           'J_lo', 'J_hi', 'max_moment_residual']
CONTRAST_CSV_COLUMNS = ['N', 'gamma_full', 'gamma_sep', 'ratio']
CONTRAST_SUMMARY_COLUMNS = ['ratio_of_ratios', 'expected', 'increasing', 'sep_slope',
                            'sep_r2', 'verdict']
CONFIG_BLOCK_MARKER = '# [config]'
