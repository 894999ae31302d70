"""
Configuration and constants for peekac.
"""

# Size caps
MAX_POWER_UNIVERSE = 12
MAX_POWER_ELEMENTS = 4096
ORBIT_CAP = 8
MEDIAN_ORDER_CAP = 10

# Search budgets
HOM_SEARCH_BUDGET = 10 ** 8
ENUM_BUDGET = 200000
SET_ORACLE_MAX_VARS = 3
SET_ORACLE_BUDGET = 10 ** 7

# Bounded characterization checks
DEFAULT_NMAX = 3
DEFAULT_ENUM_VARS = 3
DEFAULT_ENUM_TUPLES = 3
SHRINK_ROUNDS = 4

RESERVED_UNARY = "U"

# Built-in relation symbols
EDGE = "E"
TWO_SAT_SYMBOLS = ["R00", "R01", "R10", "R11"]
POINT_LE = "le"
POINT_NE = "ne"
POINT_LT = "lt"
PARITY_SYMBOLS = ["R", "Z", "O"]

BUILTIN_TEMPLATES = ["k2", "2sat", "pointalg", "parity", "setcon", "cycle:<bits>"]

# CLI exit codes
EXIT_ACCEPT = 0
EXIT_REJECT = 1
EXIT_ERROR = 2
EXIT_UNKNOWN = 3

METHODS = ["ac", "pac", "brute"]
FORMATS = ["text", "lines"]
GEN_KINDS = ["graph", "2cnf", "pointalg", "setcon"]

# Generator defaults
DEFAULT_EDGE_PROB = 0.1
DEFAULT_LE_DENSITY = 1.5
DEFAULT_NE_DENSITY = 0.5
DEFAULT_SETCON_DENSITY = 1.0

# Benchmark defaults
DEFAULT_BENCH_SIZES = "100,200,400"
DEFAULT_BENCH_WORKERS = "1,4"
DEFAULT_BENCH_TIMEOUT = 60.0

LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"
