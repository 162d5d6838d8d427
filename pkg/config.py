"""
TOBL Correlation Toolkit - Configuration Module
Handles solver settings, enumeration guards, cache and logging configuration
"""

import os
from dotenv import load_dotenv

# Load environment variables
load_dotenv()


def _env_bool(name: str, default: bool) -> bool:
    value = os.getenv(name)
    if value is None:
        return default
    return value.strip().lower() in ('1', 'true', 'yes', 'on')


# Enumeration guard: local LPs refuse scenarios with more deterministic points
ENUM_CAP = int(os.getenv('TOBL_ENUM_CAP', str(10 ** 6)))

# Pivot rules ('bland' or 'dantzig')
PIVOT_RULE = os.getenv('TOBL_PIVOT_RULE', 'bland')
MEMBERSHIP_PIVOT_RULE = os.getenv('TOBL_MEMBERSHIP_PIVOT_RULE', 'dantzig')

# Dantzig pricing falls back to Bland's rule after this many degenerate pivots
DEGENERATE_STREAK = int(os.getenv('TOBL_DEGENERATE_STREAK', '50'))

# Process pool size for the independent bipartition programs of is_tobl
SOLVER_WORKERS = int(os.getenv('TOBL_WORKERS', '1'))

# Cache Configuration
CACHE_DIR = os.getenv('TOBL_CACHE_DIR', 'cache')
CACHE_TTL_HOURS = int(os.getenv('TOBL_CACHE_TTL_HOURS', '720'))
ENABLE_CACHE = _env_bool('TOBL_ENABLE_CACHE', True)

# Output Configuration
OUTPUT_DIR = os.getenv('TOBL_OUTPUT_DIR', 'outputs')
TABLE_FORMATS = ['csv', 'xlsx']

# Logging Configuration
LOG_LEVEL = os.getenv('TOBL_LOG_LEVEL', 'INFO')
LOG_FILE = os.getenv('TOBL_LOG_FILE', '')

# Randomized campaign sizes (test suite)
PROPERTY_CASES = int(os.getenv('TOBL_PROPERTY_CASES', '200'))
WIRING_CASES = int(os.getenv('TOBL_WIRING_CASES', '100'))
LP_ORACLE_CASES = int(os.getenv('TOBL_LP_ORACLE_CASES', '500'))
RANDOM_SEED = int(os.getenv('TOBL_RANDOM_SEED', '20120'))
