# Rules and constants for the duality defect verifier

import os

TOOL_VERSION = '0.1.0'

# Bumped whenever a certificate field is added, removed or renamed
SCHEMA_VERSION = '1'

# Input domain of the search
CASE_CONSTRAINTS = {
    'min_codim': 3,
    'min_ambient': 10,
}

# Enumeration defaults
SEARCH_SETTINGS = {
    'bound_variant': 'chained',  # 'plain' replicates the printed algorithm literally
    'huh_filter': False,
    'evidence': False,
}

# Worker pool settings
PARALLEL_SETTINGS = {
    'threads': 1,
    'ranges_per_worker': 8,  # oversplit c2 so heavy high-c2 ranges don't serialize the tail
    'heartbeat_seconds': 30.0,
}

# Double-zero classification settings
CLASSIFY_SETTINGS = {
    'horizon': 60,
    'min_horizon': 10,
    'horizon_cap': 10000,
}

# Output settings
OUTPUT_SETTINGS = {
    'out_dir': 'certificates',
    'format': 'json',
    'summary_file': 'summary.csv',
    'summary_columns': ['N', 'm', 'resolution', 'verdict', 'candidates', 'enumerated', 'seconds'],
}

EXIT_CODES = {
    'ok': 0,
    'candidates': 1,
    'usage': 2,
    'anomaly': 3,
    'aborted': 4,
}

# Environment overrides (optional, may come from .env.local)
ENV_OVERRIDES = {
    'threads': 'DEFECT_VERIFIER_THREADS',
    'out_dir': 'DEFECT_VERIFIER_OUT',
}

# Default configuration
DEFAULT_CONFIG = {
    'threads': PARALLEL_SETTINGS['threads'],
    'out_dir': OUTPUT_SETTINGS['out_dir'],
    'env_file': None,  # Will look for .env.local in the working directory if not specified
}


def get_setting(name):
    """Get a configuration value, preferring its environment override."""
    if name not in DEFAULT_CONFIG:
        raise KeyError(f"Unknown setting: {name}. Known: {list(DEFAULT_CONFIG.keys())}")

    env_name = ENV_OVERRIDES.get(name)
    raw = os.getenv(env_name) if env_name else None
    if raw is None or raw.strip() == '':
        return DEFAULT_CONFIG[name]

    if isinstance(DEFAULT_CONFIG[name], int):
        try:
            value = int(raw)
        except ValueError:
            raise ValueError(f"{env_name} must be an integer, got {raw!r}")
        if value < 1:
            raise ValueError(f"{env_name} must be at least 1, got {value}")
        return value
    return raw
