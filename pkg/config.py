import os


def _env_float(name, default):
    value = os.environ.get(name)
    return float(value) if value not in (None, '') else default


def _env_int(name, default):
    value = os.environ.get(name)
    return int(value) if value not in (None, '') else default


class Config:
    # Barrier solver
    KKT_TOL = _env_float('URGP_KKT_TOL', 1e-8)
    MAX_ITER = _env_int('URGP_MAX_ITER', 200)
    BARRIER_MU_INIT = _env_float('URGP_BARRIER_MU_INIT', 1.0)
    BARRIER_SHRINK = _env_float('URGP_BARRIER_SHRINK', 0.2)
    DUAL_ENABLED = os.environ.get('URGP_DUAL_ENABLED', '1') not in ('0', 'false', 'no')

    # Rows of the primal-dual relations with smaller dual weight are dropped
    DROP_THRESHOLD = _env_float('URGP_DROP_THRESHOLD', 1e-8)

    # Monte Carlo validation
    MC_SAMPLES = _env_int('URGP_MC_SAMPLES', 10**6)
    MC_SEED = _env_int('URGP_MC_SEED', 20240607)
    MC_CHUNK_SIZE = 2**16
    ENDPOINT_POLICY = os.environ.get('URGP_ENDPOINT_POLICY') or 'as_is'

    # Worker cap for sweeps and sampling; None means hardware default
    THREADS = _env_int('URGP_THREADS', None)

    LOG_LEVEL = os.environ.get('URGP_LOG_LEVEL') or 'INFO'


class DevelopmentConfig(Config):
    LOG_LEVEL = os.environ.get('URGP_LOG_LEVEL') or 'DEBUG'


class QuickConfig(Config):
    """Smoke-run settings: fewer samples, looser tolerance."""
    KKT_TOL = _env_float('URGP_KKT_TOL', 1e-6)
    MC_SAMPLES = _env_int('URGP_MC_SAMPLES', 10**4)


config = {
    'development': DevelopmentConfig,
    'quick': QuickConfig,
    'default': Config
}
