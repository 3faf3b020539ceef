import logging
import os
from dataclasses import dataclass

from config import config
from urgp.errors import ConfigurationError, DomainError
from urgp.models.results import MCConfig, SolveConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AppContext:
    """Resolved configuration shared by every CLI command."""
    config_name: str
    solve: SolveConfig
    mc: MCConfig
    threads: int
    log_level: str


def _resolve_threads(value):
    if value is None:
        return os.cpu_count() or 1
    if value < 1:
        raise ConfigurationError(f"URGP_THREADS must be at least 1, got {value}")
    return value


def create_app(config_name=None):
    """Application factory pattern"""
    config_name = config_name or os.environ.get('URGP_CONFIG') or 'default'
    if config_name not in config:
        raise ConfigurationError(
            f"Unknown configuration '{config_name}'. Available: {', '.join(sorted(config))}"
        )
    settings = config[config_name]

    threads = _resolve_threads(settings.THREADS)
    try:
        solve = SolveConfig(
            kkt_tol=settings.KKT_TOL,
            max_iter=settings.MAX_ITER,
            barrier_mu_init=settings.BARRIER_MU_INIT,
            barrier_shrink=settings.BARRIER_SHRINK,
            dual_enabled=settings.DUAL_ENABLED,
            drop_threshold=settings.DROP_THRESHOLD
        )
        mc = MCConfig(
            samples=settings.MC_SAMPLES,
            seed=settings.MC_SEED,
            endpoint_policy=settings.ENDPOINT_POLICY,
            chunk_size=settings.MC_CHUNK_SIZE,
            workers=threads
        )
    except DomainError as e:
        logger.error(f"[ERROR] Invalid configuration '{config_name}': {e}")
        raise ConfigurationError(str(e)) from e

    logger.info(f"[OK] Configuration '{config_name}' loaded ({threads} worker threads)")
    return AppContext(
        config_name=config_name,
        solve=solve,
        mc=mc,
        threads=threads,
        log_level=settings.LOG_LEVEL
    )
