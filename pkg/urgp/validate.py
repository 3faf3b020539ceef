"""
Monte Carlo oracles for the criterion transforms and for chance
constraint satisfaction at a given point.

Sampling is reproducible: the work is cut into fixed-size chunks, each
chunk draws from its own counter-based Philox stream spawned from the
seed, and chunk results are aggregated in chunk order. The result does
not depend on the number of workers.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional

import numpy as np
from scipy import special, stats

from urgp import gp_core, reformulate, urv_core
from urgp.models.program import StochasticGP
from urgp.models.results import EndpointPolicy, MCConfig, MCReport
from urgp.models.uncertain import Criterion, LinearNormalURV

logger = logging.getLogger(__name__)

# Uniform draws are clipped away from 0 so the inverse CDF stays finite
_UNIFORM_FLOOR = np.finfo(float).tiny
_MAX_RESAMPLE_ROUNDS = 10_000


def _chunk_sizes(samples: int, chunk_size: int) -> List[int]:
    full, rest = divmod(samples, chunk_size)
    return [chunk_size] * full + ([rest] if rest else [])


def _generators(seed_sequence: np.random.SeedSequence, count: int):
    return [np.random.Generator(np.random.Philox(child)) for child in seed_sequence.spawn(count)]


def _standard_normals(generator: np.random.Generator, shape) -> np.ndarray:
    """Inverse-CDF normals from the generator's uniforms."""
    uniforms = np.clip(generator.random(shape), _UNIFORM_FLOOR, 1.0 - 1e-16)
    return special.ndtri(uniforms)


def _map_chunks(fn, jobs, workers: Optional[int]):
    if workers == 1 or len(jobs) == 1:
        return [fn(job) for job in jobs]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(fn, jobs))


def _row_bounds(s: StochasticGP, x: np.ndarray, epsilon: float) -> List[float]:
    """Objective row is checked against its deterministic value; constraints against 1."""
    deterministic = reformulate.to_deterministic(s, epsilon)
    return [reformulate.deterministic_objective(deterministic, x)] + [1.0] * len(s.constraint_groups)


def check_chance(s: StochasticGP, x, epsilon: float, cfg: Optional[MCConfig] = None) -> List[MCReport]:
    """
    Estimate Pr(sum_i xi_i m_i(x) <= bound) for every row, xi_i the normal
    coefficients and m_i the monomials at x. Row 0 is the objective row.
    """
    cfg = cfg or MCConfig()
    x = gp_core.positive_vector(np.asarray(x, dtype=float)[:s.var_count])
    bounds = _row_bounds(s, x, epsilon)
    row_sequences = np.random.SeedSequence(cfg.seed).spawn(len(s.rows))
    sizes = _chunk_sizes(cfg.samples, cfg.chunk_size)

    reports = []
    for k, (terms, bound, sequence) in enumerate(zip(s.rows, bounds, row_sequences)):
        mu = np.array([term.coeff.mu for term in terms])
        sigma = np.array([term.coeff.sigma for term in terms])
        monomials = np.exp(np.vstack([term.exponents for term in terms]) @ np.log(x))

        def count_chunk(job, mu=mu, sigma=sigma, monomials=monomials, bound=bound):
            generator, size = job
            coefficients = mu + sigma * _standard_normals(generator, (size, mu.size))
            return int(np.count_nonzero(coefficients @ monomials <= bound))

        jobs = list(zip(_generators(sequence, len(sizes)), sizes))
        hits = sum(_map_chunks(count_chunk, jobs, cfg.workers))
        report = MCReport.from_count(hits, cfg.samples, cfg.seed, row=k, bound=bound)
        logger.debug("Chance row %s: estimate %.6f +- %.6f (bound %.6g)",
                     k, report.estimate, report.stderr, bound)
        reports.append(report)
    return reports


def _sample_endpoints(generator, size, xi: LinearNormalURV, policy: EndpointPolicy):
    z = _standard_normals(generator, (size, 2))
    a = xi.A.mu + xi.A.sigma * z[:, 0]
    b = xi.B.mu + xi.B.sigma * z[:, 1]
    if policy is EndpointPolicy.RESAMPLE_UNTIL_ORDERED:
        for _ in range(_MAX_RESAMPLE_ROUNDS):
            unordered = a >= b
            count = int(np.count_nonzero(unordered))
            if count == 0:
                break
            z = _standard_normals(generator, (count, 2))
            a[unordered] = xi.A.mu + xi.A.sigma * z[:, 0]
            b[unordered] = xi.B.mu + xi.B.sigma * z[:, 1]
        else:
            raise RuntimeError("Endpoint resampling did not produce ordered pairs")
    return a, b


def sample_critical_values(xi: LinearNormalURV, c: Criterion,
                           cfg: Optional[MCConfig] = None) -> np.ndarray:
    """Critical value of L(a, b) for every sampled endpoint pair (a, b)."""
    cfg = cfg or MCConfig()
    if cfg.endpoint_policy is EndpointPolicy.RESAMPLE_UNTIL_ORDERED:
        logger.warning(
            "[WARN] Resampling until a < b conditions the endpoints; the sample no longer "
            "follows the closed-form transformed distribution"
        )
    w_a, w_b = urv_core.critical_weights(c)
    sizes = _chunk_sizes(cfg.samples, cfg.chunk_size)

    def chunk(job):
        generator, size = job
        a, b = _sample_endpoints(generator, size, xi, cfg.endpoint_policy)
        return w_a * a + w_b * b

    jobs = list(zip(_generators(np.random.SeedSequence(cfg.seed), len(sizes)), sizes))
    return np.concatenate(_map_chunks(chunk, jobs, cfg.workers))


def check_transform_distribution(xi: LinearNormalURV, c: Criterion,
                                 cfg: Optional[MCConfig] = None) -> float:
    """Kolmogorov-Smirnov statistic of sampled critical values against the transformed CDF."""
    cfg = cfg or MCConfig()
    sample = sample_critical_values(xi, c, cfg)
    statistic = stats.kstest(sample, lambda v: urv_core.transformed_cdf(xi, c, v)).statistic
    threshold = ks_threshold(sample.size)
    logger.info(f"[OK] KS statistic for {c.label()}: {statistic:.5f} (1% threshold {threshold:.5f})")
    return float(statistic)


def ks_threshold(samples: int) -> float:
    """Asymptotic 1% critical value of the one-sample KS statistic."""
    return 1.63 / math.sqrt(samples)
