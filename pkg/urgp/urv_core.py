"""
Normal and linear distribution functions, critical values, and the
criterion transforms collapsing a linear-normal uncertain random variable
into a normal random variable.

All functions are pure; array inputs for x are evaluated elementwise.
"""

import math
from typing import List, Sequence, Tuple

import numpy as np
from scipy import special

from urgp.errors import DomainError
from urgp.models.uncertain import (
    Criterion, CriterionKind, LinearNormalURV, LinearUncertain, NormalRV
)

STANDARD_NORMAL = NormalRV(0.0, 1.0)


def _scalar_or_array(value):
    return float(value) if np.ndim(value) == 0 else value


def normal_cdf(x, rv: NormalRV = STANDARD_NORMAL):
    """Phi((x - mu) / sigma) = (1/2)[1 + erf((x - mu) / (sigma sqrt 2))]."""
    z = (np.asarray(x, dtype=float) - rv.mu) / rv.sigma
    return _scalar_or_array(special.ndtr(z))


def normal_pdf(x, rv: NormalRV = STANDARD_NORMAL):
    z = (np.asarray(x, dtype=float) - rv.mu) / rv.sigma
    return _scalar_or_array(np.exp(-0.5 * z * z) / (rv.sigma * math.sqrt(2.0 * math.pi)))


def normal_quantile(p: float) -> float:
    """Inverse of the standard normal distribution function, sqrt(2) erfinv(2p - 1)."""
    if not (0.0 < p < 1.0):
        raise DomainError(f"Quantile needs p strictly inside (0, 1), got {p}")
    return float(special.ndtri(p))


def linear_cdf(x, u: LinearUncertain):
    ramp = (np.asarray(x, dtype=float) - u.a) / (u.b - u.a)
    return _scalar_or_array(np.clip(ramp, 0.0, 1.0))


def critical_weights(c: Criterion) -> Tuple[float, float]:
    """Affine weights (w_a, w_b) with critical value w_a * a + w_b * b."""
    if c.kind is CriterionKind.OPTIMISTIC:
        return c.alpha, 1.0 - c.alpha
    if c.kind is CriterionKind.PESSIMISTIC:
        return 1.0 - c.alpha, c.alpha
    return 0.5, 0.5


def critical_value(u: LinearUncertain, c: Criterion) -> float:
    """
    Optimistic value sup{r : M(xi >= r) >= alpha}, pessimistic value
    inf{r : M(xi <= r) >= alpha}, or expected value of L(a, b).
    """
    w_a, w_b = critical_weights(c)
    return w_a * u.a + w_b * u.b


def transform(xi: LinearNormalURV, c: Criterion) -> NormalRV:
    """Distribution of the critical value of xi when its endpoints are random."""
    w_a, w_b = critical_weights(c)
    mu = w_a * xi.A.mu + w_b * xi.B.mu
    sigma = math.hypot(w_a * xi.A.sigma, w_b * xi.B.sigma)
    return NormalRV(mu, sigma)


def transformed_cdf(xi: LinearNormalURV, c: Criterion, x):
    return normal_cdf(x, transform(xi, c))


def transformed_pdf(xi: LinearNormalURV, c: Criterion, x):
    return normal_pdf(x, transform(xi, c))


def distribution_curve(xi: LinearNormalURV, kind, alphas: Sequence[float],
                       xs: Sequence[float]) -> List[Tuple[float, float, float, float]]:
    """
    Rows (alpha, x, cdf, pdf) of the transformed distribution over an
    alpha grid and an x grid. The expected criterion ignores alpha and
    emits a single block with alpha reported as nan.
    """
    kind = CriterionKind(kind)
    xs = np.asarray(xs, dtype=float)
    if kind is CriterionKind.EXPECTED:
        criteria = [(math.nan, Criterion.expected())]
    else:
        criteria = [(alpha, Criterion(kind, alpha)) for alpha in alphas]

    rows = []
    for alpha, criterion in criteria:
        cdf = transformed_cdf(xi, criterion, xs)
        pdf = transformed_pdf(xi, criterion, xs)
        rows.extend(zip([alpha] * xs.size, xs.tolist(), np.atleast_1d(cdf).tolist(),
                        np.atleast_1d(pdf).tolist()))
    return rows
