"""
Posynomial evaluation (direct and in log space), degree of difficulty,
dual program construction, dual objective and primal recovery from the
primal-dual relations.
"""

import logging
from typing import Tuple

import numpy as np
from scipy import linalg, special

from urgp.errors import DegenerateRecoveryError, DomainError
from urgp.models.posynomial import DualProblem, DualSolution, GPProblem, Posynomial

logger = logging.getLogger(__name__)


def positive_vector(x) -> np.ndarray:
    x = np.asarray(x, dtype=float).reshape(-1)
    if not np.all(np.isfinite(x)) or np.any(x <= 0):
        raise DomainError(f"Decision variables must be finite and positive, got {x}")
    return x


def eval_posynomial(p: Posynomial, x) -> float:
    """Sum over terms of coeff * prod_j x_j ** a_ij."""
    x = positive_vector(x)
    if x.size != p.var_count:
        raise DomainError(f"Expected {p.var_count} variables, got {x.size}")
    return float(np.sum(p.coeffs * np.exp(p.exponent_matrix @ np.log(x))))


def eval_log_space(p: Posynomial, y) -> Tuple[float, np.ndarray]:
    """
    Value and gradient of log p(exp(y)). The value is a log-sum-exp of
    log coeff_i + a_i . y and is convex in y; the gradient is the softmax
    weighted average of the exponent rows.
    """
    z = p.log_coeffs + p.exponent_matrix @ np.asarray(y, dtype=float)
    value = float(special.logsumexp(z))
    weights = special.softmax(z)
    return value, weights @ p.exponent_matrix


def log_space_hessian(p: Posynomial, y) -> np.ndarray:
    z = p.log_coeffs + p.exponent_matrix @ np.asarray(y, dtype=float)
    weights = special.softmax(z)
    A = p.exponent_matrix
    mean = weights @ A
    centered = A - mean
    return centered.T @ (weights[:, None] * centered)


def constraint_values(gp: GPProblem, x) -> np.ndarray:
    return np.array([eval_posynomial(c, x) for c in gp.constraints])


def degree_of_difficulty(gp: GPProblem) -> int:
    """Total term count minus variable count minus one."""
    return gp.term_count - gp.var_count - 1


def build_dual(gp: GPProblem) -> DualProblem:
    """Dual data with objective terms first, then constraint groups in declaration order."""
    coeffs = np.concatenate([group.coeffs for group in gp.groups])
    exponents = np.vstack([group.exponent_matrix for group in gp.groups])
    group_of_term = np.concatenate([
        np.full(len(group), k, dtype=int) for k, group in enumerate(gp.groups)
    ])
    logger.debug(
        "Dual built: %s dual variables, 1 normality + %s orthogonality equalities",
        coeffs.size, gp.var_count
    )
    return DualProblem(term_coeffs=coeffs, exponent_matrix=exponents, group_of_term=group_of_term)


def dual_objective(dp: DualProblem, delta) -> float:
    """
    log V(delta) = sum_i delta_i (log beta_i - log delta_i)
                   + sum_{k >= 1} lambda_k log lambda_k,  with 0 log 0 = 0.
    """
    delta = np.asarray(delta, dtype=float).reshape(-1)
    if delta.size != dp.term_count:
        raise DomainError(f"Expected {dp.term_count} dual variables, got {delta.size}")
    if np.any(delta < 0) or not np.all(np.isfinite(delta)):
        raise DomainError("Dual variables must be finite and nonnegative")
    lam = dp.group_sums(delta)
    value = np.sum(delta * np.log(dp.term_coeffs)) - np.sum(special.xlogy(delta, delta))
    value += np.sum(special.xlogy(lam[1:], lam[1:]))
    return float(value)


def dual_residuals(dp: DualProblem, delta) -> Tuple[float, float]:
    """(|normality - 1|, max |orthogonality|) at delta."""
    delta = np.asarray(delta, dtype=float)
    normality = abs(float(np.sum(delta[dp.group_of_term == 0])) - 1.0)
    orthogonality = float(np.max(np.abs(dp.exponent_matrix.T @ delta), initial=0.0))
    return normality, orthogonality


def recover_primal(gp: GPProblem, ds: DualSolution, drop_threshold: float = 1e-8) -> np.ndarray:
    """
    Solve the primal-dual relations in ln x by least squares over the rows
    whose dual weight exceeds drop_threshold:

        a_i . ln x = ln(delta_i f0 / beta_i)                 objective terms
        a_i . ln x = ln(delta_i / (lambda_k beta_i))         constraint k terms

    with f0 = exp(dual objective).
    """
    dp = build_dual(gp)
    delta = np.asarray(ds.delta, dtype=float)
    lam = dp.group_sums(delta)
    keep = delta > drop_threshold

    groups = dp.group_of_term[keep]
    log_delta = np.log(delta[keep])
    log_beta = np.log(dp.term_coeffs[keep])
    rhs = np.where(
        groups == 0,
        log_delta + ds.dual_objective - log_beta,
        log_delta - np.log(np.where(groups == 0, 1.0, lam[groups])) - log_beta
    )
    matrix = dp.exponent_matrix[keep]

    solution, _, rank, _ = linalg.lstsq(matrix, rhs) if matrix.size else (None, None, 0, None)
    if rank < gp.var_count:
        residual = float(np.linalg.norm(matrix @ solution - rhs)) if solution is not None else float('inf')
        raise DegenerateRecoveryError(rank, gp.var_count, residual)

    residual = float(np.linalg.norm(matrix @ solution - rhs))
    logger.debug("Primal recovered from %s of %s dual rows, residual %.3e",
                 int(keep.sum()), delta.size, residual)
    return np.exp(solution)
