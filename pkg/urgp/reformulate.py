"""
Uncertain random GP -> stochastic GP -> deterministic equivalent of the
row-wise chance constraints -> lifted posynomial GP.
"""

import logging
import math

import numpy as np

from urgp import gp_core, urv_core
from urgp.errors import DomainError
from urgp.models.posynomial import GPProblem, Monomial, Posynomial
from urgp.models.program import (
    AuxBinding, ChanceRow, DeterministicProgram, LiftedGP, NormalTerm,
    StochasticGP, URGPProblem
)
from urgp.models.uncertain import Criterion
from urgp.utils import validators

logger = logging.getLogger(__name__)


def validate_epsilon(epsilon: float) -> float:
    is_valid, error = validators.validate_epsilon(epsilon)
    if not is_valid:
        raise DomainError(error)
    return float(epsilon)


def to_stochastic(p: URGPProblem, c: Criterion) -> StochasticGP:
    """Replace every coefficient by its criterion transform; exponents unchanged."""
    def convert(terms):
        return tuple(NormalTerm(urv_core.transform(term.coeff, c), term.exponents) for term in terms)

    return StochasticGP(
        objective_terms=convert(p.objective_terms),
        constraint_groups=tuple(convert(group) for group in p.constraint_groups),
        var_names=p.var_names
    )


def _chance_row(terms) -> ChanceRow:
    means = [term.coeff.mu for term in terms]
    if any(mu <= 0 for mu in means):
        raise DomainError(
            f"Transformed coefficient means must be positive for a posynomial program, got {means}"
        )
    exponents = np.vstack([term.exponents for term in terms])
    return ChanceRow(
        mean_part=Posynomial.from_arrays(means, exponents),
        var_part=Posynomial.from_arrays([term.coeff.sigma ** 2 for term in terms], 2.0 * exponents)
    )


def to_deterministic(s: StochasticGP, epsilon: float) -> DeterministicProgram:
    """
    Each row  Pr(sum xi_l U_l <= 1) >= 1 - epsilon  becomes
    sum mu_l U_l + Phi^-1(1 - epsilon) sqrt(sum sigma_l^2 U_l^2) <= 1.
    The objective row uses the same form through its epigraph bound.
    """
    epsilon = validate_epsilon(epsilon)
    quantile = urv_core.normal_quantile(1.0 - epsilon)
    # Phi^-1(0.5) is zero only up to rounding
    if epsilon == 0.5:
        quantile = 0.0
    return DeterministicProgram(
        rows=tuple(_chance_row(terms) for terms in s.rows),
        quantile=quantile,
        epsilon=epsilon,
        var_names=s.var_names
    )


def row_lhs(d: DeterministicProgram, k: int, x) -> float:
    """mean_part(x) + quantile * sqrt(var_part(x)) of row k (row 0 is the objective)."""
    row = d.rows[k]
    x = np.asarray(x, dtype=float)[:d.var_count]
    value = gp_core.eval_posynomial(row.mean_part, x)
    if d.quantile > 0:
        value += d.quantile * math.sqrt(gp_core.eval_posynomial(row.var_part, x))
    return value


def deterministic_objective(d: DeterministicProgram, x) -> float:
    return row_lhs(d, 0, x)


def lift(d: DeterministicProgram) -> LiftedGP:
    """
    Replace each sqrt(var_part) by quantile * t^(1/2) with a new variable t
    and add the constraint var_part * t^-1 <= 1. Auxiliaries t_0 (objective)
    and t_k (constraint k) are appended after the original variables.
    With quantile 0 the mean-only program is returned without auxiliaries.
    """
    n = d.var_count
    if d.quantile == 0:
        logger.info("[OK] Zero quantile: lifting to the mean-only program")
        gp = GPProblem(
            objective=d.objective.mean_part,
            constraints=tuple(row.mean_part for row in d.constraints),
            var_names=d.var_names
        )
        return LiftedGP(gp=gp, aux_map=(), original_var_count=n)

    total = n + len(d.rows)
    bindings = []
    lifted_rows = []
    aux_constraints = []
    for k, row in enumerate(d.rows):
        index = n + k
        sqrt_term = Monomial(d.quantile, np.eye(1, total, index).ravel() * 0.5)
        lifted_rows.append(Posynomial(row.mean_part.padded(total).terms + (sqrt_term,)))
        aux_constraints.append(row.var_part.padded(total, {index: -1.0}))
        bindings.append(AuxBinding(var_index=index, row=k, name=f"t_{k}", var_part=row.var_part))

    gp = GPProblem(
        objective=lifted_rows[0],
        constraints=tuple(lifted_rows[1:]) + tuple(aux_constraints),
        var_names=d.var_names + tuple(b.name for b in bindings)
    )
    logger.debug("Lifted program: %s variables, %s constraints, %s terms",
                 gp.var_count, len(gp.constraints), gp.term_count)
    return LiftedGP(gp=gp, aux_map=tuple(bindings), original_var_count=n)


def initial_point(lifted: LiftedGP, x=None) -> np.ndarray:
    """
    Log-variables for a solver start: originals from x (default all ones)
    and each auxiliary at twice its defining expression, which leaves every
    auxiliary constraint at 1/2.
    """
    n = lifted.original_var_count
    x = np.ones(n) if x is None else np.asarray(x, dtype=float)[:n]
    y = np.zeros(lifted.gp.var_count)
    y[:n] = np.log(x)
    for binding in lifted.aux_map:
        y[binding.var_index] = math.log(2.0 * gp_core.eval_posynomial(binding.var_part, x))
    return y


def tighten(lifted: LiftedGP, x) -> np.ndarray:
    """Set every auxiliary exactly to its defining expression at the original variables."""
    x = np.array(x, dtype=float)
    n = lifted.original_var_count
    for binding in lifted.aux_map:
        x[binding.var_index] = gp_core.eval_posynomial(binding.var_part, x[:n])
    return x
