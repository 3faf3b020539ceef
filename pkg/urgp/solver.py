"""
Solvers for the lifted posynomial program.

The primal path is a log-barrier method with Newton centering on
y = ln x, preceded by a feasibility phase. The dual path maximizes the
concave log dual objective over the normality/orthogonality affine set
and serves as an optimality certificate.
"""

import dataclasses
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional, Sequence

import numpy as np
from scipy import linalg, optimize, special

from urgp import gp_core, reformulate
from urgp.errors import DomainError, NegativeDegreeOfDifficulty, UrgpError
from urgp.models.posynomial import DualProblem, DualSolution, GPProblem
from urgp.models.program import URGPProblem
from urgp.models.results import (
    PipelineResult, PrimalSolution, SolveConfig, SolveStatus, SweepRow
)
from urgp.models.uncertain import Criterion, CriterionKind
from urgp.utils.validators import validate_alpha_grid

logger = logging.getLogger(__name__)

ARMIJO_C = 1e-4
BACKTRACK = 0.5
MAX_HALVINGS = 80
ACTIVE_TOL = 1e-6
# Newton decrement lambda^2 / 2 of a centered barrier stage
CENTERING_TOL = 1e-12
# Below this decrement a stalled line search is rounding, not a bad direction
ROUNDING_DECREMENT = 1e-9

# Smoothing levels of the feasibility phase soft-max
_FEASIBILITY_TAUS = (1.0, 0.1, 0.01, 1e-3, 1e-4)
_FEASIBILITY_MARGIN = -1e-3
# Largest move of any log-variable in one Newton step
_MAX_LOG_STEP = 10.0


def _newton_direction(hess: np.ndarray, grad: np.ndarray) -> np.ndarray:
    """Solve hess . d = -grad for a positive semidefinite hess with a tiny ridge."""
    n = grad.size
    ridge = 1e-12 * max(1.0, float(np.max(np.abs(np.diag(hess)), initial=0.0)))
    system = hess + ridge * np.eye(n)
    try:
        return linalg.solve(system, -grad, assume_a='pos')
    except (linalg.LinAlgError, ValueError):
        return -linalg.lstsq(system, grad)[0]


class _LogProgram:
    """Log-space view of a GP: F_0(y) = ln f_0(e^y), F_k(y) = ln f_k(e^y)."""

    def __init__(self, gp: GPProblem):
        self.objective = gp.objective
        self.constraints = gp.constraints
        self.n = gp.var_count
        self.m = len(gp.constraints)

    def objective_value(self, y) -> float:
        return gp_core.eval_log_space(self.objective, y)[0]

    def constraint_values(self, y) -> np.ndarray:
        return np.array([gp_core.eval_log_space(c, y)[0] for c in self.constraints])

    def constraint_derivatives(self, y):
        values = np.empty(self.m)
        grads = np.empty((self.m, self.n))
        hessians = []
        for k, constraint in enumerate(self.constraints):
            values[k], grads[k] = gp_core.eval_log_space(constraint, y)
            hessians.append(gp_core.log_space_hessian(constraint, y))
        return values, grads, hessians

    def barrier_value(self, y, mu: float) -> float:
        F = self.constraint_values(y)
        if np.any(F >= 0) or not np.all(np.isfinite(F)):
            return math.inf
        return self.objective_value(y) - mu * float(np.sum(np.log(-F)))

    def barrier_derivatives(self, y, mu: float):
        _, grad = gp_core.eval_log_space(self.objective, y)
        hess = gp_core.log_space_hessian(self.objective, y)
        if self.m:
            F, G, Hs = self.constraint_derivatives(y)
            weights = mu / -F
            grad = grad + weights @ G
            hess = hess + sum(w * H for w, H in zip(weights, Hs))
            hess = hess + (G.T * (weights / -F)) @ G
        return grad, hess

    def softmax_value(self, y, tau: float) -> float:
        return tau * float(special.logsumexp(self.constraint_values(y) / tau))

    def softmax_derivatives(self, y, tau: float):
        F, G, Hs = self.constraint_derivatives(y)
        p = special.softmax(F / tau)
        mean_grad = p @ G
        grad = mean_grad
        centered = G - mean_grad
        hess = sum(pk * H for pk, H in zip(p, Hs)) + (centered.T * p) @ centered / tau
        return grad, hess


def _damped_start(direction) -> float:
    largest = float(np.max(np.abs(direction), initial=0.0))
    return min(1.0, _MAX_LOG_STEP / largest) if largest > 0 else 1.0


def _backtrack(value_fn, y, direction, slope, start=1.0):
    """Armijo backtracking; returns the accepted step length or 0 when no decrease is found."""
    base = value_fn(y)
    step = start
    for _ in range(MAX_HALVINGS):
        trial = value_fn(y + step * direction)
        if trial <= base + ARMIJO_C * step * slope:
            return step
        step *= BACKTRACK
    return 0.0


def _feasibility_phase(prog: _LogProgram, y: np.ndarray, cfg: SolveConfig):
    """
    Drive max_k F_k(y) below zero by minimizing tau * logsumexp(F / tau)
    for decreasing tau. Returns (y, iterations, feasible).
    """
    iterations = 0
    if prog.m == 0 or prog.constraint_values(y).max() < 0:
        return y, iterations, True

    for tau in _FEASIBILITY_TAUS:
        for _ in range(cfg.max_iter):
            if prog.constraint_values(y).max() <= _FEASIBILITY_MARGIN:
                return y, iterations, True
            grad, hess = prog.softmax_derivatives(y, tau)
            direction = _newton_direction(hess, grad)
            slope = float(grad @ direction)
            if -slope / 2 <= 1e-16:
                break
            step = _backtrack(lambda v: prog.softmax_value(v, tau), y, direction, slope,
                              start=_damped_start(direction))
            if step == 0.0:
                break
            y = y + step * direction
            iterations += 1
        logger.debug("Feasibility phase tau=%g: max constraint log-value %.3e",
                     tau, prog.constraint_values(y).max())

    return y, iterations, bool(prog.constraint_values(y).max() < 0)


def _center(prog: _LogProgram, y: np.ndarray, mu: float, cfg: SolveConfig):
    """
    Newton centering on the barrier function, stopped on the Newton
    decrement lambda^2 / 2. Returns (y, decrement, iterations, converged).
    """
    barrier = lambda v: prog.barrier_value(v, mu)
    decrement = math.inf
    for iteration in range(cfg.max_iter + 1):
        grad, hess = prog.barrier_derivatives(y, mu)
        direction = _newton_direction(hess, grad)
        decrement = max(-float(grad @ direction) / 2, 0.0)
        if decrement <= CENTERING_TOL:
            return y, decrement, iteration, True
        if iteration == cfg.max_iter:
            break
        step = _backtrack(barrier, y, direction, -2 * decrement, start=_damped_start(direction))
        if step == 0.0:
            if decrement > ROUNDING_DECREMENT:
                logger.debug("Line search stalled at mu=%.3e with decrement %.3e", mu, decrement)
                return y, decrement, iteration, False
            # Predicted decrease below rounding of the barrier value: the
            # full Newton step is taken as long as it stays strictly feasible
            step = 1.0
            while step > 1e-8 and not math.isfinite(barrier(y + step * direction)):
                step *= BACKTRACK
        y = y + step * direction
    return y, decrement, cfg.max_iter, False


def solve_primal(gp: GPProblem, cfg: Optional[SolveConfig] = None, y0=None) -> PrimalSolution:
    """
    Log-barrier method on y = ln x:

        minimize F_0(y) - mu * sum_k ln(-F_k(y)),  mu <- mu * barrier_shrink.

    Each stage is centered until the Newton decrement lambda^2 / 2 is below
    CENTERING_TOL. The residual of a centered point is max(lambda^2 / 2, m * mu),
    m * mu bounding the suboptimality of ln f_0. OPTIMAL once a centered
    stage has m * mu <= kkt_tol; otherwise the best stage end is returned.
    """
    cfg = cfg or SolveConfig()
    prog = _LogProgram(gp)
    y = np.zeros(prog.n) if y0 is None else np.array(y0, dtype=float)

    y, iterations, feasible = _feasibility_phase(prog, y, cfg)
    if not feasible:
        logger.warning("[WARN] Feasibility phase failed: max constraint value %.6g",
                       math.exp(prog.constraint_values(y).max()))
        return PrimalSolution(
            x=np.exp(y), objective=math.exp(prog.objective_value(y)), kkt_residual=math.inf,
            iterations=iterations, status=SolveStatus.INFEASIBLE
        )

    mu = cfg.barrier_mu_init
    outer_cap = 10 + int(math.ceil(
        math.log(cfg.kkt_tol / (max(prog.m, 1) * mu)) / math.log(cfg.barrier_shrink)
    )) if max(prog.m, 1) * mu > cfg.kkt_tol else 10
    history = []
    status = SolveStatus.MAX_ITER
    best = None

    for outer in range(1, outer_cap + 1):
        y, decrement, its, converged = _center(prog, y, mu, cfg)
        iterations += its
        objective = math.exp(prog.objective_value(y))
        history.append(objective)
        multipliers = mu / -prog.constraint_values(y) if prog.m else np.zeros(0)
        residual = max(decrement, prog.m * mu)
        logger.debug("Barrier stage %s: mu=%.3e objective=%.10g residual=%.3e newton=%s",
                     outer, mu, objective, residual, its)
        if best is None or (residual, objective) < (best[1], best[2]):
            best = (y, residual, objective, multipliers)
        if not converged:
            break
        if prog.m * mu <= cfg.kkt_tol and residual <= cfg.kkt_tol:
            status = SolveStatus.OPTIMAL
            break
        mu *= cfg.barrier_shrink

    y, residual, objective, multipliers = best
    if status is not SolveStatus.OPTIMAL:
        logger.warning("[WARN] Barrier method stopped after %s Newton steps; best residual %.3e",
                       iterations, residual)
    return PrimalSolution(
        x=np.exp(y),
        objective=objective,
        kkt_residual=residual,
        iterations=iterations,
        status=status,
        history=tuple(history),
        multipliers=multipliers
    )


def _positive_dual_start(A: np.ndarray, b: np.ndarray):
    """
    Point of the dual affine set maximizing its smallest component
    (capped at 1). Returns (delta, margin) or (None, None) when the set
    has no nonnegative point.
    """
    N = A.shape[1]
    cost = np.zeros(N + 1)
    cost[-1] = -1.0
    A_ub = np.hstack([-np.eye(N), np.ones((N, 1))])
    A_eq = np.hstack([A, np.zeros((A.shape[0], 1))])
    bounds = [(0, None)] * N + [(None, 1.0)]
    result = optimize.linprog(cost, A_ub=A_ub, b_ub=np.zeros(N), A_eq=A_eq, b_eq=b,
                              bounds=bounds, method='highs')
    if result.status != 0:
        return None, None
    return np.maximum(result.x[:N], 0.0), float(result.x[-1])


def _dual_derivatives(dp: DualProblem, delta: np.ndarray):
    lam = dp.group_sums(delta)
    groups = dp.group_of_term
    grad = np.log(dp.term_coeffs) - np.log(delta)
    grad = grad + np.where(groups == 0, -1.0, np.log(np.where(groups == 0, 1.0, lam[groups])))
    hess = -np.diag(1.0 / delta)
    for k in range(1, dp.group_count):
        members = groups == k
        hess[np.ix_(members, members)] += 1.0 / lam[k]
    return grad, hess


def _dual_result(dp, delta, iterations, converged, message=''):
    normality, orthogonality = gp_core.dual_residuals(dp, delta)
    return DualSolution(
        delta=delta,
        dual_objective=gp_core.dual_objective(dp, delta),
        residual_normality=normality,
        residual_orthogonality=orthogonality,
        iterations=iterations,
        converged=converged,
        message=message
    )


def solve_dual(dp: DualProblem, cfg: Optional[SolveConfig] = None) -> DualSolution:
    """
    Maximize log V(delta) over delta >= 0 subject to the normality and
    orthogonality conditions by Newton's method in the null space of the
    equality system, with a fraction-to-boundary rule keeping delta > 0.
    """
    cfg = cfg or SolveConfig()
    degree = dp.degree_of_difficulty
    if degree < 0:
        raise NegativeDegreeOfDifficulty(degree)

    A, b = dp.equality_system()
    delta0, margin = _positive_dual_start(A, b)
    if delta0 is None:
        logger.warning("[WARN] Dual program has no nonnegative feasible point")
        return DualSolution(
            delta=np.zeros(dp.term_count), dual_objective=-math.inf,
            residual_normality=1.0, residual_orthogonality=math.inf,
            converged=False, message='dual infeasible'
        )

    Z = linalg.null_space(A)
    if Z.shape[1] == 0:
        return _dual_result(dp, delta0, 0, True)
    if margin <= 0:
        return _dual_result(dp, delta0, 0, False, 'no strictly positive dual point')

    w = np.zeros(Z.shape[1])
    delta = delta0
    objective = lambda v: -gp_core.dual_objective(dp, delta0 + Z @ v) \
        if np.all(delta0 + Z @ v > 0) else math.inf

    for iteration in range(cfg.max_iter):
        grad, hess = _dual_derivatives(dp, delta)
        grad_w = Z.T @ grad
        # Newton step on the convex function -log V
        direction = _newton_direction(-(Z.T @ hess @ Z), -grad_w)
        decrement = float(grad_w @ direction)
        if decrement / 2 <= 1e-15 or np.max(np.abs(grad_w)) <= 1e-12:
            return _dual_result(dp, delta, iteration, True)
        change = Z @ direction
        shrinking = change < 0
        start = 1.0
        if np.any(shrinking):
            start = min(1.0, 0.99 * float(np.min(-delta[shrinking] / change[shrinking])))
        step = _backtrack(objective, w, direction, -decrement, start=start)
        if step == 0.0:
            stalled = decrement / 2 > ROUNDING_DECREMENT
            return _dual_result(dp, delta, iteration, not stalled,
                                'line search stalled' if stalled else '')
        w = w + step * direction
        delta = delta0 + Z @ w

    return _dual_result(dp, delta, cfg.max_iter, False, 'iteration limit')


def certify(gp: GPProblem, primal: PrimalSolution, dual: DualSolution) -> float:
    """Relative duality gap |f_0 - V| / max(1, f_0)."""
    dual_value = math.exp(dual.dual_objective) if math.isfinite(dual.dual_objective) else 0.0
    return abs(primal.objective - dual_value) / max(1.0, primal.objective)


def active_constraints(gp: GPProblem, x) -> List[int]:
    """Indices of constraints with |f_k(x) - 1| <= ACTIVE_TOL."""
    values = gp_core.constraint_values(gp, x)
    return [k for k, value in enumerate(values) if abs(value - 1.0) <= ACTIVE_TOL]


def solve_uncertain(p: URGPProblem, c: Criterion, epsilon: float,
                    cfg: Optional[SolveConfig] = None) -> PipelineResult:
    """Reformulate, lift, solve the primal and, when enabled, certify with the dual."""
    cfg = cfg or SolveConfig()
    stochastic = reformulate.to_stochastic(p, c)
    deterministic = reformulate.to_deterministic(stochastic, epsilon)
    lifted = reformulate.lift(deterministic)

    primal = solve_primal(lifted.gp, cfg, y0=reformulate.initial_point(lifted))
    if primal.status is not SolveStatus.INFEASIBLE and lifted.aux_map:
        x = reformulate.tighten(lifted, primal.x)
        primal = dataclasses.replace(
            primal, x=x, objective=gp_core.eval_posynomial(lifted.gp.objective, x)
        )
    logger.info("[OK] %s eps=%g: status=%s objective=%.6g after %s Newton steps",
                c.label(), epsilon, primal.status.value, primal.objective, primal.iterations)

    dual = None
    gap = None
    if cfg.dual_enabled and primal.is_optimal:
        dp = gp_core.build_dual(lifted.gp)
        if dp.degree_of_difficulty >= 0:
            dual = solve_dual(dp, cfg)
            gap = certify(lifted.gp, primal, dual)
            logger.info("[OK] Dual certificate: gap=%.3e", gap)
        else:
            logger.warning("[WARN] Degree of difficulty %s < 0; dual certificate skipped",
                           dp.degree_of_difficulty)

    return PipelineResult(
        criterion=c, epsilon=epsilon, stochastic=stochastic, deterministic=deterministic,
        lifted=lifted, primal=primal, dual=dual, gap=gap
    )


def _sweep_point(job) -> SweepRow:
    problem, kind, alpha, epsilon, cfg = job
    try:
        result = solve_uncertain(problem, Criterion(kind, alpha), epsilon, cfg)
    except UrgpError as e:
        logger.error(f"[ERROR] Sweep point alpha={alpha}: {e}")
        return SweepRow(alpha=alpha, x=None, objective=None, status='error', error=str(e))
    return SweepRow(
        alpha=alpha,
        x=result.primal.x,
        objective=result.primal.objective,
        status=result.primal.status.value
    )


def sweep_alpha(p: URGPProblem, kind, epsilon: float, alpha_grid: Sequence[float],
                cfg: Optional[SolveConfig] = None, parallel: bool = False,
                workers: Optional[int] = None) -> List[SweepRow]:
    """One independent solve per grid point; rows come back in grid order."""
    is_valid, errors = validate_alpha_grid(alpha_grid)
    if not is_valid:
        raise DomainError('; '.join(errors))
    reformulate.validate_epsilon(epsilon)
    cfg = cfg or SolveConfig()
    kind = CriterionKind(kind)
    jobs = [(p, kind, float(alpha), epsilon, cfg) for alpha in alpha_grid]

    if parallel and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            rows = list(executor.map(_sweep_point, jobs))
    else:
        rows = [_sweep_point(job) for job in jobs]

    failed = sum(1 for row in rows if row.status != SolveStatus.OPTIMAL.value)
    logger.info(f"[OK] Sweep completed: {len(rows)} points, {failed} not optimal")
    return rows
