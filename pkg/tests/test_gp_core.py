import math

import numpy as np
import pytest

from urgp import gp_core
from urgp.errors import DegenerateRecoveryError, DomainError
from urgp.models import DualSolution, GPProblem, Monomial, Posynomial


@pytest.fixture
def mixed_posynomial():
    return Posynomial.from_arrays(
        [2.0, 0.5, 3.0],
        [[1.0, -2.0, 0.5], [0.0, 1.0, 1.0], [-1.0, 0.5, 0.0]]
    )


class TestEvaluation:

    def test_eval_posynomial(self):
        p = Posynomial.from_arrays([3.0, 2.0], [[1.0, 1.0], [2.0, -1.0]])
        assert gp_core.eval_posynomial(p, [2.0, 4.0]) == pytest.approx(3 * 8 + 2 * 4 / 4)

    @pytest.mark.parametrize('x', [[1.0, 0.0], [1.0, -2.0], [np.inf, 1.0]])
    def test_rejects_nonpositive_point(self, x):
        p = Posynomial.from_arrays([1.0], [[1.0, 1.0]])
        with pytest.raises(DomainError):
            gp_core.eval_posynomial(p, x)

    def test_rejects_nonpositive_coefficient(self):
        with pytest.raises(DomainError):
            Monomial(0.0, [1.0])

    def test_log_space_value_and_gradient(self, mixed_posynomial):
        rng = np.random.default_rng(3)
        y = rng.normal(size=3)
        value, grad = gp_core.eval_log_space(mixed_posynomial, y)
        assert value == pytest.approx(math.log(gp_core.eval_posynomial(mixed_posynomial, np.exp(y))),
                                      rel=1e-12)
        h = 1e-6
        numerical = [
            (gp_core.eval_log_space(mixed_posynomial, y + h * e)[0]
             - gp_core.eval_log_space(mixed_posynomial, y - h * e)[0]) / (2 * h)
            for e in np.eye(3)
        ]
        np.testing.assert_allclose(grad, numerical, atol=1e-7)

    def test_log_space_gradient_on_random_posynomials(self):
        rng = np.random.default_rng(29)
        h = 1e-6
        for _ in range(100):
            terms, var_count = int(rng.integers(1, 6)), int(rng.integers(1, 5))
            p = Posynomial.from_arrays(rng.lognormal(size=terms),
                                       rng.uniform(-2.0, 2.0, size=(terms, var_count)))
            y = rng.normal(size=var_count)
            _, grad = gp_core.eval_log_space(p, y)
            numerical = [
                (gp_core.eval_log_space(p, y + h * e)[0] - gp_core.eval_log_space(p, y - h * e)[0]) / (2 * h)
                for e in np.eye(var_count)
            ]
            np.testing.assert_allclose(grad, numerical, atol=1e-6)

    def test_log_space_hessian(self, mixed_posynomial):
        y = np.array([0.3, -0.2, 0.1])
        h = 1e-6
        numerical = np.array([
            (gp_core.eval_log_space(mixed_posynomial, y + h * e)[1]
             - gp_core.eval_log_space(mixed_posynomial, y - h * e)[1]) / (2 * h)
            for e in np.eye(3)
        ])
        hess = gp_core.log_space_hessian(mixed_posynomial, y)
        np.testing.assert_allclose(hess, numerical, atol=1e-6)
        assert np.all(np.linalg.eigvalsh(hess) >= -1e-12)

    def test_log_space_is_convex(self, mixed_posynomial):
        rng = np.random.default_rng(11)
        for _ in range(50):
            y1, y2 = rng.normal(scale=2.0, size=(2, 3))
            t = rng.uniform()
            mid = gp_core.eval_log_space(mixed_posynomial, t * y1 + (1 - t) * y2)[0]
            bound = t * gp_core.eval_log_space(mixed_posynomial, y1)[0] \
                + (1 - t) * gp_core.eval_log_space(mixed_posynomial, y2)[0]
            assert mid <= bound + 1e-12

    def test_log_space_survives_huge_exponents(self):
        p = Posynomial.from_arrays([1e4, 1.0], [[800.0], [-800.0]])
        value, grad = gp_core.eval_log_space(p, [1.0])
        assert math.isfinite(value)
        assert np.all(np.isfinite(grad))


class TestDual:

    def test_degree_of_difficulty(self, budget_gp, reciprocal_gp):
        assert gp_core.degree_of_difficulty(budget_gp) == 0
        assert gp_core.degree_of_difficulty(reciprocal_gp) == 0

    def test_build_dual_orders_objective_first(self, budget_gp):
        dp = gp_core.build_dual(budget_gp)
        assert dp.term_count == 3
        assert dp.group_of_term.tolist() == [0, 1, 1]
        A, b = dp.equality_system()
        assert A.shape == (3, 3)
        assert b.tolist() == [1.0, 0.0, 0.0]

    def test_dual_objective_at_optimum(self, budget_gp):
        dp = gp_core.build_dual(budget_gp)
        assert gp_core.dual_objective(dp, [1.0, 1.0, 1.0]) == pytest.approx(math.log(4.0))
        assert gp_core.dual_residuals(dp, [1.0, 1.0, 1.0]) == (0.0, 0.0)

    def test_dual_objective_treats_zero_weights(self, budget_gp):
        dp = gp_core.build_dual(budget_gp)
        assert math.isfinite(gp_core.dual_objective(dp, [1.0, 0.0, 0.0]))

    def test_dual_objective_rejects_negative_weights(self, budget_gp):
        dp = gp_core.build_dual(budget_gp)
        with pytest.raises(DomainError):
            gp_core.dual_objective(dp, [1.0, -0.5, 1.0])

    def test_dual_objective_is_concave(self):
        # minimize 1/(x y) s.t. x + y + x y <= 1; feasible weights (1, 1 - s, 1 - s, s)
        gp = GPProblem(
            objective=Posynomial.from_arrays([1.0], [[-1.0, -1.0]]),
            constraints=(Posynomial.from_arrays([0.5, 2.0, 1.5], [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]),)
        )
        dp = gp_core.build_dual(gp)
        A, b = dp.equality_system()
        rng = np.random.default_rng(5)
        for s1, s2 in rng.uniform(1e-3, 1 - 1e-3, size=(50, 2)):
            d1 = np.array([1.0, 1 - s1, 1 - s1, s1])
            d2 = np.array([1.0, 1 - s2, 1 - s2, s2])
            np.testing.assert_allclose(A @ d1, b, atol=1e-15)
            mid = gp_core.dual_objective(dp, (d1 + d2) / 2)
            chord = (gp_core.dual_objective(dp, d1) + gp_core.dual_objective(dp, d2)) / 2
            assert mid >= chord - 1e-12

    def test_recover_primal(self, budget_gp):
        ds = DualSolution(delta=np.ones(3), dual_objective=math.log(4.0),
                          residual_normality=0.0, residual_orthogonality=0.0)
        np.testing.assert_allclose(gp_core.recover_primal(budget_gp, ds), [0.5, 0.5], rtol=1e-12)

    def test_recover_primal_rank_deficient(self, budget_gp):
        ds = DualSolution(delta=np.array([1.0, 0.0, 0.0]), dual_objective=0.0,
                          residual_normality=0.0, residual_orthogonality=1.0)
        with pytest.raises(DegenerateRecoveryError) as excinfo:
            gp_core.recover_primal(budget_gp, ds)
        assert excinfo.value.rank == 1

    def test_constraint_values(self, budget_gp):
        np.testing.assert_allclose(gp_core.constraint_values(budget_gp, [0.25, 0.5]), [0.75])

    def test_gp_rejects_mismatched_constraint(self):
        with pytest.raises(DomainError):
            GPProblem(
                objective=Posynomial.from_arrays([1.0], [[1.0, 1.0]]),
                constraints=(Posynomial.from_arrays([1.0], [[1.0]]),)
            )
