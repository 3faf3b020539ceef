import logging

import numpy as np
import pytest

from urgp import reformulate, solver, urv_core, validate
from urgp.errors import DomainError
from urgp.models import (
    Criterion, EndpointPolicy, LinearNormalURV, MCConfig, NormalRV, NormalTerm, StochasticGP
)

EXAMPLE = LinearNormalURV(A=NormalRV(3.0, 1.0), B=NormalRV(2.0, 1.0))
Q95 = urv_core.normal_quantile(0.95)


def single_row_program(mus, sigmas, exponents):
    """Stochastic GP with a trivial objective and one constraint row."""
    var_count = exponents.shape[1]
    return StochasticGP(
        objective_terms=(NormalTerm(NormalRV(1.0, 0.1), np.zeros(var_count)),),
        constraint_groups=(tuple(
            NormalTerm(NormalRV(mu, sigma), row) for mu, sigma, row in zip(mus, sigmas, exponents)
        ),),
        var_names=tuple(f"x{j + 1}" for j in range(var_count))
    )


def scaled_to(mus, sigmas, exponents, x, target):
    """Scale every coefficient so the deterministic constraint LHS at x equals target."""
    program = single_row_program(mus, sigmas, exponents)
    lhs = reformulate.row_lhs(reformulate.to_deterministic(program, 0.05), 1, x)
    scale = target / lhs
    return single_row_program(mus * scale, sigmas * scale, exponents)


class TestTransformDistribution:

    @pytest.mark.parametrize('criterion', [
        Criterion.optimistic(0.1), Criterion.optimistic(0.5), Criterion.optimistic(0.9),
        Criterion.pessimistic(0.1), Criterion.pessimistic(0.9), Criterion.expected()
    ])
    def test_ks_statistic(self, criterion):
        cfg = MCConfig(samples=10**5, seed=20240607)
        statistic = validate.check_transform_distribution(EXAMPLE, criterion, cfg)
        assert statistic <= validate.ks_threshold(10**5)

    def test_sample_moments(self):
        sample = validate.sample_critical_values(EXAMPLE, Criterion.optimistic(0.3),
                                                 MCConfig(samples=10**5))
        expected = urv_core.transform(EXAMPLE, Criterion.optimistic(0.3))
        assert sample.size == 10**5
        assert sample.mean() == pytest.approx(expected.mu, abs=5 * expected.sigma / np.sqrt(10**5))
        assert sample.std() == pytest.approx(expected.sigma, rel=2e-2)

    def test_seed_fixes_sample(self):
        cfg = MCConfig(samples=10**4, seed=99)
        first = validate.sample_critical_values(EXAMPLE, Criterion.expected(), cfg)
        second = validate.sample_critical_values(EXAMPLE, Criterion.expected(), cfg)
        np.testing.assert_array_equal(first, second)

    def test_sample_independent_of_worker_count(self):
        base = MCConfig(samples=3 * 2**12 + 17, seed=5, chunk_size=2**12, workers=1)
        threaded = MCConfig(samples=3 * 2**12 + 17, seed=5, chunk_size=2**12, workers=4)
        np.testing.assert_array_equal(
            validate.sample_critical_values(EXAMPLE, Criterion.pessimistic(0.4), base),
            validate.sample_critical_values(EXAMPLE, Criterion.pessimistic(0.4), threaded)
        )

    def test_resampling_conditions_endpoints(self, caplog):
        cfg = MCConfig(samples=10**4, endpoint_policy='resample_until_ordered')
        with caplog.at_level(logging.WARNING):
            sample = validate.sample_critical_values(EXAMPLE, Criterion.optimistic(0.9), cfg)
        assert 'Resampling' in caplog.text
        # Conditioning on a < b pulls the heavily weighted endpoint a down
        assert sample.mean() < urv_core.transform(EXAMPLE, Criterion.optimistic(0.9)).mu - 0.5


class TestCheckChance:

    def test_oracle_separates_interior_and_exterior(self):
        rng = np.random.default_rng(2024)
        cfg = MCConfig(samples=10**5, seed=7)
        for _ in range(20):
            terms = int(rng.integers(1, 4))
            var_count = int(rng.integers(1, 4))
            mus = rng.uniform(0.5, 2.0, size=terms)
            sigmas = rng.uniform(0.05, 0.5, size=terms) * mus
            exponents = rng.integers(-2, 3, size=(terms, var_count)).astype(float)
            x = rng.uniform(0.5, 2.0, size=var_count)

            inside = validate.check_chance(scaled_to(mus, sigmas, exponents, x, 0.95), x, 0.05, cfg)[1]
            outside = validate.check_chance(scaled_to(mus, sigmas, exponents, x, 1.05), x, 0.05, cfg)[1]
            assert inside.satisfies(0.05)
            assert not outside.satisfies(0.05)

    def test_boundary_point(self):
        sigma = 0.1
        program = single_row_program(np.array([1.0 - Q95 * sigma]), np.array([sigma]), np.zeros((1, 1)))
        report = validate.check_chance(program, [1.0], 0.05, MCConfig(samples=10**6))[1]
        assert report.samples_used == 10**6
        assert abs(report.estimate - 0.95) <= 3 * report.stderr

    def test_report_per_row(self, problem14):
        result = solver.solve_uncertain(problem14, Criterion.optimistic(0.5), 0.05)
        reports = validate.check_chance(result.stochastic, result.primal.x, 0.05,
                                        MCConfig(samples=10**5, seed=11))
        assert [report.row for report in reports] == [0, 1]
        assert reports[0].bound == pytest.approx(result.primal.objective, rel=1e-6)
        assert all(report.satisfies(0.05) for report in reports)

    def test_seed_determines_reports(self, problem14):
        s = reformulate.to_stochastic(problem14, Criterion.optimistic(0.5))
        x = [1.254, 0.247, 1.195]
        first = validate.check_chance(s, x, 0.05, MCConfig(samples=10**4, seed=3, workers=1))
        second = validate.check_chance(s, x, 0.05, MCConfig(samples=10**4, seed=3, workers=3))
        assert first == second

    def test_stderr_formula(self):
        program = single_row_program(np.array([0.5]), np.array([0.2]), np.zeros((1, 1)))
        report = validate.check_chance(program, [1.0], 0.05, MCConfig(samples=10**4))[1]
        p = report.estimate
        assert report.stderr == pytest.approx(np.sqrt(p * (1 - p) / 10**4))

    def test_stderr_shrinks_with_samples(self):
        program = single_row_program(np.array([0.8]), np.array([0.25]), np.zeros((1, 1)))
        small = validate.check_chance(program, [1.0], 0.05, MCConfig(samples=20_000, seed=8))[1]
        large = validate.check_chance(program, [1.0], 0.05, MCConfig(samples=40_000, seed=8))[1]
        assert small.stderr / large.stderr == pytest.approx(np.sqrt(2), rel=5e-2)

    @pytest.mark.parametrize('x', [[1.254, 0.0, 1.195], [1.254, -0.247, 1.195], [np.nan, 0.247, 1.195]])
    def test_rejects_nonpositive_point(self, problem14, x):
        s = reformulate.to_stochastic(problem14, Criterion.optimistic(0.5))
        with pytest.raises(DomainError):
            validate.check_chance(s, x, 0.05, MCConfig(samples=10**4))


class TestMCConfig:

    def test_minimum_samples(self):
        with pytest.raises(DomainError):
            MCConfig(samples=9999)

    def test_unknown_policy(self):
        with pytest.raises(DomainError):
            MCConfig(endpoint_policy='reject')

    def test_policy_from_name(self):
        assert MCConfig(endpoint_policy='as_is').endpoint_policy is EndpointPolicy.AS_IS

    def test_seed_range(self):
        with pytest.raises(DomainError):
            MCConfig(seed=-1)
