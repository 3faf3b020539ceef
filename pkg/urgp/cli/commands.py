import csv
import dataclasses
import io
import logging
import math
import os

import click
import numpy as np

from urgp import gp_core, reformulate, solver, urv_core, validate
from urgp.cli import cli
from urgp.errors import NegativeDegreeOfDifficulty, ProblemParseError
from urgp.models.uncertain import Criterion, CriterionKind, LinearNormalURV, NormalRV
from urgp.utils import exporter
from urgp.utils.decorators import SolverFailure, ValidationFailure, reports_errors
from urgp.utils.problem_parser import parse_problem

logger = logging.getLogger(__name__)

CRITERIA = [kind.value for kind in CriterionKind]


class GridType(click.ParamType):
    """Inclusive grid written as start:stop:step."""
    name = 'start:stop:step'

    def __init__(self, unit_interval=False):
        self.unit_interval = unit_interval

    def convert(self, value, param, ctx):
        if isinstance(value, (list, tuple)):
            return list(value)
        try:
            start, stop, step = (float(part) for part in value.split(':'))
        except ValueError:
            self.fail(f"{value!r} is not of the form start:stop:step", param, ctx)
        if not step > 0 or stop < start:
            self.fail(f"{value!r} needs step > 0 and stop >= start", param, ctx)

        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        points = [round(start + i * step, 12) for i in range(count)]
        if self.unit_interval and not all(0.0 < p < 1.0 for p in points):
            self.fail(f"alpha grid {value!r} must lie strictly inside (0, 1)", param, ctx)
        return points


ALPHA = click.FloatRange(0.0, 1.0, min_open=True, max_open=True)
EPSILON = click.FloatRange(0.0, 0.5, min_open=True)


def criterion_options(f):
    f = click.option('--epsilon', type=EPSILON, required=True,
                     help='Chance constraint tolerance in (0, 0.5].')(f)
    f = click.option('--criterion', type=click.Choice(CRITERIA, case_sensitive=False),
                     required=True, help='Critical-value criterion.')(f)
    return f


def _criterion(kind, alpha):
    if kind.lower() != CriterionKind.EXPECTED.value and alpha is None:
        raise click.UsageError(f"--alpha is required for the {kind} criterion")
    return Criterion.from_name(kind, alpha)


def _emit_csv(header, records):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\r\n')
    writer.writerow(header)
    writer.writerows(records)
    click.echo(buffer.getvalue(), nl=False)


def _echo_field(label, value):
    click.echo(f"{label:<16}{value}")


@cli.command()
@click.argument('problem_file', type=click.Path(exists=True, dir_okay=False))
@criterion_options
@click.option('--alpha', type=ALPHA, default=None, help='Confidence level in (0, 1).')
@click.option('--out', type=click.Path(dir_okay=False), default=None,
              help='Write the full solution as JSON.')
@click.pass_obj
@reports_errors
def solve(app, problem_file, criterion, epsilon, alpha, out):
    """Solve one uncertain random GP."""
    problem = parse_problem(problem_file)
    result = solver.solve_uncertain(problem, _criterion(criterion, alpha), epsilon, app.solve)
    primal = result.primal

    _echo_field('criterion', result.criterion.label())
    _echo_field('epsilon', exporter.human_number(epsilon))
    _echo_field('status', primal.status.value)
    _echo_field('objective', exporter.human_number(primal.objective))
    for name, value in zip(result.lifted.gp.var_names, primal.x):
        _echo_field(name, exporter.human_number(value))
    _echo_field('kkt_residual', f"{primal.kkt_residual:.3e}")
    _echo_field('iterations', primal.iterations)
    if result.gap is not None:
        _echo_field('duality_gap', f"{result.gap:.3e}")

    if out:
        exporter.write_solution_json(result, out)
    if not primal.is_optimal:
        raise SolverFailure(f"Solver stopped with status {primal.status.value}")


def _lifted(problem, c, epsilon):
    return reformulate.lift(reformulate.to_deterministic(reformulate.to_stochastic(problem, c), epsilon))


def _sweep(app, problem, criterion, epsilon, alpha_grid, parallel):
    rows = solver.sweep_alpha(problem, criterion.lower(), epsilon, alpha_grid, app.solve,
                              parallel=parallel, workers=app.threads)
    lifted = _lifted(problem, Criterion.from_name(criterion, alpha_grid[0]), epsilon)
    return rows, lifted.gp.var_names


def _fail_on_bad_rows(rows):
    failed = [row for row in rows if row.status != 'optimal']
    if failed:
        raise SolverFailure(
            f"{len(failed)} of {len(rows)} grid points not solved: "
            + ', '.join(f"alpha={row.alpha:g} ({row.status})" for row in failed)
        )


@cli.command()
@click.argument('problem_file', type=click.Path(exists=True, dir_okay=False))
@criterion_options
@click.option('--alpha-grid', type=GridType(unit_interval=True), required=True)
@click.option('--parallel', is_flag=True, help='Solve grid points in worker processes.')
@click.option('--out', type=click.Path(dir_okay=False), default=None,
              help='Write the table to a .csv or .xlsx file instead of stdout.')
@click.pass_obj
@reports_errors
def sweep(app, problem_file, criterion, epsilon, alpha_grid, parallel, out):
    """Solve over a grid of alpha values and print a CSV table."""
    problem = parse_problem(problem_file)
    rows, var_names = _sweep(app, problem, criterion, epsilon, alpha_grid, parallel)

    if out and os.path.splitext(out)[1].lower() == '.xlsx':
        exporter.write_sweep_xlsx(rows, var_names, out)
    elif out:
        with open(out, 'w', encoding='utf-8', newline='') as handle:
            exporter.write_sweep_csv(rows, var_names, handle)
        logger.info(f"[OK] Sweep table written to {out}")
    else:
        _emit_csv(exporter.sweep_header(var_names), exporter.sweep_records(rows, var_names))
    _fail_on_bad_rows(rows)


@cli.command()
@click.argument('problem_file', type=click.Path(exists=True, dir_okay=False))
@criterion_options
@click.option('--alpha-grid', type=GridType(unit_interval=True), required=True)
@click.option('--parallel', is_flag=True)
@click.pass_obj
@reports_errors
def curve(app, problem_file, criterion, epsilon, alpha_grid, parallel):
    """Optimal objective value against alpha."""
    problem = parse_problem(problem_file)
    rows, _ = _sweep(app, problem, criterion, epsilon, alpha_grid, parallel)
    _emit_csv(
        ['alpha', 'objective'],
        [[exporter.machine_number(row.alpha), exporter.machine_number(row.objective)] for row in rows]
    )
    _fail_on_bad_rows(rows)


def _point_from_solution(problem, path):
    document = exporter.read_solution_json(path)
    variables = document['variables']
    missing = [name for name in problem.var_names if name not in variables]
    if missing:
        raise ProblemParseError(
            f"Solution file lacks variables {', '.join(missing)}", field='variables'
        )
    return np.array([float(variables[name]) for name in problem.var_names])


@cli.command(name='validate')
@click.argument('problem_file', type=click.Path(exists=True, dir_okay=False))
@criterion_options
@click.option('--alpha', type=ALPHA, default=None)
@click.option('--samples', type=int, default=None, help='Monte Carlo sample count per row.')
@click.option('--seed', type=int, default=None, help='Seed for the sampling streams.')
@click.option('--at', 'solution_file', type=click.Path(exists=True, dir_okay=False),
              default=None, help='Check a stored solution instead of solving.')
@click.pass_obj
@reports_errors
def validate_command(app, problem_file, criterion, epsilon, alpha, samples, seed, solution_file):
    """Estimate every chance constraint by Monte Carlo at the solution."""
    problem = parse_problem(problem_file)
    c = _criterion(criterion, alpha)
    mc = dataclasses.replace(
        app.mc,
        samples=app.mc.samples if samples is None else samples,
        seed=app.mc.seed if seed is None else seed
    )

    if solution_file:
        x = _point_from_solution(problem, solution_file)
    else:
        result = solver.solve_uncertain(problem, c, epsilon, app.solve)
        if not result.primal.is_optimal:
            raise SolverFailure(f"Solver stopped with status {result.primal.status.value}")
        x = result.x

    reports = validate.check_chance(reformulate.to_stochastic(problem, c), x, epsilon, mc)
    _emit_csv(
        ['row', 'bound', 'estimate', 'stderr', 'target', 'satisfied'],
        [[report.row, exporter.machine_number(report.bound), exporter.machine_number(report.estimate),
          exporter.machine_number(report.stderr), exporter.machine_number(1.0 - epsilon),
          'yes' if report.satisfies(epsilon) else 'no']
         for report in reports]
    )

    violated = [report.row for report in reports if not report.satisfies(epsilon)]
    if violated:
        raise ValidationFailure(
            f"Chance level {1.0 - epsilon:g} not reached on rows {', '.join(map(str, violated))}"
        )


@cli.command()
@click.argument('problem_file', type=click.Path(exists=True, dir_okay=False))
@criterion_options
@click.option('--alpha', type=ALPHA, default=None)
@click.option('--recover', is_flag=True, help='Also rebuild the primal point from the dual weights.')
@click.pass_obj
@reports_errors
def dual(app, problem_file, criterion, epsilon, alpha, recover):
    """Dual solution, residuals and duality gap of the lifted program."""
    problem = parse_problem(problem_file)
    c = _criterion(criterion, alpha)
    dp = gp_core.build_dual(_lifted(problem, c, epsilon).gp)
    if dp.degree_of_difficulty < 0:
        raise NegativeDegreeOfDifficulty(dp.degree_of_difficulty)

    cfg = dataclasses.replace(app.solve, dual_enabled=True)
    result = solver.solve_uncertain(problem, c, epsilon, cfg)
    if result.dual is None:
        raise SolverFailure(f"Primal solve stopped with status {result.primal.status.value}")

    ds = result.dual
    _echo_field('degree', dp.degree_of_difficulty)
    for i, (weight, group) in enumerate(zip(ds.delta, dp.group_of_term)):
        _echo_field(f"delta[{i}]", f"{exporter.human_number(weight)}  (row {group})")
    _echo_field('dual_value', exporter.human_number(ds.dual_value))
    _echo_field('primal_value', exporter.human_number(result.primal.objective))
    _echo_field('normality', f"{ds.residual_normality:.3e}")
    _echo_field('orthogonality', f"{ds.residual_orthogonality:.3e}")
    _echo_field('duality_gap', f"{result.gap:.3e}")

    if recover:
        x = gp_core.recover_primal(result.lifted.gp, ds, app.solve.drop_threshold)
        for name, value in zip(result.lifted.gp.var_names, x):
            _echo_field(name, exporter.human_number(value))
    if not ds.converged:
        raise SolverFailure(f"Dual solve did not converge: {ds.message}")


@cli.command()
@click.option('--mu-a', type=float, required=True)
@click.option('--sigma-a', type=float, required=True)
@click.option('--mu-b', type=float, required=True)
@click.option('--sigma-b', type=float, required=True)
@click.option('--criterion', type=click.Choice(CRITERIA, case_sensitive=False), required=True)
@click.option('--alpha-grid', type=GridType(unit_interval=True), default=None)
@click.option('--x-range', type=GridType(), required=True)
@click.option('--check-samples', type=int, default=None,
              help='Also compare against sampled critical values (KS statistic, logged).')
@click.pass_obj
@reports_errors
def distribution(app, mu_a, sigma_a, mu_b, sigma_b, criterion, alpha_grid, x_range, check_samples):
    """CDF and density of the transformed distribution on a grid."""
    kind = CriterionKind(criterion.lower())
    if kind is not CriterionKind.EXPECTED and not alpha_grid:
        raise click.UsageError(f"--alpha-grid is required for the {kind.value} criterion")
    xi = LinearNormalURV(A=NormalRV(mu_a, sigma_a), B=NormalRV(mu_b, sigma_b))

    rows = urv_core.distribution_curve(xi, kind, alpha_grid or [], x_range)
    _emit_csv(['alpha', 'x', 'cdf', 'pdf'],
              [[exporter.machine_number(value) for value in row] for row in rows])

    if check_samples:
        mc = dataclasses.replace(app.mc, samples=check_samples)
        alphas = [None] if kind is CriterionKind.EXPECTED else alpha_grid
        for alpha in alphas:
            validate.check_transform_distribution(xi, Criterion(kind, alpha), mc)
