import logging

import click

from urgp import create_app
from urgp.errors import ConfigurationError


@click.group()
@click.option('--config', 'config_name', default=None,
              help='Configuration name: default, development or quick (env URGP_CONFIG).')
@click.option('--verbose', is_flag=True, help='Log solver progress at DEBUG level.')
@click.pass_context
def cli(ctx, config_name, verbose):
    """Uncertain random geometric programming toolkit."""
    try:
        ctx.obj = create_app(config_name)
    except ConfigurationError as e:
        raise click.UsageError(str(e), ctx=ctx) from e
    logging.getLogger().setLevel(logging.DEBUG if verbose else ctx.obj.log_level)


from urgp.cli import commands  # noqa: E402,F401
