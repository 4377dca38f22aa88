#!/usr/bin/env python

"""
Command Line Interface for pygconvex.

"""
import click

from pygconvex._version import __version__
from pygconvex.cli.bl import bl_cli
from pygconvex.cli.config import config_cli
from pygconvex.cli.gconvex import gconvex_cli
from pygconvex.cli.geodesic import geodesic_cli
from pygconvex.cli.opscale import opscale_cli
from pygconvex.cli.selftest import selftest_cli
from pygconvex.cli.util import echo_error
from pygconvex.core.exceptions import GConvexError
from pygconvex.pod.app import GConvexConfig
from pygconvex.pod.app.config.gconvex_config import _CFG_FILE
from pygconvex.pod.app.gconvex_app import GConvexAppFactory


#################################
#######      MAIN      ##########
#################################
@click.group()
@click.version_option(__version__)
@click.option('--config-file', '-c',
              type=click.Path(dir_okay=False),
              default=_CFG_FILE,
              show_default=True,
              help='Config file, created with the defaults if missing')
@click.option('--verbose', '-v', is_flag=True, help='Log info messages to stderr')
@click.pass_context
def pygconvex(ctx, config_file, verbose):
    """
    Geodesic convexity toolkit: geodesics, Christoffel symbols, convexity tests, Brascamp-Lieb constants and
    operator scaling.
    """
    try:
        config = GConvexConfig(config_file)
    except GConvexError as e:
        echo_error(e)
        ctx.exit(1)
    # create context object
    ctx.obj = {
        'config-app': config,
        'gconvex-app': GConvexAppFactory.get(config, printer=click.echo, verbose=verbose)
    }
    ctx.call_on_close(lambda: ctx.obj['gconvex-app'].close())


pygconvex.add_command(config_cli.config)
pygconvex.add_command(geodesic_cli.geodesic)
pygconvex.add_command(geodesic_cli.christoffel)
pygconvex.add_command(gconvex_cli.gconvex)
pygconvex.add_command(bl_cli.bl)
pygconvex.add_command(opscale_cli.opscale)
pygconvex.add_command(selftest_cli.selftest)


if __name__ == '__main__':
    pygconvex()
