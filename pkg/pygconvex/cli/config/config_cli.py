import click

from pygconvex.cli.util import handle_errors
from pygconvex.pod.app import GConvexConfig
from pygconvex.pod.app.gconvex_app import GConvexAppFactory


@click.group()
def config():
    """
    Commands for the configuration.

    Default config file: ~/.pygconvex.cfg
    """


def _get_config(ctx) -> GConvexConfig:
    return ctx.obj["config-app"]


@config.command(name="get")
@click.argument('param')
@click.option('--section', default='GENERAL', show_default=True, help='Get value from given section')
@click.pass_context
@handle_errors
def get(ctx, param, section):
    """
    Prints the value of a param
    """
    click.echo(_get_config(ctx).get(param, section=section))


@config.command(name="set")
@click.argument('param')
@click.argument('value')
@click.option('--section', default='GENERAL', show_default=True, help='Set key, value for given section')
@click.pass_context
@handle_errors
def set_config_param(ctx, param, value, section):
    """
    Sets key, value in config and saves it
    """
    _get_config(ctx).set(param, value, section)
    _get_config(ctx).save()

    # Reinitialize app with changed configuration
    ctx.obj['gconvex-app'].close()
    ctx.obj['gconvex-app'] = GConvexAppFactory.get(_get_config(ctx), printer=click.echo)


@config.command(name="list")
@click.option('--section', default=None, help='List params of given section, all sections if not given')
@click.pass_context
def list_config_params(ctx, section):
    """
    List all values in config
    """
    cfg = _get_config(ctx)
    for s in cfg.sections() if section is None else [section]:
        click.echo("[%s]" % s)
        for key, value in sorted(cfg.items(s).items()):
            click.echo("%s = %s" % (key, value))
