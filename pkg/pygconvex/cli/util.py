import functools

import click

from pygconvex.core.exceptions import GConvexError
from pygconvex.pod.app.gconvex_app import GConvexApp
from pygconvex.pod.serializer.serialiser import write_document

# exit codes
EXIT_OK = 0
EXIT_ERROR = 1
EXIT_REFUTED = 2


def get_app(ctx) -> GConvexApp:
    return ctx.obj["gconvex-app"]


def print_class_table(ctx, objects, clz=None, columns=None):
    get_app(ctx).print_tables(objects, clz=clz, columns=columns)


def echo_error(message):
    click.echo(click.style(str(message), fg="red"), err=True)


def handle_errors(fn):
    """
    Decorator for commands: GConvexErrors are printed in red and end the command with exit code 1.
    """
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except GConvexError as e:
            echo_error("%s: %s" % (type(e).__name__, e))
            click.get_current_context().exit(EXIT_ERROR)
    return wrapper


def emit_document(ctx, run, document, output, fmt="json", table=None):
    """
    Writes the document with the provenance of the run. Without output file the document goes to stdout, otherwise
    the table (if any) is printed.
    """
    write_document(output, {"provenance": run.header(), "result": document}, fmt)
    if output not in (None, "-") and table is not None:
        print_class_table(ctx, table)


output_option = click.option('--output', '-o', type=click.Path(dir_okay=False), default=None,
                             help='Output file, stdout if not given')
format_option = click.option('--format', 'fmt', type=click.Choice(["json", "yaml"]), default="json",
                             show_default=True, help='Format of the result document')
seed_option = click.option('--seed', type=int, default=None, help='Seed, GENERAL.seed of the config if not given')
