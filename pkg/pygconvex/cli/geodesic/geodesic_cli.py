"""
Commands on the geometry of a manifold: sampled geodesics and Christoffel symbols.
"""
import click

from pygconvex.cli.util import emit_document, get_app, handle_errors, output_option, format_option
from pygconvex.core.base import manifold_kinds
from pygconvex.pod.importing.inputs import parse_point
from pygconvex.pod.serializer.trace_csv import format_trace_csv, write_trace_csv

_manifold_option = click.option('--manifold', '-m', type=click.Choice(manifold_kinds.values()), required=True,
                                help='Manifold the points live on')
_numeric_option = click.option('--numeric/--closed', default=None,
                               help='Christoffel symbols by finite differences or in closed form. Default: closed '
                                    'form where available')


@click.command(name="geodesic")
@_manifold_option
@click.option('--p', 'p_text', required=True, help='Start point, "1.0,0.5" or a matrix file / "2,0;0,1" on spd')
@click.option('--q', 'q_text', required=True, help='End point, same format as --p')
@click.option('--steps', type=int, default=None, help='Runge-Kutta steps, CONNECTION.steps if not given')
@click.option('--fd-rel-step', type=float, default=None, help='Relative finite difference step')
@_numeric_option
@output_option
@click.pass_context
@handle_errors
def geodesic(ctx, manifold, p_text, q_text, steps, fd_rel_step, numeric, output):
    """
    Closed form geodesic from p to q next to the integrated geodesic equation, as CSV trace.

    The footer holds the maximal deviation of the two.
    """
    app = get_app(ctx)
    run = app.run_config("geodesic", ("CONNECTION", "MATFUN"), output_path=output, steps=steps,
                         fd_rel_step=fd_rel_step, manifold=manifold, p=p_text, q=q_text,
                         numeric=None if numeric is None else str(numeric).lower())
    p = parse_point(manifold, p_text, "p", run["eig_floor"])
    q = parse_point(manifold, q_text, "q", run["eig_floor"])
    result = app.geodesic(run, p, q, numeric)
    if output is None:
        click.echo(format_trace_csv(result.closed, run.header(), result.footer(), result.extra_columns()), nl=False)
    else:
        write_trace_csv(output, result.closed, run.header(), result.footer(), result.extra_columns())
        click.echo("max_deviation=%r" % result.max_deviation)


@click.command(name="christoffel")
@_manifold_option
@click.option('--point', 'point_text', required=True, help='Base point, same format as geodesic --p')
@click.option('--fd-rel-step', type=float, default=None, help='Relative finite difference step')
@_numeric_option
@output_option
@format_option
@click.pass_context
@handle_errors
def christoffel(ctx, manifold, point_text, fd_rel_step, numeric, output, fmt):
    """
    Christoffel symbols Gamma[k, i, j] of the metric at a point with their metric compatibility residual.
    """
    app = get_app(ctx)
    run = app.run_config("christoffel", ("CONNECTION", "MATFUN"), output_path=output, fd_rel_step=fd_rel_step,
                         manifold=manifold, point=point_text,
                         numeric=None if numeric is None else str(numeric).lower())
    point = parse_point(manifold, point_text, "point", run["eig_floor"])
    emit_document(ctx, run, app.christoffel(run, point, numeric), output, fmt)
