import click

from pygconvex.cli.util import emit_document, get_app, handle_errors, output_option, format_option, seed_option
from pygconvex.pod.importing.inputs import read_operator
from pygconvex.pod.serializer.trace_csv import write_residual_csv


@click.command(name="opscale")
@click.argument('operator', type=click.Path(exists=True, dir_okay=False))
@click.option('--alternating/--no-alternating', default=True, show_default=True,
              help='Cross check with alternating scaling')
@click.option('--max-iter', type=int, default=None, help='Iterations of the geodesic descent')
@click.option('--grad-tol', type=float, default=None, help='Gradient norm of convergence')
@click.option('--iters', type=int, default=None, help='Iterations of the alternating scaling')
@click.option('--residual-csv', type=click.Path(dir_okay=False), default=None,
              help='Writes the residuals of the alternating scaling as CSV')
@seed_option
@output_option
@format_option
@click.pass_context
@handle_errors
def opscale(ctx, operator, alternating, max_iter, grad_tol, iters, residual_csv, seed, output, fmt):
    """
    Capacity and doubly stochastic scaling of the operator document {"n": .., "A": [[[..]]]}.

    A suspected zero capacity is reported in the status field.
    """
    app = get_app(ctx)
    run = app.run_config("opscale", ("DESCENT", "SCALING"), input_path=operator, output_path=output, seed=seed,
                         max_iter=max_iter, grad_tol=grad_tol, iters=iters, alternating=str(alternating).lower())
    result = app.opscale(run, read_operator(operator, run["probes"], run.seed), alternating)
    emit_document(ctx, run, result, output, fmt, table=result.result)
    if residual_csv is not None:
        write_residual_csv(residual_csv, result.result.residual_trace, run.header())
