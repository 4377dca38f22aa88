import click

from pygconvex.cli.util import EXIT_REFUTED, echo_error, emit_document, get_app, handle_errors, output_option, \
    format_option, seed_option
from pygconvex.pod.importing.inputs import read_bl_datum


@click.command(name="bl")
@click.argument('datum', type=click.Path(exists=True, dir_okay=False))
@click.option('--oracle/--no-oracle', default=None,
              help='Cross check with the rank one oracle, default: for rank one data')
@click.option('--max-iter', type=int, default=None, help='Iterations of the geodesic descent')
@click.option('--grad-tol', type=float, default=None, help='Gradient norm of convergence')
@click.option('--heuristic-trials', type=int, default=None, help='Random subspaces tested for feasibility')
@seed_option
@output_option
@format_option
@click.pass_context
@handle_errors
def bl(ctx, datum, oracle, max_iter, grad_tol, heuristic_trials, seed, output, fmt):
    """
    Brascamp-Lieb constant of the datum document {"n": .., "p": [..], "B": [[[..]]]}.

    Exit code 2 if the datum fails the scaling condition, is degenerate or a subspace refutes feasibility.
    """
    app = get_app(ctx)
    run = app.run_config("bl", ("DESCENT", "BL"), input_path=datum, output_path=output, seed=seed,
                         max_iter=max_iter, grad_tol=grad_tol, heuristic_trials=heuristic_trials,
                         oracle=None if oracle is None else str(oracle).lower())
    result = app.bl(run, read_bl_datum(datum), oracle)
    emit_document(ctx, run, result, output, fmt, table=result.result)
    if result.refuted:
        echo_error("infeasible: " + result.failed_check)
        ctx.exit(EXIT_REFUTED)
    for warning in result.result.warnings:
        click.echo(click.style(warning, fg="yellow"), err=True)
