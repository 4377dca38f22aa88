import click

from pygconvex.cli.util import EXIT_REFUTED, emit_document, get_app, handle_errors, output_option, format_option, \
    seed_option
from pygconvex.core.base import manifold_kinds
from pygconvex.core.exceptions import UsageError
from pygconvex.core.geometry.gconvex import builtin_names
from pygconvex.pod.importing.inputs import manifold_of, read_operator, read_posynomial


@click.command(name="gconvex")
@click.option('--fn', 'fn', type=click.Choice(builtin_names()), default=None,
              help='Built-in function, posynomial if only --posynomial is given')
@click.option('--posynomial', type=click.Path(exists=True, dir_okay=False), default=None,
              help='Posynomial document {"n": .., "terms": [{"c": .., "e": [..]}]}')
@click.option('--operator', type=click.Path(exists=True, dir_okay=False), default=None,
              help='Operator document for logdet-operator')
@click.option('--manifold', '-m', type=click.Choice(manifold_kinds.values()), required=True)
@click.option('--n', 'n', type=int, default=None, help='Order of the manifold, 2 if not implied by an input')
@click.option('--trials', type=int, default=None, help='Sampled point pairs, GCONVEX.trials if not given')
@click.option('--t-grid-size', type=int, default=None, help='Points of the t grid in [0, 1]')
@click.option('--tol', 'tol_eq', type=float, default=None, help='Tolerance of the midpoint inequality')
@seed_option
@output_option
@format_option
@click.pass_context
@handle_errors
def gconvex(ctx, fn, posynomial, operator, manifold, n, trials, t_grid_size, tol_eq, seed, output, fmt):
    """
    Searches sampled geodesics for a violation of geodesic convexity.

    Exit code 0 if no violation was found, 2 if a certified violation was found.
    """
    app = get_app(ctx)
    params = {}
    if posynomial is not None:
        fn = "posynomial" if fn is None else fn
        if fn not in ("posynomial", "log-posynomial"):
            raise UsageError("--posynomial needs --fn posynomial or log-posynomial, got " + fn)
        order, params["terms"] = read_posynomial(posynomial)
        if n is not None and n != order:
            raise UsageError("--n %d does not match the posynomial of order %d" % (n, order))
        n = order
    if fn is None:
        raise UsageError("Give a function with --fn or a posynomial document with --posynomial")
    # the probes of the operator check use the seed, the order of the manifold depends on the operator
    seed = app.run_config("gconvex", seed=seed).seed
    if operator is not None:
        if fn != "logdet-operator":
            raise UsageError("--operator needs --fn logdet-operator, got " + fn)
        params["operator"] = read_operator(operator, seed=seed)
        if n is not None and n != params["operator"].n:
            raise UsageError("--n %d does not match the operator of order %d" % (n, params["operator"].n))
        n = params["operator"].n
    elif fn == "logdet-operator":
        params["seed"] = seed
    n = 2 if n is None else n
    run = app.run_config("gconvex", ("GCONVEX",), input_path=posynomial or operator, output_path=output,
                         seed=seed, trials=trials, t_grid_size=t_grid_size, tol_eq=tol_eq, fn=fn,
                         manifold=manifold, n=n)
    m = manifold_of(manifold, n)
    report = app.gconvex(run, m, fn, **params)
    emit_document(ctx, run, report, output, fmt, table=report)
    if report.violated:
        click.echo(click.style("violated at t=%r with gap %r" % (report.witness.t, report.witness.gap), fg="red"),
                   err=True)
        ctx.exit(EXIT_REFUTED)
