import click

from pygconvex.cli.util import EXIT_REFUTED, get_app, handle_errors, output_option, format_option, \
    print_class_table, seed_option
from pygconvex.pod.serializer.serialiser import write_document


@click.command(name="selftest")
@click.option('--scale', type=float, default=None, help='Factor on all trial counts, 1 runs the full suite')
@seed_option
@output_option
@format_option
@click.pass_context
@handle_errors
def selftest(ctx, scale, seed, output, fmt):
    """
    Runs the invariant suite and prints a pass / fail table. Exit code 2 if a check fails.
    """
    app = get_app(ctx)
    run = app.run_config("selftest", output_path=output, seed=seed, scale=1.0 if scale is None else scale)
    results = app.selftest(run)
    print_class_table(ctx, results)
    if output is not None:
        write_document(output, {"provenance": run.header(), "result": {"passed": all(r.passed for r in results),
                                                                       "checks": results}}, fmt)
    if not all(r.passed for r in results):
        ctx.exit(EXIT_REFUTED)
