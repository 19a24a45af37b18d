"""The analysis CLI commands: `analyze` and `sweep`."""

import typing

import click
import orjson

from src import log
from src import manifest
from src import middlewares
from src.app.corpus import service as corpus_service
from src.app.model import io as model_io

from . import service
from . import types

LOG = log.get_logger(__name__)


def _report_text(report: types.ChainReport) -> str:
    lines = [
        f"order: {report.order}",
        f"states: {len(report.states)} analyzed, {len(report.excluded_states)} excluded",
        f"ergodic: {'yes' if report.ergodic else 'no'}",
        f"regular: {'yes' if report.regular else 'no'}",
    ]
    if report.regularity_power is not None:
        lines.append(f"regularity power: {report.regularity_power}")
    lines.append(f"sparsity: {report.sparsity:.6f}")
    lines.append(f"dead-end rows: {report.dead_end_rows}")
    if report.stationary is not None:
        lines.append(f"convergence power: {report.convergence_power} (tol={report.tolerance:g})")
        lines.append("stationary:")
        lines.extend(f"  {s}: {w:.6f}" for s, w in zip(report.states, report.stationary))
    return "\n".join(lines) + "\n"


@click.command("analyze")
@click.argument("model_path", metavar="MODEL")
@click.option("--tol", type=click.FloatRange(min=0, min_open=True), help="The tolerance [config].")
@click.option("--dot", "dot_path", help="Also write the transition diagram as DOT.")
@click.option(
    "--format", "fmt", type=click.Choice(["text", "json"]), default="text", show_default=True
)
@click.option("--require-regular", is_flag=True, help="Fail when the chain is not regular.")
@middlewares.logged_command
def analyze(
    model_path: str,
    tol: float | None,
    dot_path: str | None,
    fmt: typing.Literal["text", "json"],
    require_regular: bool,
) -> None:
    """Report ergodicity, regularity, the fixed vector and sparsity of a model."""
    tpm = model_io.as_tpm(model_io.load_model(model_path))
    report = service.chain_report(tpm, tol)
    if fmt == "json":
        click.echo(orjson.dumps(report.model_dump(), option=orjson.OPT_INDENT_2).decode())
    else:
        click.echo(_report_text(report), nl=False)
    if dot_path:
        middlewares.write_output(service.export_dot(tpm), dot_path)
        manifest.write_sidecar(
            f"{dot_path}.manifest.json",
            manifest.RunManifest(
                command="analyze", inputs=[model_path], alphabet_id=tpm.alphabet.id, order=tpm.order
            ),
        )
    if require_regular and not report.regular:
        raise service.NotRegular(f"{model_path}: the chain is not regular.")


@click.command("sweep")
@click.argument("corpus_path", metavar="CORPUS")
@click.option("--max-order", type=click.IntRange(min=1), default=4, show_default=True)
@click.option("--alphabet", "alphabet_path", help="The alphabet file [bundled Bageshree].")
@click.option(
    "--format", "fmt", type=click.Choice(["text", "json"]), default="text", show_default=True
)
@middlewares.logged_command
def sweep(
    corpus_path: str, max_order: int, alphabet_path: str | None, fmt: typing.Literal["text", "json"]
) -> None:
    """Fit orders 1..MAX_ORDER and tabulate sparsity against the order."""
    definition = middlewares.load_alphabet(alphabet_path)
    with middlewares.file_context(corpus_path):
        corpus = corpus_service.parse_corpus(
            middlewares.read_text(corpus_path), definition.alphabet
        )
    result = service.order_sweep(corpus, max_order)
    if fmt == "json":
        document = {**result.model_dump(), "sparsity_monotonic": result.sparsity_monotonic}
        click.echo(orjson.dumps(document, option=orjson.OPT_INDENT_2).decode())
        return
    click.echo("order,rows,dead_end_rows,sparsity")
    for row in result.rows:
        click.echo(f"{row.order},{row.rows},{row.dead_end_rows},{row.sparsity:.6f}")
    if not result.sparsity_monotonic:
        LOG.warning("Sparsity decreased with the order.")
