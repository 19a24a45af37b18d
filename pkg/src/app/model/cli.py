"""The model CLI commands: `estimate` and `export`."""

import typing

import click

from src import log
from src import manifest
from src import middlewares
from src.app.analysis import service as analysis_service
from src.app.corpus import service as corpus_service

from . import io
from . import service

LOG = log.get_logger(__name__)


@click.command("estimate")
@click.argument("corpus_path", metavar="CORPUS")
@click.option("--order", type=click.IntRange(min=1), required=True, help="The model order k.")
@click.option("--out", "out_path", required=True, help="The model file to write.")
@click.option("--alphabet", "alphabet_path", help="The alphabet file [bundled Bageshree].")
@click.option(
    "--kind",
    type=click.Choice(["counts", "tpm"]),
    default="counts",
    show_default=True,
    help="Write integer counts or 'num/den' probabilities.",
)
@click.option("--csv-tpm", help="Also write the tpm as a CSV table.")
@click.option("--csv-class", help="Also write the class matrix as a CSV table.")
@click.option("--skip-unknown", is_flag=True, help="Drop unknown symbols with a warning.")
@middlewares.logged_command
def estimate(
    corpus_path: str,
    order: int,
    out_path: str,
    alphabet_path: str | None,
    kind: str,
    csv_tpm: str | None,
    csv_class: str | None,
    skip_unknown: bool,
) -> None:
    """Fit an order-k model to a corpus file."""
    definition = middlewares.load_alphabet(alphabet_path)
    with middlewares.file_context(corpus_path):
        text = middlewares.read_text(corpus_path)
        corpus = corpus_service.parse_corpus(text, definition.alphabet, skip_unknown)

    counts = service.count_transitions(corpus, order)
    tpm = service.to_tpm(counts)
    io.save_model(counts if kind == "counts" else tpm, out_path)
    if csv_tpm:
        middlewares.write_output(io.export_tpm_csv(tpm), csv_tpm)
    if csv_class:
        middlewares.write_output(io.export_class_csv(service.to_class_matrix(tpm)), csv_class)

    manifest.write_sidecar(
        f"{out_path}.manifest.json",
        manifest.RunManifest(
            command="estimate",
            inputs=[corpus_path],
            alphabet_id=definition.alphabet.id,
            order=order,
        ),
    )
    LOG.info(
        "Estimated model.",
        sequences=len(corpus),
        order=order,
        shape=list(tpm.shape),
        sparsity=float(service.sparsity(tpm)),
    )


@click.command("export")
@click.argument("model_path", metavar="MODEL")
@click.option(
    "--what",
    type=click.Choice(["tpm", "class", "dot"]),
    default="tpm",
    show_default=True,
    help="The tpm or class matrix as CSV, or the transition diagram as DOT.",
)
@click.option("--out", "out_path", help="The file to write [stdout].")
@middlewares.logged_command
def export(
    model_path: str, what: typing.Literal["tpm", "class", "dot"], out_path: str | None
) -> None:
    """Export a model as a table or a graph."""
    tpm = io.as_tpm(io.load_model(model_path))
    match what:
        case "tpm":
            text = io.export_tpm_csv(tpm)
        case "class":
            text = io.export_class_csv(service.to_class_matrix(tpm))
        case "dot":
            text = analysis_service.export_dot(tpm)
    middlewares.write_output(text, out_path)
    if out_path:
        manifest.write_sidecar(
            f"{out_path}.manifest.json",
            manifest.RunManifest(
                command="export", inputs=[model_path], alphabet_id=tpm.alphabet.id, order=tpm.order
            ),
            what=what,
        )
