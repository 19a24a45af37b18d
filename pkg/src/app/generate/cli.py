"""The generator CLI commands: `generate` and `validate`."""

import typing

import click
import orjson

from src import errors
from src import log
from src import manifest
from src import middlewares
from src import storage
from src.app.corpus import service as corpus_service
from src.app.corpus.types import Alphabet
from src.app.corpus.types import AlphabetFile
from src.app.model import io as model_io
from src.config import config

from . import service
from . import types

LOG = log.get_logger(__name__)


class ValidationFailed(errors.Error):
    """Raised when a sequence has unsupported transitions or drifts from the model."""

    code = "VALIDATION_FAILED"
    exit_code = errors.EXIT_VALIDATION


def _definition(alphabet_path: str | None, alphabet: Alphabet) -> AlphabetFile | None:
    """The alphabet file of the models: `--alphabet`, or the bundled one when it matches."""
    if alphabet_path:
        definition = middlewares.load_alphabet(alphabet_path)
        if definition.alphabet.symbols != alphabet.symbols:
            raise errors.UsageError(f"{alphabet_path} does not match the model symbols.")
        return definition
    try:
        definition = middlewares.load_alphabet(None)
    except storage.NotFound:
        return None
    return definition if definition.alphabet == alphabet else None


def _emit(
    result: types.GenerationResult,
    emit: str,
    raw: bool,
    definition: AlphabetFile | None,
    tonic_reference: int | None,
) -> str:
    seq = result.sequence
    if emit == "notes":
        return corpus_service.format_sequence(seq, None if raw else config.wrap_width) + "\n"

    if definition is None:
        raise errors.UsageError(f"--emit {emit} needs the --alphabet file of the model.")
    if tonic_reference is None:
        tonic_reference = config.midi_tonic if emit == "midi" else 0
    track = corpus_service.to_pitch_track(seq, definition.pitch_table, tonic_reference)
    if emit == "midi":
        return "".join(f"{p}\n" for p in track)
    lines = ["index,symbol,semitone"]
    lines.extend(f"{i},{s},{p}" for i, (s, p) in enumerate(zip(seq.symbols(), track), start=1))
    return "\n".join(lines) + "\n"


@click.command("generate")
@click.option(
    "--model",
    "model_paths",
    multiple=True,
    required=True,
    help="A model file; give orders 1..k for order-k generation.",
)
@click.option("--order", type=click.IntRange(min=1), help="The generation order [highest model].")
@click.option("--length", type=click.IntRange(min=1), default=1000, show_default=True)
@click.option("--seed", type=click.IntRange(0, types.MAX_SEED - 1), default=0, show_default=True)
@click.option("--start", "start_symbol", help="The first note [the alphabet tonic].")
@click.option(
    "--start-mode",
    type=click.Choice([m.value for m in types.StartMode]),
    default=types.StartMode.TONIC.value,
    show_default=True,
)
@click.option(
    "--policy",
    type=click.Choice([p.value for p in types.DeadEndPolicy]),
    help="The dead-end policy [config].",
)
@click.option("--allow-high-order", is_flag=True, help="Allow generation orders above 2.")
@click.option(
    "--emit",
    type=click.Choice(["notes", "pitches", "midi"]),
    default="notes",
    show_default=True,
)
@click.option(
    "--alphabet", "alphabet_path", help="The alphabet file with the tonic and pitches [bundled]."
)
@click.option("--tonic-reference", type=int, help="Added to every pitch [0, MIDI: config].")
@click.option("--raw", is_flag=True, help="Write the note string on a single line.")
@click.option("--out", "out_path", help="The file to write [stdout].")
@click.option("--sidecar", "sidecar_path", help="The run manifest file [OUT.manifest.json].")
@middlewares.logged_command
def generate(
    model_paths: tuple[str, ...],
    order: int | None,
    length: int,
    seed: int,
    start_symbol: str | None,
    start_mode: str,
    policy: str | None,
    allow_high_order: bool,
    emit: str,
    alphabet_path: str | None,
    tonic_reference: int | None,
    raw: bool,
    out_path: str | None,
    sidecar_path: str | None,
) -> None:
    """Generate a note sequence (SNCA for order 1, SNCA2 for order 2)."""
    models = sorted(
        (model_io.as_tpm(model_io.load_model(p)) for p in model_paths), key=lambda m: m.order
    )
    alphabet = models[0].alphabet
    definition = _definition(alphabet_path, alphabet)
    if start_symbol is not None and start_symbol not in alphabet.symbols:
        raise errors.UsageError(f"The start symbol {start_symbol!r} is not in the alphabet.")
    if start_symbol is not None:
        start = alphabet.index(start_symbol)
    else:
        start = definition.tonic_note if definition else 0

    try:
        cfg = types.GeneratorConfig(
            order=order or models[-1].order,
            length=length,
            start_note=start,
            start_mode=types.StartMode(start_mode),
            seed=seed,
            dead_end_policy=types.DeadEndPolicy(policy or config.dead_end_policy),
            allow_high_order=allow_high_order,
        )
    except ValueError as err:
        raise errors.UsageError(str(err))

    src = types.UniformSource(cfg.seed)
    result = service.generate(models, cfg, src)
    middlewares.write_output(_emit(result, emit, raw, definition, tonic_reference), out_path)

    if sidecar_path or out_path:
        manifest.write_sidecar(
            sidecar_path or f"{out_path}.manifest.json",
            manifest.RunManifest(
                command="generate",
                inputs=list(model_paths),
                alphabet_id=alphabet.id,
                order=cfg.order,
                seed=cfg.seed,
                rng_id=result.rng_id,
            ),
            seed=result.seed,
            rng_id=result.rng_id,
            length=len(result.sequence),
            uniforms=result.uniforms,
            policy_events=[e.model_dump() for e in result.events],
        )
    LOG.info(
        "Generated sequence.",
        order=cfg.order,
        length=len(result.sequence),
        seed=cfg.seed,
        policy_events=len(result.events),
    )


@click.command("validate")
@click.argument("model_path", metavar="MODEL")
@click.argument("generated_path", metavar="GENERATED")
@click.option("--order", type=click.IntRange(min=1), help="The expected model order.")
@click.option("--max-l1", type=click.FloatRange(min=0), help="Fail when a row L1 reaches this.")
@click.option(
    "--format", "fmt", type=click.Choice(["text", "json"]), default="text", show_default=True
)
@middlewares.logged_command
def validate(
    model_path: str,
    generated_path: str,
    order: int | None,
    max_l1: float | None,
    fmt: typing.Literal["text", "json"],
) -> None:
    """Check a generated sequence against the support and frequencies of a model."""
    tpm = model_io.as_tpm(model_io.load_model(model_path))
    if order is not None and order != tpm.order:
        raise errors.UsageError(f"{model_path} is an order-{tpm.order} model, not order {order}.")
    with middlewares.file_context(generated_path):
        seq = corpus_service.parse_sequence(middlewares.read_text(generated_path), tpm.alphabet)

    report = service.validate_sequence(tpm, seq)
    if fmt == "json":
        document = {**report.model_dump(), "max_l1": report.max_l1}
        click.echo(orjson.dumps(document, option=orjson.OPT_INDENT_2).decode())
    else:
        click.echo(f"transitions: {report.transitions}")
        click.echo(f"support violations: {report.violations}")
        if report.violating_states:
            click.echo(f"violating states: {' '.join(report.violating_states)}")
        click.echo(f"max row L1: {report.max_l1:.6f}")
        for state, d in report.row_l1.items():
            click.echo(f"  {state}: {d:.6f}")

    if not report.passed(max_l1):
        raise ValidationFailed(
            f"{report.violations} unsupported transitions, max row L1 {report.max_l1:.6f}."
        )
