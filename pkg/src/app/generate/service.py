"""
Note sequence generation by inverse-transform sampling of cumulative classes.

SNCA samples every note from the order-1 row of the previous note. SNCA2
samples the second note from the order-1 model and every later note from the
order-2 row of the last two notes. `generate` is the order-k generalization.
"""

import bisect
from collections.abc import Sequence

import numpy as np

from src import errors
from src import log
from src.app.corpus.types import Note
from src.app.corpus.types import NoteSequence
from src.app.model import service as model_service
from src.app.model.types import ClassMatrix
from src.app.model.types import TransitionMatrix

from . import types

__all__ = [
    "Error",
    "DeadEndRow",
    "sample_class",
    "generate",
    "generate_snca",
    "generate_snca2",
    "empirical_tpm",
    "validate_sequence",
]

LOG = log.get_logger(__name__)


class Error(errors.Error):
    """The generator error."""


class DeadEndRow(Error):
    """Raised when a state has no successor to sample."""

    code = "DEAD_END_ROW"
    exit_code = errors.EXIT_PRECONDITION

    def __init__(self, msg: str, state: str, position: int | None = None) -> None:
        self.state = state
        self.position = position
        super().__init__(msg)


def _pick(cumulative: Sequence[int], u: float) -> Note:
    """The column whose [lo, hi) contains u; zero-width columns are never picked."""
    if not 0.0 <= u < 1.0:
        raise ValueError(f"A uniform variate must lie in [0, 1), got {u}.")
    # u = p/q exactly, so lo/den <= u iff lo <= floor(p * den / q).
    p, q = float(u).as_integer_ratio()
    return Note(bisect.bisect_right(cumulative, p * cumulative[-1] // q) - 1)


def sample_class(classes: ClassMatrix, row: int, u: float) -> Note:
    """Map the uniform variate `u` to the note of the class it falls in.

    :raises :class:`DeadEndRow` if every interval of the row has zero width.
    """
    if classes.is_dead(row):
        label = classes.row_label(row)
        raise DeadEndRow(f"State {label} has no successors.", label)
    return _pick(classes.cumulative[row].tolist(), u)


def _check_models(models: Sequence[TransitionMatrix], cfg: types.GeneratorConfig) -> None:
    if len(models) < cfg.order:
        raise errors.UsageError(f"Order-{cfg.order} generation needs models of orders 1..k.")
    alphabet = models[0].alphabet
    for k, m in enumerate(models[: cfg.order], start=1):
        if m.order != k:
            raise errors.UsageError(f"Expected an order-{k} model, got order {m.order}.")
        if m.alphabet != alphabet:
            raise errors.UsageError("All models must share one alphabet.")
    if cfg.start_note >= alphabet.size:
        raise errors.UsageError(f"The start note {cfg.start_note} is outside the alphabet.")


def generate(
    models: Sequence[TransitionMatrix], cfg: types.GeneratorConfig, src: types.Uniforms
) -> types.GenerationResult:
    """Generate `cfg.length` notes with an order-k chain bootstrapped through lower orders.

    `models[j]` is the order-(j+1) model. Note t is sampled from the row of the
    last min(t, k) notes, so note 2 always comes from the order-1 model.

    One uniform is consumed per sampled note; a restart emits the start note
    without consuming one, the unconditional start mode consumes one more.

    :raises :class:`DeadEndRow` under the `error` policy.
    """
    _check_models(models, cfg)
    alphabet = models[0].alphabet
    classes = [model_service.to_class_matrix(m) for m in models[: cfg.order]]
    rows: list[dict[int, list[int]]] = [{} for _ in classes]
    consumed_before = src.consumed

    def cumulative(order: int, row: int) -> list[int]:
        cache = rows[order - 1]
        if row not in cache:
            cache[row] = classes[order - 1].cumulative[row].tolist()
        return cache[row]

    if cfg.start_mode is types.StartMode.UNCONDITIONAL:
        weights = np.concatenate(([0], np.cumsum(models[0].denominators))).tolist()
        if not weights[-1]:
            raise DeadEndRow("The order-1 model has no observed notes.", "")
        start = _pick(weights, src.next())
    else:
        start = cfg.start_note

    notes: list[Note] = [start]
    events: list[types.PolicyEvent] = []
    context = 0
    for t in range(1, cfg.length):
        k = min(t - context, cfg.order)
        while True:
            row = alphabet.row_index(notes[-k:])
            if not classes[k - 1].is_dead(row):
                notes.append(_pick(cumulative(k, row), src.next()))
                break

            state = alphabet.label(notes[-k:])
            if cfg.dead_end_policy is types.DeadEndPolicy.ERROR:
                raise DeadEndRow(f"State {state} at note {t} has no successors.", state, t)
            action = (
                "backoff"
                if cfg.dead_end_policy is types.DeadEndPolicy.BACKOFF and k > 1
                else "restart"
            )
            events.append(types.PolicyEvent(position=t, state=state, action=action, order=k))
            LOG.warning("Dead-end state.", state=state, position=t, order=k, action=action)
            if action == "backoff":
                k -= 1
                continue
            notes.append(start)
            context = t
            break

    return types.GenerationResult(
        sequence=NoteSequence(alphabet=alphabet, notes=tuple(notes)),
        events=events,
        uniforms=src.consumed - consumed_before,
        seed=getattr(src, "seed", cfg.seed),
        rng_id=src.rng_id,
    )


def generate_snca(
    model1: TransitionMatrix, cfg: types.GeneratorConfig, src: types.Uniforms
) -> types.GenerationResult:
    """Order-1 generation (SNCA)."""
    if cfg.order != 1:
        raise errors.UsageError("SNCA generates with an order-1 configuration.")
    return generate([model1], cfg, src)


def generate_snca2(
    model1: TransitionMatrix,
    model2: TransitionMatrix,
    cfg: types.GeneratorConfig,
    src: types.Uniforms,
) -> types.GenerationResult:
    """Order-2 generation with the order-1 bootstrap of the second note (SNCA2)."""
    if cfg.order != 2:
        raise errors.UsageError("SNCA2 generates with an order-2 configuration.")
    return generate([model1, model2], cfg, src)


def empirical_tpm(seq: NoteSequence, order: int) -> TransitionMatrix:
    """Re-estimate an order-k tpm from a single sequence."""
    return model_service.to_tpm(model_service.count_transitions([seq], order))


def validate_sequence(tpm: TransitionMatrix, seq: NoteSequence) -> types.ValidationReport:
    """Check the transitions of `seq` against the support and frequencies of `tpm`."""
    if seq.alphabet != tpm.alphabet:
        raise errors.UsageError("The sequence and the model use different alphabets.")
    counts = model_service.count_transitions([seq], tpm.order)
    unsupported = counts.counts * (tpm.numerators == 0)
    violating_rows = np.flatnonzero(unsupported.sum(axis=1))

    empirical = model_service.to_tpm(counts)
    both = np.flatnonzero(empirical.observed & tpm.observed)
    l1 = np.abs(empirical.array[both] - tpm.array[both]).sum(axis=1)

    return types.ValidationReport(
        order=tpm.order,
        transitions=int(counts.counts.sum()),
        violations=int(unsupported.sum()),
        violating_states=[tpm.row_label(int(r)) for r in violating_rows],
        row_l1={tpm.row_label(int(r)): float(d) for r, d in zip(both, l1)},
    )
