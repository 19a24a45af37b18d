"""
Estimation of order-k transition counts, tpm normalization and class matrices.
"""

from collections.abc import Sequence
from fractions import Fraction

import numpy as np

from src import errors
from src import log
from src.app.corpus import service as corpus_service
from src.app.corpus.types import Alphabet
from src.app.corpus.types import NoteSequence
from src.config import config

from . import types

__all__ = [
    "Error",
    "OrderTooLarge",
    "count_transitions",
    "to_tpm",
    "to_class_matrix",
    "sparsity",
    "dead_end_rows",
]

LOG = log.get_logger(__name__)


class Error(errors.Error):
    """The model error."""


class OrderTooLarge(Error):
    """Raised when K**k rows exceed the configured limit."""

    code = "ORDER_TOO_LARGE"


def check_order(alphabet: Alphabet, order: int, max_rows: int | None = None) -> int:
    """Return the row count K**k of an order-k model.

    :raises :class:`errors.UsageError` for k < 1.
    :raises :class:`OrderTooLarge`
    """
    if order < 1:
        raise errors.UsageError(f"The model order must be at least 1, got {order}.")
    limit = max_rows if max_rows is not None else config.max_rows
    n_rows = alphabet.size**order
    if n_rows > limit:
        raise OrderTooLarge(
            f"An order-{order} model over {alphabet.size} symbols has {n_rows} rows,"
            f" the limit is {limit}."
        )
    return n_rows


def count_transitions(
    corpus: Sequence[NoteSequence], order: int, max_rows: int | None = None
) -> types.CountMatrix:
    """Count the k-tuple -> next note transitions of a corpus.

    Sequences are counted separately, so no transition spans two sequences,
    and the final k-tuple of every sequence adds nothing to the row totals.
    Sequences shorter than k + 1 notes are skipped.

    :raises :class:`corpus_service.EmptyCorpus`
    :raises :class:`OrderTooLarge`
    """
    if not corpus:
        raise corpus_service.EmptyCorpus("The corpus contains no sequences.")
    alphabet = corpus[0].alphabet
    if any(seq.alphabet != alphabet for seq in corpus):
        raise errors.UsageError("All corpus sequences must share one alphabet.")

    n_rows = check_order(alphabet, order, max_rows)
    size = alphabet.size
    counts = np.zeros((n_rows, size), dtype=np.int64)
    skipped = 0
    for seq in corpus:
        if len(seq) <= order:
            skipped += 1
            continue
        notes = np.asarray(seq.notes, dtype=np.int64)
        rows = np.zeros(len(notes) - order, dtype=np.int64)
        for i in range(order):
            rows = rows * size + notes[i : len(notes) - order + i]
        np.add.at(counts, (rows, notes[order:]), 1)

    if skipped:
        LOG.warning("Skipped short sequences.", skipped=skipped, order=order)
    LOG.debug("Counted transitions.", order=order, sequences=len(corpus), rows=n_rows)
    return types.CountMatrix(
        alphabet=alphabet, order=order, counts=counts, skipped_sequences=skipped
    )


def to_tpm(counts: types.CountMatrix) -> types.TransitionMatrix:
    """Normalize counts row by row: `counts[row] / row_totals[row]`, zero rows stay zero."""
    return types.TransitionMatrix(
        alphabet=counts.alphabet,
        order=counts.order,
        numerators=counts.counts,
        denominators=counts.row_totals,
    )


def to_class_matrix(tpm: types.TransitionMatrix) -> types.ClassMatrix:
    """Build the running-sum intervals of every row in alphabet column order."""
    cumulative = np.zeros((tpm.n_rows, tpm.alphabet.size + 1), dtype=np.int64)
    np.cumsum(tpm.numerators, axis=1, out=cumulative[:, 1:])
    return types.ClassMatrix(
        alphabet=tpm.alphabet,
        order=tpm.order,
        cumulative=cumulative,
        denominators=tpm.denominators,
    )


def sparsity(tpm: types.TransitionMatrix, include_unobserved_rows: bool = True) -> Fraction:
    """The fraction of zero entries, over all rows or over the observed rows only."""
    numerators = tpm.numerators if include_unobserved_rows else tpm.numerators[tpm.observed]
    if not numerators.size:
        return Fraction(0)
    return Fraction(int((numerators == 0).sum()), int(numerators.size))


def dead_end_rows(tpm: types.TransitionMatrix) -> int:
    """The number of all-zero rows."""
    return int((~tpm.observed).sum())
