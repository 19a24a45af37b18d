"""
Note sequence parsing, formatting and pitch mapping.
"""

import re
import textwrap

import orjson
import pydantic_core

from src import errors
from src import log
from src import storage

from . import types

__all__ = [
    "Error",
    "UnknownSymbol",
    "EmptySequence",
    "EmptyCorpus",
    "InvalidAlphabet",
    "parse_sequence",
    "parse_corpus",
    "format_sequence",
    "pitch_of",
    "to_pitch_track",
    "load_alphabet",
]

LOG = log.get_logger(__name__)

_BLOCK_RE = re.compile(r"[^\n]*\S[^\n]*(?:\n[^\n]*\S[^\n]*)*")
"""A run of non-blank lines, i.e. one sequence of a corpus file."""


class Error(errors.Error):
    """The corpus error."""


class UnknownSymbol(Error):
    """Raised when the text contains a token outside the alphabet."""

    code = "UNKNOWN_SYMBOL"

    def __init__(self, position: int, fragment: str, line: int, column: int) -> None:
        """
        :param position: The 0-based character offset in the text.
        :param fragment: The offending character.
        """
        self.position = position
        self.fragment = fragment
        self.line = line
        self.column = column
        super().__init__(
            f"Unknown symbol {fragment!r} at position {position} (line {line}, column {column})."
        )


class EmptySequence(Error):
    """Raised when an operation needs at least one note."""

    code = "EMPTY_SEQUENCE"


class EmptyCorpus(Error):
    """Raised when a corpus holds no notes at all."""

    code = "EMPTY_CORPUS"


class InvalidAlphabet(Error):
    """Raised when an alphabet file cannot be decoded."""

    code = "SCHEMA_MISMATCH"


def _location(text: str, position: int) -> tuple[int, int]:
    line = text.count("\n", 0, position) + 1
    column = position - (text.rfind("\n", 0, position) + 1) + 1
    return line, column


def _tokenize(
    text: str, alphabet: types.Alphabet, skip_unknown: bool, start: int, end: int
) -> list[types.Note]:
    # Longest labels first, so "Sa" wins over "S" when both exist.
    labels = sorted(alphabet.symbols, key=len, reverse=True)
    single = alphabet.separator == ""
    notes: list[types.Note] = []
    i = start
    while i < end:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if single:
            match = c if c in alphabet.indices else None
        else:
            match = next((lb for lb in labels if text.startswith(lb, i, end)), None)
        if match is not None:
            notes.append(alphabet.indices[match])
            i += len(match)
            continue

        line, column = _location(text, i)
        if not skip_unknown:
            raise UnknownSymbol(i, c, line, column)
        LOG.warning("Skipped unknown symbol.", symbol=c, position=i, line=line, column=column)
        i += 1
    return notes


def parse_sequence(
    text: str, alphabet: types.Alphabet, skip_unknown: bool = False
) -> types.NoteSequence:
    """Parse a note string, whitespace and newlines are ignored.

    :raises :class:`UnknownSymbol` unless `skip_unknown` is set.
    """
    notes = _tokenize(text, alphabet, skip_unknown, 0, len(text))
    return types.NoteSequence(alphabet=alphabet, notes=tuple(notes))


def parse_corpus(
    text: str, alphabet: types.Alphabet, skip_unknown: bool = False
) -> list[types.NoteSequence]:
    """Parse a corpus file: sequences are separated by blank lines.

    :raises :class:`UnknownSymbol` unless `skip_unknown` is set.
    :raises :class:`EmptyCorpus` when no note is found.
    """
    corpus = [
        types.NoteSequence(
            alphabet=alphabet,
            notes=tuple(_tokenize(text, alphabet, skip_unknown, m.start(), m.end())),
        )
        for m in _BLOCK_RE.finditer(text)
    ]
    corpus = [seq for seq in corpus if len(seq)]
    if not corpus:
        raise EmptyCorpus("The corpus contains no notes.")
    LOG.debug("Parsed corpus.", sequences=len(corpus), notes=sum(len(s) for s in corpus))
    return corpus


def format_sequence(seq: types.NoteSequence, width: int | None = None) -> str:
    """Render a sequence the way it is parsed, optionally wrapped at `width` columns."""
    sep = seq.alphabet.separator
    text = sep.join(seq.symbols())
    if not width:
        return text
    if sep:
        return textwrap.fill(text, width=width, break_long_words=False)
    return "\n".join(text[i : i + width] for i in range(0, len(text), width))


def pitch_of(note: types.Note, octave_shift: int, table: types.PitchTable) -> int:
    """The semitone of `note` in the octave `octave_shift` relative to the tonic."""
    return table.offset(note) + types.OCTAVE * octave_shift


_SHIFTS = (0, -1, 1)
"""Candidate octave shifts in tie-break order."""


def to_pitch_track(
    seq: types.NoteSequence,
    table: types.PitchTable,
    tonic_reference: int = 0,
    anchor: int | None = None,
) -> list[int]:
    """Assign every note the octave nearest to the previous pitch.

    The first note sits in the middle octave, or nearest to `anchor` when
    continuing an earlier track. Ties prefer the middle octave, then the lower one.
    `tonic_reference` is added to every value, e.g. 60 for MIDI numbers.

    :raises :class:`EmptySequence`
    """
    if not len(seq):
        raise EmptySequence("Cannot build a pitch track of an empty sequence.")

    track: list[int] = []
    notes = list(seq.notes)
    if anchor is None:
        track.append(pitch_of(notes.pop(0), 0, table))
        previous = track[0]
    else:
        previous = anchor
    for note in notes:
        previous = min(
            (pitch_of(note, s, table) for s in _SHIFTS),
            key=lambda p: abs(p - previous),  # noqa: B023
        )
        track.append(previous)
    return [p + tonic_reference for p in track]


def load_alphabet(key: str) -> types.AlphabetFile:
    """Read an alphabet definition file.

    :raises :class:`InvalidAlphabet`
    :raises :class:`storage.Error`
    """
    try:
        return types.AlphabetFile(**orjson.loads(storage.default.get(key)))
    except (orjson.JSONDecodeError, TypeError) as err:
        raise InvalidAlphabet(f"Cannot decode the alphabet file {key}: {err}")
    except pydantic_core.ValidationError as err:
        raise InvalidAlphabet(f"Invalid alphabet file {key}: {err.errors()[0]['msg']}")
