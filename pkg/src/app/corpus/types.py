import functools
import typing
from collections.abc import Sequence

from pydantic import BaseModel
from pydantic import ConfigDict
from pydantic import Field
from pydantic import field_validator
from pydantic import model_validator

__all__ = ["Note", "Alphabet", "NoteSequence", "PitchTable", "AlphabetFile"]

Note = typing.NewType("Note", int)
"""The index of a symbol in its alphabet."""

OCTAVE = 12


class Alphabet(BaseModel):
    """
    The ordered symbol set of a raga.

    The order of `symbols` fixes the note indices, the column order of every
    matrix and the row-major order of state tuples.
    """

    model_config = ConfigDict(frozen=True)

    id: str = Field(default="custom", description="The alphabet identifier.")
    symbols: tuple[str, ...] = Field(..., description="The ordered symbol labels.")

    @field_validator("symbols")
    @classmethod
    def check_symbols(cls, symbols: tuple[str, ...]) -> tuple[str, ...]:
        if len(symbols) < 2:
            raise ValueError("An alphabet needs at least two symbols.")
        if len(set(symbols)) != len(symbols):
            raise ValueError("The alphabet symbols must be unique.")
        for s in symbols:
            if not s or any(c.isspace() for c in s):
                raise ValueError(f"Invalid symbol {s!r}: empty or contains whitespace.")
        return symbols

    @property
    def size(self) -> int:
        return len(self.symbols)

    @functools.cached_property
    def indices(self) -> dict[str, Note]:
        return {s: Note(i) for i, s in enumerate(self.symbols)}

    @property
    def separator(self) -> str:
        """Symbols are written contiguously unless some label is multi-character."""
        return "" if all(len(s) == 1 for s in self.symbols) else " "

    def index(self, symbol: str) -> Note:
        """Resolve a symbol label, raising `KeyError` for foreign symbols."""
        return self.indices[symbol]

    def symbol(self, note: int) -> str:
        return self.symbols[note]

    def label(self, notes: Sequence[int]) -> str:
        """Render a state tuple, e.g. `(5, 0)` -> `"DS"`."""
        return self.separator.join(self.symbols[n] for n in notes)

    def state_tuple(self, row: int, order: int) -> tuple[Note, ...]:
        """Decode a row-major row index into its state tuple."""
        notes: list[Note] = []
        for _ in range(order):
            row, n = divmod(row, self.size)
            notes.append(Note(n))
        return tuple(reversed(notes))

    def row_index(self, notes: Sequence[int]) -> int:
        """Encode a state tuple, `sum(notes[i] * K**(k-1-i))`."""
        row = 0
        for n in notes:
            row = row * self.size + n
        return row

    def state_labels(self, order: int) -> list[str]:
        return [self.label(self.state_tuple(r, order)) for r in range(self.size**order)]


class NoteSequence(BaseModel):
    """An ordered list of notes over an alphabet."""

    model_config = ConfigDict(frozen=True)

    alphabet: Alphabet
    notes: tuple[Note, ...] = ()

    @model_validator(mode="after")
    def check_notes(self) -> "NoteSequence":
        k = self.alphabet.size
        for pos, n in enumerate(self.notes):
            if not 0 <= n < k:
                raise ValueError(f"Note index {n} at position {pos} is outside [0, {k}).")
        return self

    def __len__(self) -> int:
        return len(self.notes)

    def symbols(self) -> list[str]:
        return [self.alphabet.symbols[n] for n in self.notes]


class PitchTable(BaseModel):
    """Semitone offsets of the alphabet symbols within one octave above the tonic."""

    model_config = ConfigDict(frozen=True)

    alphabet: Alphabet
    offsets: dict[str, int]

    @model_validator(mode="after")
    def check_offsets(self) -> "PitchTable":
        if set(self.offsets) != set(self.alphabet.symbols):
            missing = sorted(set(self.alphabet.symbols) - set(self.offsets))
            extra = sorted(set(self.offsets) - set(self.alphabet.symbols))
            raise ValueError(f"Offsets do not match the alphabet: missing={missing} extra={extra}")
        for symbol, offset in self.offsets.items():
            if not 0 <= offset < OCTAVE:
                raise ValueError(f"The offset of {symbol!r} must be within [0, 12), got {offset}.")
        return self

    def offset(self, note: int) -> int:
        return self.offsets[self.alphabet.symbols[note]]


class AlphabetFile(BaseModel):
    """
    The alphabet definition file.

    Example::

        {"id": "bageshree", "symbols": ["S", "R", "g", "M", "P", "D", "n"],
         "offsets": {"S": 0, "R": 2, "g": 3, "M": 5, "P": 7, "D": 9, "n": 10},
         "tonic": "S"}
    """

    id: str = Field(default="custom", description="The alphabet identifier.")
    symbols: list[str] = Field(..., description="The ordered symbol labels.")
    offsets: dict[str, int] = Field(..., description="Semitone offsets above the tonic.")
    tonic: str | None = Field(default=None, description="The tonic symbol, the first by default.")

    @functools.cached_property
    def alphabet(self) -> Alphabet:
        return Alphabet(id=self.id, symbols=tuple(self.symbols))

    @functools.cached_property
    def pitch_table(self) -> PitchTable:
        return PitchTable(alphabet=self.alphabet, offsets=self.offsets)

    @property
    def tonic_note(self) -> Note:
        return self.alphabet.index(self.tonic) if self.tonic else Note(0)

    @model_validator(mode="after")
    def check_definition(self) -> "AlphabetFile":
        # Building the derived models runs their validators.
        self.pitch_table  # noqa: B018
        if self.tonic is not None and self.tonic not in self.symbols:
            raise ValueError(f"The tonic {self.tonic!r} is not an alphabet symbol.")
        return self
