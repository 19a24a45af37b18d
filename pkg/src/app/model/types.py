import functools
from fractions import Fraction

import numpy as np
from pydantic import BaseModel
from pydantic import ConfigDict
from pydantic import Field
from pydantic import field_validator
from pydantic import model_validator

from src.app.corpus.types import Alphabet

__all__ = ["CountMatrix", "TransitionMatrix", "ClassMatrix", "ModelFile", "ModelRow"]


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=np.int64)
    array.setflags(write=False)
    return array


class _Matrix(BaseModel):
    """Common part of the order-k matrices: K**k rows over an alphabet of K columns."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    alphabet: Alphabet
    order: int = Field(..., ge=1, description="The model order k.")

    @property
    def n_rows(self) -> int:
        return int(self.alphabet.size**self.order)

    @property
    def shape(self) -> tuple[int, int]:
        return self.n_rows, self.alphabet.size

    def row_label(self, row: int) -> str:
        return self.alphabet.label(self.alphabet.state_tuple(row, self.order))

    def _arrays(self) -> tuple[np.ndarray, ...]:
        raise NotImplementedError

    def __eq__(self, other: object) -> bool:
        if type(other) is not type(self):
            return NotImplemented
        assert isinstance(other, _Matrix)
        return (
            self.alphabet == other.alphabet
            and self.order == other.order
            and all(np.array_equal(a, b) for a, b in zip(self._arrays(), other._arrays()))
        )


class CountMatrix(_Matrix):
    """
    Transition counts from k-tuples of notes to the next note.

    `counts[row, c]` is the number of positions where the tuple of `row` is
    immediately followed by note `c`. Row totals therefore exclude the
    occurrences of a tuple at the end of a sequence.
    """

    counts: np.ndarray
    skipped_sequences: int = Field(default=0, description="Sequences shorter than k + 1.")

    @field_validator("counts", mode="before")
    @classmethod
    def freeze(cls, value: np.ndarray) -> np.ndarray:
        return _frozen(value)

    @model_validator(mode="after")
    def check_counts(self) -> "CountMatrix":
        if self.counts.shape != self.shape:
            raise ValueError(f"Expected a {self.shape} count matrix, got {self.counts.shape}.")
        if (self.counts < 0).any():
            raise ValueError("Transition counts must be non-negative.")
        return self

    @functools.cached_property
    def row_totals(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    def _arrays(self) -> tuple[np.ndarray, ...]:
        return (self.counts,)


class TransitionMatrix(_Matrix):
    """
    The row-stochastic transition probability matrix (tpm), kept exact.

    `probs[row, c] = numerators[row, c] / denominators[row]`. A row with a zero
    denominator is an all-zero row: its tuple was never followed by a note.
    """

    numerators: np.ndarray
    denominators: np.ndarray

    @field_validator("numerators", "denominators", mode="before")
    @classmethod
    def freeze(cls, value: np.ndarray) -> np.ndarray:
        return _frozen(value)

    @model_validator(mode="after")
    def check_rows(self) -> "TransitionMatrix":
        if self.numerators.shape != self.shape:
            raise ValueError(f"Expected a {self.shape} matrix, got {self.numerators.shape}.")
        if self.denominators.shape != (self.n_rows,):
            raise ValueError(f"Expected {self.n_rows} row denominators.")
        if (self.numerators < 0).any() or (self.denominators < 0).any():
            raise ValueError("Probabilities must be non-negative.")
        sums = self.numerators.sum(axis=1)
        bad = np.flatnonzero(sums != self.denominators)
        if bad.size:
            row = int(bad[0])
            raise ValueError(
                f"Row {self.row_label(row)} sums to "
                f"{Fraction(int(sums[row]), max(int(self.denominators[row]), 1))}, not 1 or 0."
            )
        return self

    def prob(self, row: int, col: int) -> Fraction:
        den = int(self.denominators[row])
        return Fraction(int(self.numerators[row, col]), den) if den else Fraction(0)

    def row(self, row: int) -> list[Fraction]:
        return [self.prob(row, c) for c in range(self.alphabet.size)]

    @functools.cached_property
    def array(self) -> np.ndarray:
        """The float view, all-zero rows stay zero."""
        den = self.denominators.astype(np.float64)
        out = np.zeros(self.shape, dtype=np.float64)
        np.divide(self.numerators, den[:, None], out=out, where=den[:, None] > 0)
        return out

    @functools.cached_property
    def observed(self) -> np.ndarray:
        """The mask of rows with at least one successor."""
        return self.denominators > 0

    def _arrays(self) -> tuple[np.ndarray, ...]:
        return self.numerators, self.denominators


class ClassMatrix(_Matrix):
    """
    Cumulative-probability classes of a tpm, used for inverse-transform sampling.

    Column `c` of `row` owns the half-open interval
    `[cumulative[row, c], cumulative[row, c + 1]) / denominators[row]`.
    """

    cumulative: np.ndarray
    denominators: np.ndarray

    @field_validator("cumulative", "denominators", mode="before")
    @classmethod
    def freeze(cls, value: np.ndarray) -> np.ndarray:
        return _frozen(value)

    @model_validator(mode="after")
    def check_cumulative(self) -> "ClassMatrix":
        if self.cumulative.shape != (self.n_rows, self.alphabet.size + 1):
            raise ValueError("Unexpected cumulative matrix shape.")
        if (np.diff(self.cumulative, axis=1) < 0).any() or (self.cumulative[:, 0] != 0).any():
            raise ValueError("Cumulative bounds must start at 0 and be non-decreasing.")
        if (self.cumulative[:, -1] != self.denominators).any():
            raise ValueError("Cumulative bounds must end at 1 or stay 0.")
        return self

    def is_dead(self, row: int) -> bool:
        return not self.denominators[row]

    def interval(self, row: int, col: int) -> tuple[Fraction, Fraction]:
        den = int(self.denominators[row])
        if not den:
            return Fraction(0), Fraction(0)
        lo, hi = self.cumulative[row, col : col + 2]
        return Fraction(int(lo), den), Fraction(int(hi), den)

    def intervals(self, row: int) -> list[tuple[Fraction, Fraction]]:
        return [self.interval(row, c) for c in range(self.alphabet.size)]

    def _arrays(self) -> tuple[np.ndarray, ...]:
        return self.cumulative, self.denominators


class ModelAlphabet(BaseModel):
    id: str = "custom"
    symbols: list[str]


class ModelRow(BaseModel):
    """One matrix row of a model file."""

    state: str = Field(..., alias="tuple", description="The state tuple label, e.g. 'DS'.")
    total: int = Field(default=0, ge=0, description="The number of observed successors.")
    counts: dict[str, int | str] = Field(
        default_factory=dict, description="Integer counts or 'num/den' probabilities by symbol."
    )

    class Config:
        """Configuration for the Pydantic model."""

        populate_by_name = True


class ModelFile(BaseModel):
    """
    The model file schema.

    Integer `counts` describe a CountMatrix, "num/den" strings a TransitionMatrix.
    Rows missing from the file are all-zero rows.
    """

    alphabet: ModelAlphabet
    order: int = Field(..., ge=1)
    rows: list[ModelRow] = Field(default_factory=list)
