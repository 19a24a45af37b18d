import enum
import typing

import numpy as np
from pydantic import BaseModel
from pydantic import ConfigDict
from pydantic import Field
from pydantic import model_validator

from src.app.corpus.types import Note
from src.app.corpus.types import NoteSequence

__all__ = [
    "DeadEndPolicy",
    "StartMode",
    "GeneratorConfig",
    "PolicyEvent",
    "GenerationResult",
    "Uniforms",
    "UniformSource",
    "ValidationReport",
]

MAX_SEED = 2**64


class DeadEndPolicy(enum.StrEnum):
    """What a generator does in a state whose row has no successors."""

    ERROR = "error"
    BACKOFF = "backoff"
    RESTART = "restart"


class StartMode(enum.StrEnum):
    """How the first note is chosen."""

    TONIC = "tonic"
    UNCONDITIONAL = "unconditional"


class GeneratorConfig(BaseModel):
    """The parameters of one generator run."""

    model_config = ConfigDict(frozen=True)

    order: int = Field(default=1, ge=1, description="The order of the sampling model.")
    length: int = Field(default=1000, ge=1, description="The number of notes to emit.")
    start_note: Note = Field(default=Note(0), ge=0, description="The first note, the tonic.")
    start_mode: StartMode = Field(default=StartMode.TONIC)
    seed: int = Field(default=0, ge=0, lt=MAX_SEED, description="The uniform source seed.")
    dead_end_policy: DeadEndPolicy = Field(default=DeadEndPolicy.BACKOFF)
    allow_high_order: bool = Field(
        default=False, description="Allow orders above 2, which produce very sparse models."
    )

    @model_validator(mode="after")
    def check_order(self) -> "GeneratorConfig":
        if self.order > 2 and not self.allow_high_order:
            raise ValueError(f"Order {self.order} generation needs `allow_high_order`.")
        return self


class PolicyEvent(BaseModel):
    """A dead-end repair made by the generator."""

    position: int = Field(..., description="The index of the note being generated.")
    state: str = Field(..., description="The label of the dead state tuple.")
    action: typing.Literal["backoff", "restart"]
    order: int = Field(..., description="The order of the dead row.")


class GenerationResult(BaseModel):
    sequence: NoteSequence
    events: list[PolicyEvent] = Field(default_factory=list)
    uniforms: int = Field(..., description="The number of uniforms consumed.")
    seed: int
    rng_id: str


class Uniforms(typing.Protocol):
    """A deterministic stream of values in [0, 1)."""

    rng_id: str
    consumed: int

    def next(self) -> float: ...


class UniformSource:
    """
    Seeded uniform variates from numpy's PCG64 bit generator.

    Values are drawn in blocks; the stream is the same for any block size.
    """

    rng_id = "numpy.PCG64"

    def __init__(self, seed: int, block: int = 4096) -> None:
        if not 0 <= seed < MAX_SEED:
            raise ValueError(f"The seed must be a 64-bit unsigned integer, got {seed}.")
        self.seed = seed
        self.consumed = 0
        self._rng = np.random.Generator(np.random.PCG64(seed))
        self._block = block
        self._buffer: list[float] = []
        self._pos = 0

    def next(self) -> float:
        if self._pos == len(self._buffer):
            self._buffer = self._rng.random(self._block).tolist()
            self._pos = 0
        u = self._buffer[self._pos]
        self._pos += 1
        self.consumed += 1
        return u


class ValidationReport(BaseModel):
    """Support soundness and frequency distance of a sequence against a model."""

    order: int
    transitions: int = Field(..., description="The number of (k+1)-grams checked.")
    violations: int = Field(..., description="Transitions without support in the model.")
    violating_states: list[str] = Field(default_factory=list)
    row_l1: dict[str, float] = Field(
        default_factory=dict, description="L1 distance per state observed in both."
    )

    @property
    def max_l1(self) -> float:
        return max(self.row_l1.values(), default=0.0)

    def passed(self, max_l1: float | None = None) -> bool:
        return not self.violations and (max_l1 is None or self.max_l1 < max_l1)
