import numpy as np
from pydantic import BaseModel
from pydantic import ConfigDict
from pydantic import Field
from pydantic import model_validator

__all__ = ["ChainReport", "LimitingResult", "SweepRow", "OrderSweep"]


class ChainReport(BaseModel):
    """Chain-theoretic diagnostics of a tpm."""

    order: int
    states: list[str] = Field(..., description="The analyzed states, rows with successors.")
    excluded_states: list[str] = Field(
        default_factory=list, description="All-zero rows left out of the analysis."
    )
    ergodic: bool
    regular: bool
    regularity_power: int | None = Field(
        default=None, description="The smallest n with an all-positive n-th power."
    )
    stationary: list[float] | None = Field(default=None, description="The fixed vector w.")
    convergence_power: int | None = Field(
        default=None, description="The first power meeting the tolerance."
    )
    tolerance: float
    sparsity: float
    dead_end_rows: int

    @model_validator(mode="after")
    def check_implications(self) -> "ChainReport":
        if self.regular and not self.ergodic:
            raise ValueError("A regular chain is always ergodic.")
        if self.stationary is not None and abs(sum(self.stationary) - 1.0) > 1e-9:
            raise ValueError("The stationary vector must sum to 1.")
        if self.regular and self.stationary is not None and min(self.stationary) <= 0.0:
            raise ValueError("The stationary vector of a regular chain is positive.")
        return self


class LimitingResult(BaseModel):
    """The limiting matrix W = lim A**n and its common row w."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    matrix: np.ndarray
    power: int
    vector: np.ndarray
    states: list[str]


class SweepRow(BaseModel):
    order: int
    sparsity: float
    dead_end_rows: int
    rows: int


class OrderSweep(BaseModel):
    rows: list[SweepRow]

    @property
    def sparsity_monotonic(self) -> bool:
        """Whether sparsity never decreases with the order."""
        values = [r.sparsity for r in self.rows]
        return all(a <= b for a, b in zip(values, values[1:]))
