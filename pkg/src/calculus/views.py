from enum import Enum
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.fuzzy.fuzzy_number import AlphaGrid, FuzzyNumber, Interval, alpha_cut
from src.fuzzy.views import ValidityReport


class Classification(str, Enum):
    SEIKKALA = "Seikkala"
    GS_ONLY = "gS_only"
    NONE = "none"


class SufficientConditions(BaseModel):
    """Sufficient conditions for the Seikkala derivative, checked on the alpha grid"""

    model_config = ConfigDict(frozen=True)

    lower_increasing: bool
    upper_decreasing: bool
    core_ordered: bool

    @property
    def all_hold(self) -> bool:
        return self.lower_increasing and self.upper_decreasing and self.core_ordered


class DerivativeDiagnostics(BaseModel):
    model_config = ConfigDict(frozen=True)

    seikkala: ValidityReport
    gs: Optional[ValidityReport] = None
    sufficient: SufficientConditions
    case: Optional[Literal["i", "ii", "mixed"]] = None
    notes: list[str] = Field(default_factory=list)


class GsDerivativeResult(BaseModel):
    """Derivative levels of a fuzzy-valued function at one point.

    `lower`/`upper` hold the derivative level functions on `grid`. For a Seikkala
    derivative these are [f1', f2'] as computed; for gS derivatives they are the
    min/max pair.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    operator: str
    at: tuple[float, ...]
    grid: AlphaGrid
    lower: np.ndarray
    upper: np.ndarray
    classification: Classification
    diagnostics: DerivativeDiagnostics

    @property
    def exists(self) -> bool:
        return self.classification != Classification.NONE

    def as_fuzzy_number(self) -> FuzzyNumber:
        return FuzzyNumber(self.grid, self.lower, self.upper)

    def level(self, alpha: float) -> Interval:
        return alpha_cut(self.as_fuzzy_number(), alpha)

    def to_dict(self) -> dict:
        data = {
            "alphas": [float(a) for a in self.grid.levels],
            "lower": [float(v) for v in self.lower],
            "upper": [float(v) for v in self.upper],
            "classification": self.classification.value,
        }
        if len(self.at) == 1:
            data["t"] = self.at[0]
        else:
            data["x"], data["t"] = self.at
        if self.diagnostics.case is not None:
            data["case"] = self.diagnostics.case
        if self.diagnostics.notes:
            data["notes"] = list(self.diagnostics.notes)
        return data
