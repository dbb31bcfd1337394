from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict


class ConditionResult(BaseModel):
    """Outcome of one characterization condition on sampled level functions"""

    model_config = ConfigDict(frozen=True)

    condition: Literal["i", "ii", "iii", "iv"]
    description: str
    status: Literal["pass", "fail", "assumed"]
    # (alpha, beta) for monotonicity failures, (alpha, alpha) for ordering failures
    first_violation: Optional[tuple[float, float]] = None
    # level values at the violation, in the same order as first_violation
    values: Optional[tuple[float, float]] = None


class ValidityReport(BaseModel):
    """Sampled check of the level-function characterization of a fuzzy number.

    Conditions (i), (ii) and (iv) are scanned on the alpha grid. Condition (iii)
    (right continuity at 0, left continuity elsewhere) cannot be observed from
    finite samples and is always reported as assumed.
    """

    model_config = ConfigDict(frozen=True)

    lower_non_decreasing: ConditionResult
    upper_non_increasing: ConditionResult
    continuity: ConditionResult
    ordered: ConditionResult

    @property
    def ok(self) -> bool:
        return not self.failures()

    def failures(self) -> list[ConditionResult]:
        return [
            c
            for c in (self.lower_non_decreasing, self.upper_non_increasing, self.ordered)
            if c.status == "fail"
        ]

    def summary(self) -> str:
        if self.ok:
            return "valid fuzzy number (continuity assumed)"
        parts = []
        for c in self.failures():
            parts.append(f"condition ({c.condition}) {c.description} violated at alpha pair {c.first_violation}")
        return "; ".join(parts)
