from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, computed_field, model_validator


class GridSpec(BaseModel):
    """Interior sample grid for finite-difference residuals"""

    model_config = ConfigDict(frozen=True)

    x_min: float = 0.0
    x_max: float
    t_min: float = 0.0
    t_max: float
    step: float = 0.05
    h: float = 1e-3
    order_step: float = 0.05
    alphas: tuple[float, ...] = (0.0, 0.5, 1.0)

    @model_validator(mode="after")
    def _check(self):
        if not (self.x_max >= self.x_min and self.t_max >= self.t_min):
            raise ValueError("grid bounds out of order")
        if not (self.step > 0 and self.h > 0 and self.order_step > 0):
            raise ValueError("grid step, h and order_step must be positive")
        return self


class ResidualReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    max_abs_residual: float
    x_step: float
    t_step: float
    alphas: tuple[float, ...]
    h: float
    worst_point: Optional[tuple[float, float, float]] = None
    # Richardson order of the second-difference operators; None when differences sit at roundoff
    order_estimate: Optional[float] = None
    order_steps: tuple[float, float, float]
    points: int
    skipped: int = 0


class InitialConvergence(BaseModel):
    model_config = ConfigDict(frozen=True)

    x: float
    values: list[float]
    errors: list[float]
    decreasing: bool


class BoundaryReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    m: int
    boundary_max_error: float
    boundary_ok: bool
    velocity_max: float
    velocity_ok: bool
    convergence: list[InitialConvergence]
    convergence_ok: bool
    endpoint_value: float
    gibbs_overshoot: float
    notes: list[str] = Field(default_factory=list)

    @computed_field
    @property
    def passed(self) -> bool:
        return self.boundary_ok and self.velocity_ok and self.convergence_ok


class ScanFailure(BaseModel):
    model_config = ConfigDict(frozen=True)

    x: float
    t: float
    z: float
    condition: str
    alpha_pair: Optional[tuple[float, float]] = None


class ScanReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    m: int
    x_max: float
    t_max: float
    resolution: float
    points: int
    failures: int
    first_failure: Optional[ScanFailure] = None
    crisp: bool = False

    @computed_field
    @property
    def pass_rate(self) -> float:
        return 1.0 if self.points == 0 else (self.points - self.failures) / self.points

    @computed_field
    @property
    def passed(self) -> bool:
        return self.failures == 0


class EquationCheck(BaseModel):
    """gS second partials of the solution against the fuzzy wave equation at one point"""

    model_config = ConfigDict(frozen=True)

    x: float
    t: float
    tt_classification: str
    xx_classification: str
    x_classification: str
    t_classification: str
    max_gap: float
    passed: bool
