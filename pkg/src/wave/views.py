import math
from dataclasses import dataclass, field
from typing import Callable, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.fuzzy.fuzzy_number import DEFAULT_GRID, AlphaGrid, FuzzyNumber, alpha_cut

AlphaEvaluator = Callable[[float], float]
ProfileEvaluator = Callable[[float, float], float]

# Square sides printed alongside the published surfaces, keyed by highest series index.
PUBLISHED_SQUARE_SIDES = {1: 0.78, 2: 0.525, 3: 0.39996}


@dataclass(frozen=True)
class GeneralLevelProblem:
    """Levelwise data of a fuzzy wave problem on [0, length].

    Boundary level functions c11/c12 (at x=0) and c21/c22 (at x=length) take alpha.
    Initial displacement f1/f2 and velocity g1/g2 take (x, alpha).
    """

    c: float
    length: float
    c11: AlphaEvaluator
    c12: AlphaEvaluator
    c21: AlphaEvaluator
    c22: AlphaEvaluator
    f1: ProfileEvaluator
    f2: ProfileEvaluator
    g1: ProfileEvaluator
    g2: ProfileEvaluator
    grid: AlphaGrid = DEFAULT_GRID
    sample_points: int = 11


@dataclass(frozen=True)
class WaveProblem:
    """u_tt = c^2 u_xx on [0, length] with zero boundaries, u(x,0) = U0 and u_t(x,0) = 0.

    The solution kernel is truncated after the series index m (m + 1 terms).
    """

    U0: FuzzyNumber
    m: int = 0
    c: float = 1.0
    length: float = math.pi

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError(f"wave speed c must be positive, got {self.c}")
        if not self.length > 0:
            raise ValueError(f"spatial length must be positive, got {self.length}")
        if int(self.m) != self.m or self.m < 0:
            raise ValueError(f"series index m must be a non-negative integer, got {self.m}")
        object.__setattr__(self, "m", int(self.m))

    @property
    def is_canonical(self) -> bool:
        return self.c == 1.0 and self.length == math.pi

    def as_general(self) -> GeneralLevelProblem:
        U0 = self.U0
        return GeneralLevelProblem(
            c=self.c,
            length=self.length,
            c11=lambda a: 0.0,
            c12=lambda a: 0.0,
            c21=lambda a: 0.0,
            c22=lambda a: 0.0,
            f1=lambda x, a: alpha_cut(U0, a).lo,
            f2=lambda x, a: alpha_cut(U0, a).hi,
            g1=lambda x, a: 0.0,
            g2=lambda x, a: 0.0,
            grid=U0.grid,
        )


@dataclass(frozen=True)
class CrispLevelProblem:
    """One crisp wave problem of the levelwise system, parameterized by alpha"""

    level: Literal["lower", "upper"]
    c: float
    length: float
    left_boundary: Callable[[float, float], float]
    right_boundary: Callable[[float, float], float]
    displacement: ProfileEvaluator
    velocity: ProfileEvaluator
    equation: str = field(default="u_tt = c^2 u_xx")

    def describe(self, alpha: float, xs: tuple[float, ...] = ()) -> dict:
        return {
            "level": self.level,
            "equation": self.equation,
            "c": self.c,
            "length": self.length,
            "alpha": alpha,
            "left_boundary": self.left_boundary(0.0, alpha),
            "right_boundary": self.right_boundary(0.0, alpha),
            "displacement": [self.displacement(x, alpha) for x in xs],
            "velocity": [self.velocity(x, alpha) for x in xs],
        }


class Violation(BaseModel):
    model_config = ConfigDict(frozen=True)

    x: float
    t: float
    z: float
    alpha: Optional[float] = None
    du1_dalpha: Optional[float] = None
    du2_dalpha: Optional[float] = None


class SSolutionReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    m: int
    x_max: float
    t_max: float
    step: float
    epsilon: float
    points: int
    passed: bool
    vacuous: bool = False
    first_violation: Optional[Violation] = None
    notes: list[str] = Field(default_factory=list)


class ValidityDomain(BaseModel):
    """A region [0, x_max] x [0, t_max] on which the truncated kernel is non-negative"""

    model_config = ConfigDict(frozen=True)

    m: int
    kind: Literal["square", "rectangle"]
    s: Optional[float] = None
    x_max: float
    t_max: float
    epsilon: float
    resolution: float
    refine_tol: Optional[float] = None
    certified: bool
    oracle: Optional[float] = None
    published_value: Optional[float] = None
    published_check: Optional[Violation] = None
    notes: list[str] = Field(default_factory=list)

    @model_validator(mode="after")
    def _within_base_square(self):
        for name in ("x_max", "t_max"):
            v = getattr(self, name)
            if not 0.0 <= v <= math.pi:
                raise ValueError(f"{name}={v} lies outside [0, pi]")
        return self

    def to_dict(self) -> dict:
        data = {"m": self.m, "kind": self.kind}
        if self.kind == "square":
            data["s"] = self.s
        data.update(
            {
                "x_max": self.x_max,
                "t_max": self.t_max,
                "epsilon": self.epsilon,
                "resolution": self.resolution,
                "certified": self.certified,
                "oracle": self.oracle,
            }
        )
        if self.refine_tol is not None:
            data["refine_tol"] = self.refine_tol
        if self.published_value is not None:
            data["published_value"] = self.published_value
        if self.published_check is not None:
            data["published_check"] = self.published_check.model_dump()
        if self.notes:
            data["notes"] = list(self.notes)
        return data
