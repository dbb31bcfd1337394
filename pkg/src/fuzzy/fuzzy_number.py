import json
import logging
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from .views import ConditionResult, ValidityReport

logger = logging.getLogger(__name__)

# Monotonicity violations at or below this size are read as ties.
MONOTONE_TOLERANCE = 1e-12
DEFAULT_ALPHA_LEVELS = 101

AlphaEvaluator = Callable[[float], float]


class FuzzyNumberError(ValueError):
    """Level functions that do not characterize a fuzzy number"""

    def __init__(self, report: ValidityReport, message: Optional[str] = None):
        self.report = report
        super().__init__(message or report.summary())


class AlphaDomainError(ValueError):
    pass


@dataclass(frozen=True)
class AlphaGrid:
    levels: tuple[float, ...]

    def __post_init__(self):
        levels = tuple(float(a) for a in self.levels)
        object.__setattr__(self, "levels", levels)
        if len(levels) < 2:
            raise ValueError(f"alpha grid needs at least 2 levels, got {len(levels)}")
        if levels[0] != 0.0 or levels[-1] != 1.0:
            raise ValueError(f"alpha grid must start at 0 and end at 1, got {levels[0]} .. {levels[-1]}")
        steps = np.diff(levels)
        if np.any(steps <= 0):
            k = int(np.flatnonzero(steps <= 0)[0])
            raise ValueError(f"alpha grid must be strictly increasing: {levels[k]} then {levels[k + 1]}")

    @classmethod
    def uniform(cls, n: int = DEFAULT_ALPHA_LEVELS) -> "AlphaGrid":
        if n < 2:
            raise ValueError(f"alpha grid needs at least 2 levels, got {n}")
        return cls(tuple(np.linspace(0.0, 1.0, n)))

    @cached_property
    def array(self) -> np.ndarray:
        arr = np.asarray(self.levels, dtype=float)
        arr.setflags(write=False)
        return arr

    def __len__(self) -> int:
        return len(self.levels)


DEFAULT_GRID = AlphaGrid.uniform()


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise ValueError(f"interval endpoints out of order: lo={self.lo} > hi={self.hi}")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi


@dataclass(frozen=True)
class Shape:
    """Closed-form piecewise-linear descriptor: support [s0, s1], core [c0, c1]"""

    support: tuple[float, float]
    core: tuple[float, float]

    @property
    def kind(self) -> str:
        return "triangular" if self.core[0] == self.core[1] else "trapezoidal"

    def at(self, alpha: float) -> tuple[float, float]:
        s0, s1 = self.support
        c0, c1 = self.core
        return s0 + alpha * (c0 - s0), s1 - alpha * (s1 - c1)

    def scaled(self, lam: float) -> "Shape":
        s0, s1 = self.support
        c0, c1 = self.core
        if lam >= 0:
            return Shape((lam * s0, lam * s1), (lam * c0, lam * c1))
        return Shape((lam * s1, lam * s0), (lam * c1, lam * c0))


@dataclass(frozen=True, eq=False)
class FuzzyNumber:
    """A fuzzy number held as its lower/upper level functions sampled on an alpha grid.

    Construction validates the samples, so every instance satisfies the sampled
    characterization conditions. Arrays are read-only.
    """

    grid: AlphaGrid
    lower: np.ndarray
    upper: np.ndarray
    shape: Optional[Shape] = field(default=None)

    def __post_init__(self):
        lower = np.array(self.lower, dtype=float)
        upper = np.array(self.upper, dtype=float)
        report = validate(lower, upper, self.grid)
        if not report.ok:
            raise FuzzyNumberError(report)
        lower.setflags(write=False)
        upper.setflags(write=False)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def alphas(self) -> np.ndarray:
        return self.grid.array

    def to_dict(self) -> dict:
        return {
            "alphas": [float(a) for a in self.grid.levels],
            "lower": [float(v) for v in self.lower],
            "upper": [float(v) for v in self.upper],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FuzzyNumber":
        try:
            alphas, lower, upper = data["alphas"], data["lower"], data["upper"]
        except KeyError as e:
            raise ValueError(f"fuzzy number JSON is missing key {e}") from e
        if not len(alphas) == len(lower) == len(upper):
            raise ValueError(
                f"fuzzy number JSON arrays differ in length: "
                f"alphas={len(alphas)}, lower={len(lower)}, upper={len(upper)}"
            )
        return cls(AlphaGrid(tuple(alphas)), np.asarray(lower), np.asarray(upper))

    def __repr__(self) -> str:
        return (
            f"FuzzyNumber(support=[{self.lower[0]:g}, {self.upper[0]:g}], "
            f"core=[{self.lower[-1]:g}, {self.upper[-1]:g}], levels={len(self.grid)})"
        )


def _monotone_condition(values: np.ndarray, alphas: np.ndarray, sign: int, condition: str, description: str) -> ConditionResult:
    # sign=+1 checks non-decreasing, sign=-1 non-increasing
    steps = sign * np.diff(values)
    bad = np.flatnonzero(steps < -MONOTONE_TOLERANCE)
    if bad.size == 0:
        return ConditionResult(condition=condition, description=description, status="pass")
    k = int(bad[0])
    return ConditionResult(
        condition=condition,
        description=description,
        status="fail",
        first_violation=(float(alphas[k]), float(alphas[k + 1])),
        values=(float(values[k]), float(values[k + 1])),
    )


def validate(lower: Sequence[float], upper: Sequence[float], grid: AlphaGrid) -> ValidityReport:
    """Scan sampled level functions for the characterization conditions of a fuzzy number."""
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    n = len(grid)
    if lower.shape != (n,) or upper.shape != (n,):
        raise ValueError(
            f"level arrays must match the alpha grid length {n}: "
            f"lower has shape {lower.shape}, upper has shape {upper.shape}"
        )
    if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
        raise ValueError("level arrays must be finite (bounded level functions)")

    alphas = grid.array
    lower_result = _monotone_condition(lower, alphas, +1, "i", "lower level function non-decreasing")
    upper_result = _monotone_condition(upper, alphas, -1, "ii", "upper level function non-increasing")

    # ordering is exact; the monotone tolerance does not apply here
    inverted = np.flatnonzero(lower > upper)
    if inverted.size:
        k = int(inverted[0])
        ordered = ConditionResult(
            condition="iv",
            description="lower <= upper",
            status="fail",
            first_violation=(float(alphas[k]), float(alphas[k])),
            values=(float(lower[k]), float(upper[k])),
        )
    else:
        ordered = ConditionResult(condition="iv", description="lower <= upper", status="pass")

    continuity = ConditionResult(
        condition="iii",
        description="left continuity on (0,1], right continuity at 0",
        status="assumed",
    )
    return ValidityReport(
        lower_non_decreasing=lower_result,
        upper_non_increasing=upper_result,
        continuity=continuity,
        ordered=ordered,
    )


def triangular(a: float, b: float, c: float, grid: AlphaGrid = DEFAULT_GRID) -> FuzzyNumber:
    if not a <= b:
        raise ValueError(f"triangular fuzzy number needs a <= b, got a={a}, b={b}")
    if not b <= c:
        raise ValueError(f"triangular fuzzy number needs b <= c, got b={b}, c={c}")
    alphas = grid.array
    # a + (b - a) can round past b; the core bounds both branches
    lower = np.minimum(a + alphas * (b - a), b)
    upper = np.maximum(c - alphas * (c - b), b)
    return FuzzyNumber(grid, lower, upper, shape=Shape((a, c), (b, b)))


def trapezoidal(a: float, b: float, c: float, d: float, grid: AlphaGrid = DEFAULT_GRID) -> FuzzyNumber:
    for name_lo, lo, name_hi, hi in (("a", a, "b", b), ("b", b, "c", c), ("c", c, "d", d)):
        if not lo <= hi:
            raise ValueError(f"trapezoidal fuzzy number needs {name_lo} <= {name_hi}, got {name_lo}={lo}, {name_hi}={hi}")
    alphas = grid.array
    lower = np.minimum(a + alphas * (b - a), b)
    upper = np.maximum(d - alphas * (d - c), c)
    return FuzzyNumber(grid, lower, upper, shape=Shape((a, d), (b, c)))


def crisp(value: float, grid: AlphaGrid = DEFAULT_GRID) -> FuzzyNumber:
    return triangular(value, value, value, grid)


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 <= alpha <= 1.0:
        raise AlphaDomainError(f"alpha must lie in [0, 1], got {alpha}")
    return alpha


def alpha_cut(F: FuzzyNumber, alpha: float) -> Interval:
    alpha = _check_alpha(alpha)
    lo = float(np.interp(alpha, F.alphas, F.lower))
    hi = float(np.interp(alpha, F.alphas, F.upper))
    # interpolation rounding can invert a degenerate cut
    return Interval(lo, max(lo, hi))


def scalar_mul(lam: float, F: FuzzyNumber) -> FuzzyNumber:
    lam = float(lam)
    shape = F.shape.scaled(lam) if F.shape is not None else None
    lower, upper = (lam * F.lower, lam * F.upper) if lam >= 0 else (lam * F.upper, lam * F.lower)
    # ties accepted within MONOTONE_TOLERANCE grow with |lam|; flatten them
    lower = np.maximum.accumulate(lower)
    upper = np.minimum.accumulate(upper)
    return FuzzyNumber(F.grid, lower, upper, shape=shape)


def from_level_functions(a1: AlphaEvaluator, a2: AlphaEvaluator, grid: AlphaGrid = DEFAULT_GRID) -> FuzzyNumber:
    """Sample two alpha evaluators on the grid and build the fuzzy number they describe.

    Raises FuzzyNumberError carrying the validity report when the samples fail.
    """
    lower = np.array([float(a1(a)) for a in grid.levels])
    upper = np.array([float(a2(a)) for a in grid.levels])
    report = validate(lower, upper, grid)
    if not report.ok:
        logger.debug(f"Rejected level functions: {report.summary()}")
        raise FuzzyNumberError(report)
    return FuzzyNumber(grid, lower, upper)


def _node_slopes(values: np.ndarray, alphas: np.ndarray) -> np.ndarray:
    # divided differences averaged onto the nodes; flat segments give exact zeros
    slopes = np.diff(values) / np.diff(alphas)
    if slopes.size == 1:
        return np.repeat(slopes, 2)
    return np.concatenate([slopes[:1], 0.5 * (slopes[:-1] + slopes[1:]), slopes[-1:]])


def alpha_derivative(F: FuzzyNumber) -> tuple[np.ndarray, np.ndarray]:
    """Finite-difference alpha-derivatives of both level functions on the grid"""
    return _node_slopes(F.lower, F.alphas), _node_slopes(F.upper, F.alphas)


def width(F: FuzzyNumber, alpha: float) -> float:
    return alpha_cut(F, alpha).width


def is_crisp(F: FuzzyNumber) -> bool:
    return bool(np.all(F.lower == F.upper))


def load_fuzzy_number(path: str | Path) -> FuzzyNumber:
    with open(path, "r", encoding="utf-8") as f:
        data = json.load(f)
    return FuzzyNumber.from_dict(data)


def save_fuzzy_number(F: FuzzyNumber, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(F.to_dict(), f)
