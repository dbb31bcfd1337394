import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Literal, Optional, Sequence, Union

import numpy as np

from src.fuzzy.fuzzy_number import DEFAULT_GRID, AlphaGrid, FuzzyNumber, alpha_cut, validate

from .views import Classification, DerivativeDiagnostics, GsDerivativeResult, SufficientConditions

logger = logging.getLogger(__name__)

LevelEvaluator = Callable[[float, float], float]
CrispEvaluator = Callable[[float], float]
FieldEvaluator = Callable[[float, float], float]

FD_STEP = 1e-6
FD_STEP_SECOND = 1e-4


class EvaluationError(RuntimeError):
    def __init__(self, name: str, location: tuple[float, ...], alpha: Optional[float] = None):
        self.name = name
        self.location = location
        self.alpha = alpha
        where = ", ".join(f"{v!r}" for v in location)
        suffix = f", alpha={alpha!r}" if alpha is not None else ""
        super().__init__(f"evaluator {name} failed at ({where}){suffix}")


def central_difference(fn: Callable[[float], float], t: float, h: Optional[float] = None) -> float:
    h = FD_STEP * max(1.0, abs(t)) if h is None else h
    return (fn(t + h) - fn(t - h)) / (2.0 * h)


def second_difference(fn: Callable[[float], float], t: float, h: Optional[float] = None) -> float:
    h = FD_STEP_SECOND * max(1.0, abs(t)) if h is None else h
    return (fn(t + h) - 2.0 * fn(t) + fn(t - h)) / (h * h)


@dataclass(frozen=True)
class LevelFunctionFamily:
    """A fuzzy-valued function of one variable given by its level functions.

    df1/df2 are the t-derivatives of f1/f2. When omitted, a central finite
    difference of f1/f2 is used instead.
    """

    f1: LevelEvaluator
    f2: LevelEvaluator
    df1: Optional[LevelEvaluator] = None
    df2: Optional[LevelEvaluator] = None
    grid: AlphaGrid = DEFAULT_GRID
    domain: tuple[float, float] = (-math.inf, math.inf)

    def _check_domain(self, t: float):
        lo, hi = self.domain
        if not lo <= t <= hi:
            raise ValueError(f"t={t} lies outside the function domain [{lo}, {hi}]")

    def _sample(self, fn: LevelEvaluator, name: str, t: float) -> np.ndarray:
        out = np.empty(len(self.grid))
        for k, a in enumerate(self.grid.levels):
            try:
                out[k] = float(fn(t, a))
            except Exception as e:
                raise EvaluationError(name, (t,), a) from e
        return out

    def values(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        self._check_domain(t)
        return self._sample(self.f1, "f1", t), self._sample(self.f2, "f2", t)

    def finite_difference_derivatives(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        self._check_domain(t)
        h = FD_STEP * max(1.0, abs(t))
        d1 = (self._sample(self.f1, "f1", t + h) - self._sample(self.f1, "f1", t - h)) / (2.0 * h)
        d2 = (self._sample(self.f2, "f2", t + h) - self._sample(self.f2, "f2", t - h)) / (2.0 * h)
        return d1, d2

    def derivatives(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        if self.df1 is None or self.df2 is None:
            return self.finite_difference_derivatives(t)
        self._check_domain(t)
        return self._sample(self.df1, "df1", t), self._sample(self.df2, "df2", t)


@dataclass(frozen=True)
class EnvelopeFunction:
    """The separable fuzzy-valued function coeff ⊙ g(t)"""

    coeff: FuzzyNumber
    factor: CrispEvaluator
    dfactor: Optional[CrispEvaluator] = None
    domain: tuple[float, float] = (-math.inf, math.inf)

    def derivative_factor(self, t: float) -> float:
        if self.dfactor is not None:
            return float(self.dfactor(t))
        return central_difference(self.factor, t)

    def _pair(self, t: float, alpha: float) -> tuple[float, float]:
        # coefficient levels in the order they occupy after scaling by g(t)
        cut = alpha_cut(self.coeff, alpha)
        if self.factor(t) >= 0:
            return cut.lo, cut.hi
        return cut.hi, cut.lo

    def to_family(self) -> LevelFunctionFamily:
        return LevelFunctionFamily(
            f1=lambda t, a: self._pair(t, a)[0] * self.factor(t),
            f2=lambda t, a: self._pair(t, a)[1] * self.factor(t),
            df1=lambda t, a: self._pair(t, a)[0] * self.derivative_factor(t),
            df2=lambda t, a: self._pair(t, a)[1] * self.derivative_factor(t),
            grid=self.coeff.grid,
            domain=self.domain,
        )


@dataclass(frozen=True)
class TwoVariableEnvelope:
    """The separable fuzzy-valued function coeff ⊙ z(x, t).

    `partials` maps "x", "t", "xx", "tt" to analytic partial derivatives of z;
    missing entries fall back to finite differences.
    """

    coeff: FuzzyNumber
    factor: FieldEvaluator
    partials: dict[str, FieldEvaluator] = field(default_factory=dict)

    def partial(self, which: str, x: float, t: float) -> float:
        if which in self.partials:
            try:
                return float(self.partials[which](x, t))
            except Exception as e:
                raise EvaluationError(f"d{which}", (x, t)) from e
        try:
            if which == "x":
                return central_difference(lambda s: self.factor(s, t), x)
            if which == "t":
                return central_difference(lambda s: self.factor(x, s), t)
            if which == "xx":
                return second_difference(lambda s: self.factor(s, t), x)
            if which == "tt":
                return second_difference(lambda s: self.factor(x, s), t)
        except Exception as e:
            raise EvaluationError("z", (x, t)) from e
        raise ValueError(f"unknown partial {which!r}; expected one of x, t, xx, tt")

    def section_in_t(self, x: float) -> EnvelopeFunction:
        return EnvelopeFunction(
            self.coeff,
            factor=lambda t: self.factor(x, t),
            dfactor=lambda t: self.partial("t", x, t),
        )

    def section_in_x(self, t: float) -> EnvelopeFunction:
        return EnvelopeFunction(
            self.coeff,
            factor=lambda x: self.factor(x, t),
            dfactor=lambda x: self.partial("x", x, t),
        )


FunctionLike = Union[LevelFunctionFamily, EnvelopeFunction]


def _as_family(f: FunctionLike) -> LevelFunctionFamily:
    if isinstance(f, EnvelopeFunction):
        return f.to_family()
    return f


def _sufficient(d1: np.ndarray, d2: np.ndarray) -> SufficientConditions:
    # exact comparisons: strict decrease of any size counts against the condition
    return SufficientConditions(
        lower_increasing=bool(np.all(np.diff(d1) >= 0)),
        upper_decreasing=bool(np.all(np.diff(d2) <= 0)),
        core_ordered=bool(d1[-1] <= d2[-1]),
    )


def _classify(seikkala_ok: bool, gs_ok: bool) -> Classification:
    if not gs_ok:
        return Classification.NONE
    return Classification.SEIKKALA if seikkala_ok else Classification.GS_ONLY


def _gs_result(
    operator: str,
    at: tuple[float, ...],
    grid: AlphaGrid,
    d1: np.ndarray,
    d2: np.ndarray,
    levels: Optional[tuple[np.ndarray, np.ndarray]] = None,
    case: Optional[str] = None,
    notes: Optional[list[str]] = None,
) -> GsDerivativeResult:
    seikkala_report = validate(d1, d2, grid)
    if levels is None:
        lower, upper = np.minimum(d1, d2), np.maximum(d1, d2)
    else:
        lower, upper = levels
    gs_report = validate(lower, upper, grid)
    classification = _classify(seikkala_report.ok, gs_report.ok)
    notes = list(notes or [])
    if classification == Classification.NONE:
        # min <= max by construction, so only monotonicity in alpha can fail
        notes.append(f"min/max derivative levels are not a fuzzy number: {gs_report.summary()}")
    logger.debug(f"{operator} at {at}: {classification.value}")
    return GsDerivativeResult(
        operator=operator,
        at=at,
        grid=grid,
        lower=lower,
        upper=upper,
        classification=classification,
        diagnostics=DerivativeDiagnostics(
            seikkala=seikkala_report,
            gs=gs_report,
            sufficient=_sufficient(d1, d2),
            case=case,
            notes=notes,
        ),
    )


def seikkala_derivative(f: FunctionLike, t: float) -> GsDerivativeResult:
    """Seikkala derivative: levels [f1', f2'], which must themselves be a fuzzy number"""
    family = _as_family(f)
    d1, d2 = family.derivatives(t)
    report = validate(d1, d2, family.grid)
    classification = Classification.SEIKKALA if report.ok else Classification.NONE
    notes = [] if report.ok else [f"Seikkala derivative does not exist: {report.summary()}"]
    logger.debug(f"seikkala at t={t}: {classification.value}")
    return GsDerivativeResult(
        operator="seikkala",
        at=(float(t),),
        grid=family.grid,
        lower=d1,
        upper=d2,
        classification=classification,
        diagnostics=DerivativeDiagnostics(
            seikkala=report,
            sufficient=_sufficient(d1, d2),
            notes=notes,
        ),
    )


def gs_derivative(f: FunctionLike, t: float) -> GsDerivativeResult:
    """Generalized Seikkala derivative: levels [min(f1', f2'), max(f1', f2')]"""
    family = _as_family(f)
    d1, d2 = family.derivatives(t)
    return _gs_result("gs", (float(t),), family.grid, d1, d2)


def gs_derivative_casewise(f: FunctionLike, t: float) -> GsDerivativeResult:
    """Generalized Seikkala derivative by cases: [f1', f2'] when f1' <= f2', else [f2', f1'].

    When the order of f1' and f2' changes with alpha, the cases are applied per
    level and the diagnostics record that neither global case holds.
    """
    family = _as_family(f)
    d1, d2 = family.derivatives(t)
    le = d1 <= d2
    notes = []
    if np.all(le):
        case, lower, upper = "i", d1, d2
    elif np.all(d1 >= d2):
        case, lower, upper = "ii", d2, d1
    else:
        case = "mixed"
        lower = np.where(le, d1, d2)
        upper = np.where(le, d2, d1)
        notes.append("order of f1' and f2' varies with alpha; cases applied per level")

    return _gs_result("gs_casewise", (float(t),), family.grid, d1, d2, levels=(lower, upper), case=case, notes=notes)


def _coeff_levels(f2v: TwoVariableEnvelope, x: float, t: float) -> tuple[np.ndarray, np.ndarray]:
    a1, a2 = f2v.coeff.lower, f2v.coeff.upper
    try:
        z = float(f2v.factor(x, t))
    except Exception as e:
        raise EvaluationError("z", (x, t)) from e
    return (a1, a2) if z >= 0 else (a2, a1)


def gs_partial(f2v: TwoVariableEnvelope, which: Literal["x", "t"], point: tuple[float, float]) -> GsDerivativeResult:
    if which not in ("x", "t"):
        raise ValueError(f"first-order partial must be 'x' or 't', got {which!r}")
    x, t = point
    lo, hi = _coeff_levels(f2v, x, t)
    p = f2v.partial(which, x, t)
    return _gs_result(f"gs_partial_{which}", (float(x), float(t)), f2v.coeff.grid, lo * p, hi * p)


def gs_second_partial(f2v: TwoVariableEnvelope, which: Literal["xx", "tt"], point: tuple[float, float]) -> GsDerivativeResult:
    if which not in ("xx", "tt"):
        raise ValueError(f"second-order partial must be 'xx' or 'tt', got {which!r}")
    x, t = point
    lo, hi = _coeff_levels(f2v, x, t)
    p = f2v.partial(which, x, t)
    return _gs_result(f"gs_partial_{which}", (float(x), float(t)), f2v.coeff.grid, lo * p, hi * p)


def gs_differentiable(f2v: TwoVariableEnvelope, point: tuple[float, float]) -> bool:
    """Both generalized Seikkala partial derivatives exist at the point"""
    return gs_partial(f2v, "x", point).exists and gs_partial(f2v, "t", point).exists


def classify_on(f: FunctionLike, ts: Sequence[float]) -> list[GsDerivativeResult]:
    family = _as_family(f)
    return [gs_derivative(family, t) for t in ts]


def derivative_discrepancy(f: FunctionLike, t: float) -> float:
    """Largest relative gap between analytic and finite-difference level derivatives"""
    family = _as_family(f)
    d1, d2 = family.derivatives(t)
    e1, e2 = family.finite_difference_derivatives(t)
    gap = np.maximum(np.abs(d1 - e1) / np.maximum(1.0, np.abs(d1)), np.abs(d2 - e2) / np.maximum(1.0, np.abs(d2)))
    return float(np.max(gap))
