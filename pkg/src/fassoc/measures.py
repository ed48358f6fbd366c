"""Generalised Cramer coefficients V1, V2 and V3 for two-way tables.

V1 normalises the divergence from independence by the row-side maximum
(column explains row), V2 by the column-side maximum, and V3 combines the
two with a quasi-arithmetic mean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from fassoc.divergence import DivergenceSpec, independence_array
from fassoc.errors import (
    AggregatorDomainError,
    DegenerateMarginError,
    MarginalZeroError,
    NumericalContractError,
    ValidationError,
)
from fassoc.table import ProbabilityTable

CLAMP_TOLERANCE = 1e-10
FD_STEP = 1e-6
_AGG_PROBE = np.linspace(0.05, 0.95, 19)


@dataclass(frozen=True)
class AggregatorSpec:
    """Weighted quasi-arithmetic mean ``h^-1(w1 h(v1) + w2 h(v2))``.

    ``geometric`` is ``h = log`` and ``harmonic`` is ``h = 1/u``; both are
    evaluated in closed form so that a zero argument gives zero.
    """

    kind: str
    w1: float = 0.5
    w2: float = 0.5
    h: Callable | None = None
    h_inverse: Callable | None = None
    name: str | None = None

    def __post_init__(self):
        if self.kind not in ("geometric", "harmonic", "generic"):
            raise ValidationError(f"unknown aggregator kind {self.kind!r}")
        if self.w1 < 0 or self.w2 < 0 or abs(self.w1 + self.w2 - 1.0) > 1e-12:
            raise ValidationError(f"weights must be nonnegative and sum to 1, got {self.w1}, {self.w2}")
        if self.kind == "generic":
            if self.h is None or self.h_inverse is None:
                raise ValidationError("generic aggregator needs h and h_inverse")
            hv = np.array([self.h(u) for u in _AGG_PROBE], dtype=float)
            back = np.array([self.h_inverse(v) for v in hv], dtype=float)
            if not np.allclose(back, _AGG_PROBE, rtol=0, atol=1e-9):
                raise ValidationError("h_inverse is not the inverse of h on the probe grid")
            steps = np.diff(hv)
            if not (np.all(steps > 0) or np.all(steps < 0)):
                raise ValidationError("h is not strictly monotone on the probe grid")

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        if self.w1 == self.w2:
            return self.kind
        return f"{self.kind}({self.w1:g},{self.w2:g})"

    def combine(self, v1, v2):
        v1 = np.asarray(v1, dtype=float)
        v2 = np.asarray(v2, dtype=float)
        if self.kind == "geometric":
            return v1**self.w1 * v2**self.w2
        if self.kind == "harmonic":
            den = self.w1 * v2 + self.w2 * v1
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.where(den > 0, v1 * v2 / np.where(den > 0, den, 1.0), 0.0)
        return self._generic(v1, v2)

    def _generic(self, v1, v2):
        try:
            with np.errstate(divide="ignore", invalid="ignore"):
                h1 = np.asarray(np.vectorize(self.h, otypes=[float])(v1))
                h2 = np.asarray(np.vectorize(self.h, otypes=[float])(v2))
        except (ValueError, ZeroDivisionError, OverflowError) as exc:
            raise AggregatorDomainError(f"h undefined at ({v1}, {v2}): {exc}") from None
        if not (np.all(np.isfinite(h1)) and np.all(np.isfinite(h2))):
            raise AggregatorDomainError(f"h undefined at ({v1}, {v2})")
        mixed = self.w1 * h1 + self.w2 * h2
        return np.asarray(np.vectorize(self.h_inverse, otypes=[float])(mixed))

    def partials(self, v1, v2):
        """Partial derivatives of the combined value in ``v1`` and ``v2``."""
        v1 = np.asarray(v1, dtype=float)
        v2 = np.asarray(v2, dtype=float)
        if self.kind == "geometric":
            g = self.combine(v1, v2)
            with np.errstate(divide="ignore", invalid="ignore"):
                return self.w1 * g / v1, self.w2 * g / v2
        if self.kind == "harmonic":
            m = self.combine(v1, v2)
            with np.errstate(divide="ignore", invalid="ignore"):
                return self.w1 * m**2 / v1**2, self.w2 * m**2 / v2**2
        d1 = (self.combine(v1 + FD_STEP, v2) - self.combine(v1 - FD_STEP, v2)) / (2 * FD_STEP)
        d2 = (self.combine(v1, v2 + FD_STEP) - self.combine(v1, v2 - FD_STEP)) / (2 * FD_STEP)
        return d1, d2


GEOMETRIC = AggregatorSpec("geometric")
HARMONIC = AggregatorSpec("harmonic")


def parse_aggregator(text: str) -> AggregatorSpec:
    key = text.strip().lower()
    if key in ("geometric", "g"):
        return GEOMETRIC
    if key in ("harmonic", "h"):
        return HARMONIC
    raise ValidationError(f"unknown aggregator {text!r}; use geometric or harmonic")


def parse_variant(text: str) -> tuple[str, AggregatorSpec | None]:
    """``v1``, ``v2``, ``v3`` (harmonic), ``v3:geometric`` or ``v3:harmonic``."""
    head, _, tail = text.strip().lower().partition(":")
    if head in ("v1", "v2"):
        if tail:
            raise ValidationError(f"{head} takes no aggregator")
        return head, None
    if head == "v3":
        return "v3", parse_aggregator(tail) if tail else HARMONIC
    raise ValidationError(f"unknown measure variant {text!r}")


def variant_label(variant: str, agg: AggregatorSpec | None) -> str:
    return variant if agg is None else f"{variant}:{agg.label}"


@dataclass(frozen=True)
class MeasureValue:
    value: float
    variant: str
    divergence: str
    aggregator: str | None = None

    def __float__(self):
        return self.value


# --- array core (broadcasts over leading axes, nan where undefined) -------------


class MeasureArrays(NamedTuple):
    divergence: np.ndarray
    k1: np.ndarray
    k2: np.ndarray
    v1: np.ndarray
    v2: np.ndarray


def normalizer_array(spec: DivergenceSpec, marginals: np.ndarray) -> np.ndarray:
    """``sum m_i**2 f(1/m_i)`` over the last axis; nan if any ``m_i`` is 0."""
    pos = marginals > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = np.where(pos, 1.0 / np.where(pos, marginals, 1.0), 1.0)
        terms = marginals**2 * spec.f(inv)
    total = terms.sum(axis=-1)
    return np.where(pos.all(axis=-1), total, np.nan)


def measure_arrays(spec: DivergenceSpec, p: np.ndarray) -> MeasureArrays:
    div = independence_array(spec, p)
    k1 = normalizer_array(spec, p.sum(axis=-1))
    k2 = normalizer_array(spec, p.sum(axis=-2))
    with np.errstate(divide="ignore", invalid="ignore"):
        v1 = np.where(k1 > 0, div / np.where(k1 > 0, k1, 1.0), np.nan)
        v2 = np.where(k2 > 0, div / np.where(k2 > 0, k2, 1.0), np.nan)
    return MeasureArrays(div, k1, k2, v1, v2)


def clamp_unit(value):
    """Snap roundoff excursions of at most 1e-10 back into [0, 1]."""
    v = np.asarray(value, dtype=float)
    bad = np.isfinite(v) & ((v < -CLAMP_TOLERANCE) | (v > 1.0 + CLAMP_TOLERANCE))
    if np.any(bad):
        raise NumericalContractError(f"measure value {v[bad].ravel()[0]!r} outside [0, 1]")
    out = np.clip(v, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


# --- public, table-level API -------------------------------------------------------


def _check_margins(marginals: np.ndarray, side: str) -> None:
    if np.any(marginals == 1.0):
        raise DegenerateMarginError(f"all probability lies in a single {side}; normaliser is zero")
    if np.any(marginals == 0.0):
        raise MarginalZeroError(f"a {side} marginal is zero; the {side}-side normaliser is undefined")


def _normalizer(spec: DivergenceSpec, marginals: np.ndarray, side: str) -> float:
    _check_margins(marginals, side)
    value = float(normalizer_array(spec, marginals))
    if not value > 0:
        raise DegenerateMarginError(f"{side}-side normaliser is {value}")
    return value


def k1(spec: DivergenceSpec, p: ProbabilityTable) -> float:
    """Row-side normaliser ``sum_i p_i.**2 f(1/p_i.)`` (row entropy for KL)."""
    return _normalizer(spec, p.row_marginals, "row")


def k2(spec: DivergenceSpec, p: ProbabilityTable) -> float:
    return _normalizer(spec, p.col_marginals, "column")


def _divergence(spec: DivergenceSpec, p: ProbabilityTable) -> float:
    value = float(independence_array(spec, p.probs))
    if not math.isfinite(value):
        raise NumericalContractError(f"divergence from independence is {value}")
    return value


def v1(spec: DivergenceSpec, p: ProbabilityTable) -> MeasureValue:
    value = clamp_unit(_divergence(spec, p) / k1(spec, p))
    return MeasureValue(value, "v1", spec.label)


def v2(spec: DivergenceSpec, p: ProbabilityTable) -> MeasureValue:
    value = clamp_unit(_divergence(spec, p) / k2(spec, p))
    return MeasureValue(value, "v2", spec.label)


def v3(spec: DivergenceSpec, p: ProbabilityTable, agg: AggregatorSpec = HARMONIC) -> MeasureValue:
    a = v1(spec, p).value
    b = v2(spec, p).value
    value = clamp_unit(float(agg.combine(a, b)))
    return MeasureValue(value, "v3", spec.label, agg.label)


def measure(spec: DivergenceSpec, p: ProbabilityTable, variant: str, agg: AggregatorSpec | None = None) -> MeasureValue:
    if variant == "v1":
        return v1(spec, p)
    if variant == "v2":
        return v2(spec, p)
    if variant == "v3":
        return v3(spec, p, agg or HARMONIC)
    raise ValidationError(f"unknown variant {variant!r}")
