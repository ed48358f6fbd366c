"""Delta-method standard errors and normal-theory confidence intervals.

For a multinomial sample the estimator ``V(p_hat)`` satisfies
``sqrt(n) (V(p_hat) - V(p)) -> N(0, sigma^2)`` with
``sigma^2 = sum_ij g_ij^2 p_ij - (sum_ij g_ij p_ij)^2`` where ``g`` is the
gradient of ``V`` in the cell probabilities. For V1 the gradient is
``Delta1 / K1`` with

    Delta1_ij = G_ij + H_ij - V1 * E1_i
    G_ij  = sum_s p_s. f(x_sj) + sum_t p_.t f(x_it)
    H_ij  = f'(x_ij) - sum_s (p_sj / p_.j) f'(x_sj) - sum_t (p_it / p_i.) f'(x_it)
    E1_i  = 2 p_i. f(1/p_i.) - f'(1/p_i.)

with ``x_ij = p_ij / (p_i. p_.j)``. V2 swaps the roles of rows and columns
in the ``E`` term; V3 chains both gradients through the aggregator.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import ndtri

from fassoc.divergence import TINY, DivergenceSpec
from fassoc.errors import AggregatorDomainError, ValidationError, ZeroCellDerivativeError
from fassoc.measures import (
    HARMONIC,
    AggregatorSpec,
    clamp_unit,
    k1,
    k2,
    measure,
    measure_arrays,
    variant_label,
)
from fassoc.table import ContingencyTable, ProbabilityTable, to_probability


class DeltaArrays(NamedTuple):
    G: np.ndarray
    H: np.ndarray
    E1: np.ndarray
    E2: np.ndarray
    Delta1: np.ndarray
    Delta2: np.ndarray
    v1: np.ndarray
    v2: np.ndarray
    k1: np.ndarray
    k2: np.ndarray


def delta_arrays(spec: DivergenceSpec, p: np.ndarray) -> DeltaArrays:
    """Delta-method ingredients over the last two axes of ``p``.

    Entries are nan where a needed marginal is zero; empty cells under an
    unbounded ``f'(0)`` yield infinite ``H`` there.
    """
    p = np.where(p < TINY, 0.0, p)
    a = p.sum(axis=-1)
    b = p.sum(axis=-2)
    q = a[..., :, None] * b[..., None, :]
    pos = q > 0
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        x = np.where(pos, p / np.where(pos, q, 1.0), 0.0)
        fx = np.where(pos, spec.f(x), 0.0)
        dfx = spec.f_prime(x)
        wdf = np.where(p > 0, p * dfx, 0.0)

        G = (a[..., :, None] * fx).sum(axis=-2)[..., None, :] + (b[..., None, :] * fx).sum(axis=-1)[..., :, None]
        col_term = wdf.sum(axis=-2) / b
        row_term = wdf.sum(axis=-1) / a
        H = dfx - col_term[..., None, :] - row_term[..., :, None]

        m = measure_arrays(spec, p)
        E1 = 2 * a * spec.f(1.0 / a) - spec.f_prime(1.0 / a)
        E2 = 2 * b * spec.f(1.0 / b) - spec.f_prime(1.0 / b)
        E1 = np.where(a > 0, E1, np.nan)[..., :, None] + np.zeros_like(p)
        E2 = np.where(b > 0, E2, np.nan)[..., None, :] + np.zeros_like(p)
        D1 = G + H - m.v1[..., None, None] * E1
        D2 = G + H - m.v2[..., None, None] * E2
    return DeltaArrays(G, H, E1, E2, D1, D2, m.v1, m.v2, m.k1, m.k2)


def weighted_variance(g: np.ndarray, p: np.ndarray) -> np.ndarray:
    """``sum g^2 p - (sum g p)^2`` over the last two axes, in centred form.

    Cells with ``p = 0`` carry no weight even if ``g`` is infinite there.
    """
    w = np.where(p > 0, p, 0.0)
    gz = np.where(p > 0, g, 0.0)
    mean = (gz * w).sum(axis=(-2, -1))
    dev = gz - mean[..., None, None]
    return (dev**2 * w).sum(axis=(-2, -1))


def gradient_arrays(spec: DivergenceSpec, p: np.ndarray, variant: str, agg: AggregatorSpec | None = None):
    """Gradient of the chosen measure in the cells, plus the measure value."""
    d = delta_arrays(spec, p)
    with np.errstate(divide="ignore", invalid="ignore"):
        g1 = d.Delta1 / d.k1[..., None, None]
        g2 = d.Delta2 / d.k2[..., None, None]
        if variant == "v1":
            return g1, d.v1
        if variant == "v2":
            return g2, d.v2
        if variant == "v3":
            agg = agg or HARMONIC
            d1, d2 = agg.partials(d.v1, d.v2)
            g3 = np.asarray(d1)[..., None, None] * g1 + np.asarray(d2)[..., None, None] * g2
            return g3, agg.combine(d.v1, d.v2)
    raise ValidationError(f"unknown variant {variant!r}")


# --- table-level API -----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DeltaComponents:
    G: np.ndarray
    H: np.ndarray
    E1: np.ndarray
    E2: np.ndarray
    Delta1: np.ndarray
    Delta2: np.ndarray


@dataclass(frozen=True)
class MeasureEstimate:
    estimate: float
    asy_variance: float
    std_error: float
    ci_low: float
    ci_high: float
    level: float
    n: int
    variant: str | None = None
    divergence: str | None = None

    @property
    def half_width(self) -> float:
        return (self.ci_high - self.ci_low) / 2

    def display(self) -> str:
        """Three-decimal rendering used in printed tables."""
        return f"{self.estimate:.3f} {self.std_error:.3f} ({self.ci_low:.3f}, {self.ci_high:.3f})"


def _require_zero_cell_safe(spec: DivergenceSpec, p: ProbabilityTable) -> None:
    if not spec.bounded_at_zero and np.any(p.probs < TINY):
        raise ZeroCellDerivativeError(
            f"{spec.label} has unbounded f'(0) and the table has empty cells; "
            "no delta-method interval is produced"
        )


def delta_components(spec: DivergenceSpec, p: ProbabilityTable) -> DeltaComponents:
    _require_zero_cell_safe(spec, p)
    d = delta_arrays(spec, p.probs)
    return DeltaComponents(d.G, d.H, d.E1, d.E2, d.Delta1, d.Delta2)


def gradient(spec: DivergenceSpec, p: ProbabilityTable, variant: str, agg: AggregatorSpec | None = None) -> np.ndarray:
    """Analytic gradient of V1, V2 or V3 with respect to the cell probabilities."""
    _require_zero_cell_safe(spec, p)
    if variant in ("v1", "v3"):
        k1(spec, p)
    if variant in ("v2", "v3"):
        k2(spec, p)
    g, _ = gradient_arrays(spec, p.probs, variant, agg)
    return g


def asy_variance(
    spec: DivergenceSpec,
    p: ProbabilityTable,
    variant: str,
    components: DeltaComponents | None = None,
) -> float:
    """Asymptotic variance of ``sqrt(n) * V_hat`` for V1 or V2."""
    if variant not in ("v1", "v2"):
        raise ValidationError(f"asy_variance handles v1/v2, got {variant!r}; use asy_variance_v3")
    if components is None:
        components = delta_components(spec, p)
    if variant == "v1":
        norm, delta = k1(spec, p), components.Delta1
    else:
        norm, delta = k2(spec, p), components.Delta2
    return float(weighted_variance(delta, p.probs)) / norm**2


def asy_variance_v3(spec: DivergenceSpec, p: ProbabilityTable, agg: AggregatorSpec = HARMONIC) -> float:
    _require_zero_cell_safe(spec, p)
    k1(spec, p)
    k2(spec, p)
    d = delta_arrays(spec, p.probs)
    if not (d.v1 > 0 and d.v2 > 0):
        raise AggregatorDomainError(
            f"aggregator is not differentiable at (v1, v2) = ({float(d.v1)}, {float(d.v2)})"
        )
    d1, d2 = agg.partials(d.v1, d.v2)
    if not (np.isfinite(d1) and np.isfinite(d2)):
        raise AggregatorDomainError("aggregator partial derivatives are not finite")
    g = d1 * d.Delta1 / d.k1 + d2 * d.Delta2 / d.k2
    return float(weighted_variance(g, p.probs))


def z_value(level: float) -> float:
    if not 0 < level < 1:
        raise ValidationError(f"confidence level must lie in (0, 1), got {level}")
    return float(-ndtri((1 - level) / 2))


def confidence_interval(
    estimate: float,
    asy_variance: float,
    n: int,
    level: float = 0.95,
    clamp: bool = False,
    variant: str | None = None,
    divergence: str | None = None,
) -> MeasureEstimate:
    """Symmetric interval ``estimate +/- z * sqrt(asy_variance / n)``.

    Left untruncated unless ``clamp`` is set, in which case it is cut to [0, 1].
    """
    if not (np.isfinite(estimate) and np.isfinite(asy_variance)):
        raise ValidationError("estimate and variance must be finite")
    if asy_variance < 0:
        raise ValidationError(f"negative variance {asy_variance}")
    if n < 1:
        raise ValidationError(f"sample size must be positive, got {n}")
    se = float(np.sqrt(asy_variance / n))
    half = z_value(level) * se
    lo, hi = estimate - half, estimate + half
    if clamp:
        lo, hi = max(lo, 0.0), min(hi, 1.0)
    return MeasureEstimate(float(estimate), float(asy_variance), se, lo, hi, level, int(n), variant, divergence)


def estimate(
    spec: DivergenceSpec,
    table: ContingencyTable,
    variant: str = "v1",
    agg: AggregatorSpec | None = None,
    level: float = 0.95,
    clamp: bool = False,
) -> MeasureEstimate:
    """Point estimate, standard error and interval from observed counts."""
    p = to_probability(table)
    value = measure(spec, p, variant, agg).value
    if variant == "v3":
        var = asy_variance_v3(spec, p, agg or HARMONIC)
    else:
        var = asy_variance(spec, p, variant)
    label = variant_label(variant, (agg or HARMONIC) if variant == "v3" else None)
    return confidence_interval(value, var, table.n, level, clamp, label, spec.label)


# --- batch path used by the simulation engine ---------------------------------------


def estimate_arrays(
    spec: DivergenceSpec,
    p: np.ndarray,
    variant: str,
    agg: AggregatorSpec | None = None,
):
    """Estimates, asymptotic variances and a validity mask for a stack of tables.

    A table is invalid when a needed marginal is zero, when it has empty cells
    and ``f'(0)`` is unbounded, or (V3) when either component is zero.
    """
    p = np.where(p < TINY, 0.0, p)
    g, value = gradient_arrays(spec, p, variant, agg)
    var = weighted_variance(g, p)
    ok = np.isfinite(value) & np.isfinite(var)
    if not spec.bounded_at_zero:
        ok &= ~(p == 0).any(axis=(-2, -1))
    if variant == "v3":
        m = measure_arrays(spec, p)
        ok &= (m.v1 > 0) & (m.v2 > 0)
    value = np.where(ok, value, np.nan)
    var = np.where(ok, var, np.nan)
    return clamp_unit(value), var, ok
