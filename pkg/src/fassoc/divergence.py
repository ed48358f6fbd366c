"""f-divergence generators and evaluation against a reference table.

Every generator works elementwise on numpy arrays and returns ``f(0) = 0``
at ``x = 0`` so that empty cells can be evaluated without special-casing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import xlogy

from fassoc.errors import ParameterRangeError, ShapeMismatchError, ValidationError
from fassoc.table import ProbabilityTable

ArrayFn = Callable[[np.ndarray], np.ndarray]

# below this a cell is an exact zero
TINY = 1e-300

# deterministic probe set for generator validation (necessary, not sufficient)
PROBE_X = (0.05, 0.1, 0.25, 0.5, 0.9, 1.1, 2.0, 5.0, 20.0)
PROBE_T = (0.25, 0.5, 0.75)


@dataclass(frozen=True)
class DivergenceSpec:
    """A convex generator ``f`` with ``f(1) = 0`` and its derivative.

    ``slope_at_infinity`` is ``lim f(x)/x`` as ``x -> inf`` and fixes the
    contribution ``a * slope`` of a cell with zero reference mass.
    """

    family: str
    param: float | None
    f: ArrayFn
    f_prime: ArrayFn
    f_at_zero: float = 0.0
    slope_at_infinity: float = math.inf
    name: str | None = None

    @property
    def label(self) -> str:
        if self.name is not None:
            return self.name
        if self.param is None:
            return self.family
        return f"{self.family}:{self.param:g}"

    @property
    def f_prime_at_zero(self) -> float:
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            try:
                return float(self.f_prime(np.array(0.0)))
            except (ZeroDivisionError, ValueError, OverflowError):
                return -math.inf

    @property
    def bounded_at_zero(self) -> bool:
        """Whether ``f'(0+)`` is finite, i.e. empty cells keep the delta method finite."""
        return math.isfinite(self.f_prime_at_zero)

    def __str__(self):
        return self.label


def make_power(lam: float) -> DivergenceSpec:
    """Power-divergence generator ``(x**(lam+1) - x) / (lam*(lam+1))``.

    ``lam = 0`` is the continuous limit ``x log x``. For ``lam > 0`` the
    difference ``x**(lam+1) - x`` is formed as ``x * expm1(lam*log x)`` so the
    generator stays accurate as ``lam`` approaches zero.
    """
    lam = float(lam)
    if not lam >= 0 or not math.isfinite(lam):
        raise ParameterRangeError(f"power parameter must be >= 0, got {lam}")
    if lam == 0.0:
        return DivergenceSpec("power", 0.0, _kl_f, _kl_fprime, 0.0, math.inf)
    scale = lam * (lam + 1.0)

    def f(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = x * np.expm1(lam * np.log(x)) / scale
        return np.where(x > 0, out, 0.0)

    def f_prime(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.expm1(lam * np.log(x)) / lam + 1.0 / (lam + 1.0)

    return DivergenceSpec("power", lam, f, f_prime, 0.0, math.inf)


def _kl_f(x):
    x = np.asarray(x, dtype=float)
    return xlogy(x, x)


def _kl_fprime(x):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        return np.log(x) + 1.0


def make_kl() -> DivergenceSpec:
    return DivergenceSpec("kl", None, _kl_f, _kl_fprime, 0.0, math.inf)


def make_pearson() -> DivergenceSpec:
    return DivergenceSpec(
        "pearson",
        None,
        lambda x: np.asarray(x, dtype=float) ** 2 - np.asarray(x, dtype=float),
        lambda x: 2.0 * np.asarray(x, dtype=float) - 1.0,
        0.0,
        math.inf,
    )


def make_theta(theta: float) -> DivergenceSpec:
    """theta-divergence generator ``(x-1)**2/(theta*x+1-theta) + (x-1)/(1-theta)``."""
    theta = float(theta)
    if not (0.0 <= theta < 1.0):
        raise ParameterRangeError(f"theta must lie in [0, 1), got {theta}")
    inv = 1.0 / (1.0 - theta)

    def f(x):
        x = np.asarray(x, dtype=float)
        return (x - 1.0) ** 2 / (theta * x + 1.0 - theta) + (x - 1.0) * inv

    def f_prime(x):
        x = np.asarray(x, dtype=float)
        den = theta * x + 1.0 - theta
        return (2.0 * (x - 1.0) * den - theta * (x - 1.0) ** 2) / den**2 + inv

    slope = math.inf if theta == 0.0 else 1.0 / theta + inv
    return DivergenceSpec("theta", theta, f, f_prime, 0.0, slope)


def make_custom(
    f: ArrayFn,
    f_prime: ArrayFn,
    slope_at_infinity: float,
    name: str = "custom",
) -> DivergenceSpec:
    """Wrap a user generator after checking it on the probe grid.

    ``f`` must accept numpy arrays. The limit of ``f`` at zero is probed at
    ``x = 1e-12`` and must vanish; ``f(0)`` is then pinned to zero.
    """

    def f_safe(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.asarray(f(np.where(x > 0, x, 1.0)), dtype=float)
        return np.where(x > 0, out, 0.0)

    spec = DivergenceSpec("custom", None, f_safe, f_prime, 0.0, float(slope_at_infinity), name)
    with np.errstate(divide="ignore", invalid="ignore"):
        near_zero = float(np.asarray(f(np.array(1e-12)), dtype=float))
    if not (abs(near_zero) < 1e-6):
        raise ValidationError(f"custom generator must satisfy lim f(x) = 0 at 0; f(1e-12) = {near_zero}")
    check_generator(spec)
    return spec


def check_generator(spec: DivergenceSpec) -> None:
    """Spot-check ``f(1) = 0``, strict convexity and monotone ``f(x)/x``."""
    one = float(spec.f(np.array(1.0)))
    if abs(one) > 1e-12:
        raise ValidationError(f"{spec.label}: f(1) = {one}, expected 0")
    if spec.f_at_zero != 0.0:
        raise ValidationError(f"{spec.label}: f must vanish at 0")
    xs = np.array(PROBE_X)
    fx = spec.f(xs)
    for i, x1 in enumerate(xs):
        for j, x2 in enumerate(xs):
            if i == j:
                continue
            for t in PROBE_T:
                mid = float(spec.f(np.array(t * x1 + (1 - t) * x2)))
                chord = t * fx[i] + (1 - t) * fx[j]
                if not mid < chord - 1e-12:
                    raise ValidationError(
                        f"{spec.label}: convexity fails at x1={x1}, x2={x2}, t={t}"
                    )
    g = fx / xs
    if not np.all(np.diff(g) > 0):
        raise ValidationError(f"{spec.label}: f(x)/x is not strictly increasing on the probe grid")


def parse_divergence(text: str) -> DivergenceSpec:
    """Parse ``power:0.6``, ``theta:0.5``, ``kl`` or ``pearson``."""
    name, _, arg = text.strip().lower().partition(":")
    if name in ("kl", "pearson"):
        if arg:
            raise ValidationError(f"{name} takes no parameter")
        return make_kl() if name == "kl" else make_pearson()
    if name in ("power", "theta"):
        if not arg:
            raise ValidationError(f"{name} needs a parameter, e.g. {name}:0.5")
        try:
            value = float(arg)
        except ValueError:
            raise ValidationError(f"bad parameter {arg!r} for {name}") from None
        return make_power(value) if name == "power" else make_theta(value)
    raise ValidationError(f"unknown divergence family {name!r}")


# --- evaluation ----------------------------------------------------------------


def divergence_terms(spec: DivergenceSpec, p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Per-cell contributions ``q * f(p/q)`` with the zero-mass conventions.

    Works on any broadcastable shapes.
    """
    p = np.where(p < TINY, 0.0, p)
    pos = q > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(pos, p / np.where(pos, q, 1.0), 0.0)
        inside = q * spec.f(ratio)
        if math.isinf(spec.slope_at_infinity):
            outside = np.where(p > 0, math.inf, 0.0)
        else:
            outside = p * spec.slope_at_infinity
    return np.where(pos, inside, outside)


def _as_array(t) -> np.ndarray:
    return t.probs if isinstance(t, ProbabilityTable) else np.asarray(t, dtype=float)


def f_divergence(spec: DivergenceSpec, p, q) -> float:
    """``sum q_ij f(p_ij / q_ij)``; may be ``inf`` when ``q`` misses mass of ``p``."""
    pa, qa = _as_array(p), _as_array(q)
    if pa.shape != qa.shape:
        raise ShapeMismatchError(f"shapes differ: {pa.shape} vs {qa.shape}")
    return float(divergence_terms(spec, pa, qa).sum())


def independence_array(spec: DivergenceSpec, p: np.ndarray) -> np.ndarray:
    """Divergence of ``p`` from its independence product over the last two axes."""
    q = p.sum(axis=-1)[..., :, None] * p.sum(axis=-2)[..., None, :]
    return divergence_terms(spec, p, q).sum(axis=(-2, -1))


def independence_divergence(spec: DivergenceSpec, p: ProbabilityTable) -> float:
    return f_divergence(spec, p, p.independence())
