"""Seeded multinomial sampling and confidence-interval coverage experiments.

Replicates are split into fixed blocks of ``BLOCK`` tables. Block ``b`` draws
from its own PCG64 stream seeded by ``SeedSequence(seed).spawn(...)[b]``, so
results depend only on the seed and never on how many workers run the blocks.
Multinomial draws use numpy's conditional-binomial sampler.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from fassoc.divergence import DivergenceSpec
from fassoc.errors import AssociationError, GeneratorDegenerateError, ValidationError
from fassoc.inference import estimate_arrays, z_value
from fassoc.measures import AggregatorSpec, measure, variant_label
from fassoc.table import ContingencyTable, ProbabilityTable

BLOCK = 2500
# slack on interval containment so a [1, 1] interval covers a true value of 1
CONTAIN_TOL = 1e-12


@dataclass(frozen=True)
class ExperimentSpec:
    generator: ProbabilityTable
    n: int
    iterations: int
    divergence: DivergenceSpec
    variant: str = "v1"
    aggregator: AggregatorSpec | None = None
    level: float = 0.95
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError(f"sample size must be >= 1, got {self.n}")
        if self.iterations < 1:
            raise ValidationError(f"iterations must be >= 1, got {self.iterations}")
        if not 0 < self.level < 1:
            raise ValidationError(f"level must lie in (0, 1), got {self.level}")


@dataclass(frozen=True)
class CoverageResult:
    coverage: float
    true_value: float
    mean_estimate: float
    replicates_failed: int
    iterations: int
    covered: int
    variant: str = ""
    divergence: str = ""

    def to_dict(self) -> dict:
        return asdict(self)


def _rng(rng_state) -> np.random.Generator:
    if isinstance(rng_state, np.random.Generator):
        return rng_state
    return np.random.default_rng(rng_state)


def sample_table(p, n: int, rng_state=None) -> ContingencyTable:
    """One multinomial table of total ``n`` with cell probabilities ``p``.

    ``p`` may be a ProbabilityTable or any nonnegative grid summing to one
    (so degenerate generators that fail the marginal rule can still be drawn).
    ``rng_state`` is a Generator, a seed, or None.
    """
    if n < 1:
        raise ValidationError(f"sample size must be >= 1, got {n}")
    probs = p.probs if isinstance(p, ProbabilityTable) else np.asarray(p, dtype=float)
    if probs.ndim != 2 or np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-12:
        raise ValidationError("cell probabilities must form a nonnegative grid summing to 1")
    counts = _rng(rng_state).multinomial(n, probs.ravel())
    return ContingencyTable(counts.reshape(probs.shape))


def block_seeds(seed: int, iterations: int) -> list[tuple[int, np.random.SeedSequence]]:
    """``(size, seed sequence)`` for each block of replicates."""
    sizes = [BLOCK] * (iterations // BLOCK)
    if iterations % BLOCK:
        sizes.append(iterations % BLOCK)
    children = np.random.SeedSequence(seed).spawn(len(sizes))
    return list(zip(sizes, children))


def _run_block(spec: ExperimentSpec, size: int, seq: np.random.SeedSequence, true_value: float, z: float):
    rng = np.random.Generator(np.random.PCG64(seq))
    r, c = spec.generator.shape
    counts = rng.multinomial(spec.n, spec.generator.probs.ravel(), size=size).reshape(size, r, c)
    est, var, ok = estimate_arrays(spec.divergence, counts / spec.n, spec.variant, spec.aggregator)
    half = z * np.sqrt(np.where(ok, var, 0.0) / spec.n)
    est0 = np.where(ok, est, 0.0)
    inside = ok & (est0 - half - CONTAIN_TOL <= true_value) & (true_value <= est0 + half + CONTAIN_TOL)
    return int(inside.sum()), int(ok.sum()), float(est0.sum())


def coverage_experiment(spec: ExperimentSpec, workers: int = 1) -> CoverageResult:
    """Fraction of replicate intervals that contain the generator's measure.

    Replicates whose estimate or interval is undefined (zero marginal, empty
    cell under an unbounded ``f'(0)``) are dropped and counted as failed.
    """
    try:
        true_value = measure(spec.divergence, spec.generator, spec.variant, spec.aggregator).value
    except AssociationError as exc:
        raise GeneratorDegenerateError(f"measure undefined on the generator: {exc}") from exc
    z = z_value(spec.level)
    blocks = block_seeds(spec.seed, spec.iterations)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: _run_block(spec, b[0], b[1], true_value, z), blocks))
    else:
        parts = [_run_block(spec, size, seq, true_value, z) for size, seq in blocks]
    covered = sum(part[0] for part in parts)
    valid = sum(part[1] for part in parts)
    total = sum(part[2] for part in parts)
    failed = spec.iterations - valid
    label = variant_label(spec.variant, spec.aggregator if spec.variant == "v3" else None)
    return CoverageResult(
        coverage=covered / valid if valid else float("nan"),
        true_value=true_value,
        mean_estimate=total / valid if valid else float("nan"),
        replicates_failed=failed,
        iterations=spec.iterations,
        covered=covered,
        variant=label,
        divergence=spec.divergence.label,
    )
