import numpy as np
import pytest

from fassoc.bvn import BvnSpec, discretize
from fassoc.divergence import make_power, make_theta
from fassoc.errors import GeneratorDegenerateError, ValidationError
from fassoc.simulation import BLOCK, ExperimentSpec, block_seeds, coverage_experiment, sample_table
from fassoc.table import ProbabilityTable


def test_degenerate_generator_puts_everything_in_one_cell():
    grid = np.zeros((3, 3))
    grid[1, 2] = 1.0
    t = sample_table(grid, 123, 0)
    assert t.counts[1, 2] == 123 and t.n == 123


def test_uniform_cells_within_four_sigma():
    t = sample_table(ProbabilityTable(np.full((2, 2), 0.25)), 10**6, np.random.default_rng(1))
    bound = 4 * np.sqrt(1e6 * 0.25 * 0.75)
    assert np.all(np.abs(t.counts - 250000) <= bound)


def test_sampling_is_seeded():
    p = discretize(BvnSpec.uniform(0.3, 3))
    assert sample_table(p, 500, 42) == sample_table(p, 500, 42)
    assert sample_table(p, 500, 42) != sample_table(p, 500, 43)
    with pytest.raises(ValidationError):
        sample_table(p, 0, 1)


def test_block_partition():
    blocks = block_seeds(5, 2 * BLOCK + 7)
    assert [size for size, _ in blocks] == [BLOCK, BLOCK, 7]
    again = block_seeds(5, 2 * BLOCK + 7)
    assert all(a.entropy == b.entropy and a.spawn_key == b.spawn_key for (_, a), (_, b) in zip(blocks, again))


def _spec(**kw):
    base = dict(
        generator=discretize(BvnSpec.uniform(0.4, 4)),
        n=2000,
        iterations=3000,
        divergence=make_theta(0.5),
        variant="v1",
        seed=11,
    )
    base.update(kw)
    return ExperimentSpec(**base)


def test_deterministic_for_any_worker_count():
    spec = _spec(iterations=2 * BLOCK + 100)
    a = coverage_experiment(spec)
    b = coverage_experiment(spec)
    c = coverage_experiment(spec, workers=3)
    assert a == b == c
    assert coverage_experiment(_spec(seed=12)) != a


def test_coverage_near_nominal():
    r = coverage_experiment(_spec(iterations=5000))
    assert abs(r.coverage - 0.95) < 0.02
    assert r.replicates_failed == 0


def test_complete_association_always_covered():
    for rho, variant in ((1.0, "v1"), (-1.0, "v3")):
        r = coverage_experiment(_spec(generator=discretize(BvnSpec.uniform(rho, 4)), variant=variant))
        assert r.coverage == 1.0 and r.true_value == 1.0 and r.replicates_failed == 0


def test_failed_replicates_are_counted():
    r = coverage_experiment(_spec(generator=discretize(BvnSpec.uniform(0.8, 4)), n=200, divergence=make_power(0)))
    assert 0 < r.replicates_failed < r.iterations
    assert r.covered <= r.iterations - r.replicates_failed


def test_undefined_generator():
    p = ProbabilityTable(np.array([[0.5, 0.0], [0.5, 0.0]]))
    with pytest.raises(GeneratorDegenerateError):
        coverage_experiment(_spec(generator=p, variant="v2"))


def test_spec_validation():
    with pytest.raises(ValidationError):
        _spec(n=0)
    with pytest.raises(ValidationError):
        _spec(iterations=0)
    with pytest.raises(ValidationError):
        _spec(level=1.5)


def test_bias_shrinks_with_n():
    biases = []
    for n in (500, 5000, 50000):
        r = coverage_experiment(_spec(n=n, iterations=10000, divergence=make_power(0.5), seed=7))
        biases.append(abs(r.mean_estimate - r.true_value))
    assert biases[0] > biases[1] > biases[2]
