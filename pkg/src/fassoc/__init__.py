"""f-divergence generalisations of Cramer's coefficient for two-way tables."""

from fassoc.bvn import BvnSpec, bvn_cdf, discretize, kl_closed_form, latent_divergence, power_closed_form
from fassoc.divergence import (
    DivergenceSpec,
    f_divergence,
    independence_divergence,
    make_custom,
    make_kl,
    make_pearson,
    make_power,
    make_theta,
    parse_divergence,
)
from fassoc.errors import AssociationError, NumericalError, ValidationError
from fassoc.inference import MeasureEstimate, asy_variance, asy_variance_v3, confidence_interval, estimate, gradient
from fassoc.measures import GEOMETRIC, HARMONIC, AggregatorSpec, k1, k2, measure, v1, v2, v3
from fassoc.simulation import CoverageResult, ExperimentSpec, coverage_experiment, sample_table
from fassoc.table import ContingencyTable, ProbabilityTable, probability_from_grid, read_table, table_from_counts, to_probability

__all__ = [
    "AggregatorSpec",
    "AssociationError",
    "BvnSpec",
    "ContingencyTable",
    "CoverageResult",
    "DivergenceSpec",
    "ExperimentSpec",
    "GEOMETRIC",
    "HARMONIC",
    "MeasureEstimate",
    "NumericalError",
    "ProbabilityTable",
    "ValidationError",
    "asy_variance",
    "asy_variance_v3",
    "bvn_cdf",
    "confidence_interval",
    "coverage_experiment",
    "discretize",
    "estimate",
    "f_divergence",
    "gradient",
    "independence_divergence",
    "k1",
    "k2",
    "kl_closed_form",
    "latent_divergence",
    "make_custom",
    "make_kl",
    "make_pearson",
    "make_power",
    "make_theta",
    "measure",
    "parse_divergence",
    "power_closed_form",
    "probability_from_grid",
    "read_table",
    "sample_table",
    "table_from_counts",
    "to_probability",
    "v1",
    "v2",
    "v3",
]
