"""Active linear regression with leverage-score pivotal sampling.

Typical pipeline::

    lev = leverage_scores(A)
    probs = inclusion_probabilities(lev, k)
    tree = build_tree(X, probs, "pca")
    s = pivotal_sample(tree, probs, RngState(seed))
    fit = weighted_least_squares(*subsample_system(A, b_observed, s))
"""
from .continuum import (IntervalPartition, LeverageDensity, build_partition, embedding_error,
                        fit_polynomial, sample_continuum, tau)
from .errors import *  # noqa: F401,F403
from .features import PolynomialBasisSpec, chebyshev_grid, expand, legendre_normalized
from .harness import ExperimentConfig, ExperimentResult, run_experiment, samples_to_target
from .leverage import (InclusionProbabilities, LeverageScores, inclusion_probabilities, leverage_scores,
                       probability_ceiling)
from .matrix import RegressionSolution, orthonormal_basis, spectral_deviation_from_identity, weighted_least_squares
from .problems import TargetProblem, evaluate_target, make_problem, sample_domain
from .rng import RngState
from .sampler import SampleSet, bernoulli_sample, pivotal_sample, subsample_system, uniform_sample
from .tree import CompetitionTree, SplitMethod, build_tree
from .verify import (InfluenceReport, SampleDistribution, d_inf, embedding_deviation, enumerate_pivotal,
                     influence_report, matvec_error)

__version__ = "0.1.0"
