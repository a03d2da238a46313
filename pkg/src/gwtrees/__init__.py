"""Conditioned Galton-Watson trees: samplers, distance statistics, exact
generating-function means and an enumeration oracle."""

__version__ = "0.1.0"

from .labels import DisplacementDist, VerticalProfile, make_eta, psi_estimate, psi_exact, vertical_profile
from .offspring import OffspringDist, make_offspring
from .oracle import enumerate_trees, exact_conditioned_expectation, weighted_trees
from .series import (
    TruncatedSeries,
    dwass_check,
    exact_mean_P,
    exact_mean_Q,
    exact_mean_Y,
    exact_mean_Z,
    series_A,
    series_F,
    tail_ratio,
)
from .stats import PairProfile, RootPairCounts, level_profile, monte_carlo_mean, pair_profile, root_pair_counts
from .trees import Tree, from_lukasiewicz, fringe_subtree, sample_conditioned, sample_unconditioned

__all__ = [
    "DisplacementDist",
    "OffspringDist",
    "PairProfile",
    "RootPairCounts",
    "Tree",
    "TruncatedSeries",
    "VerticalProfile",
    "dwass_check",
    "enumerate_trees",
    "exact_conditioned_expectation",
    "exact_mean_P",
    "exact_mean_Q",
    "exact_mean_Y",
    "exact_mean_Z",
    "fringe_subtree",
    "from_lukasiewicz",
    "level_profile",
    "make_eta",
    "make_offspring",
    "monte_carlo_mean",
    "pair_profile",
    "psi_estimate",
    "psi_exact",
    "root_pair_counts",
    "sample_conditioned",
    "sample_unconditioned",
    "series_A",
    "series_F",
    "tail_ratio",
    "vertical_profile",
    "weighted_trees",
]
