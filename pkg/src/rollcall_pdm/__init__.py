"""Partition decoupling of roll call votes.

A vote matrix is split into layers of cluster "motivations": spectral
clustering of legislators, projection onto normalized cluster means, and
repetition on the residual until it looks like shuffled noise.
"""

__version__ = "0.1.0"

from .data import Legislator, VoteDataError, VoteMatrix, filter_minority, from_array, load_voteview, load_wide_csv, write_wide_csv
from .spectral import SpectralGraph, build_graph, correlation, eigendecompose, laplacian, spherical_affinity
from .selection import ClusterParams, Clustering, cluster, select_k0, select_l
from .engine import Decomposition, LayerModel, Motivation, PDMConfig, decompose, motivations_from_clusters, project, residual_is_random
from .mds import DimensionEstimate, estimate_dimension, mds_stress, pairwise_distances
from .boost import SeparatingVotes, adaboost_pair, explain_clusters
from .evaluate import EvalReport, evaluate_decomposition, minority_model, predict_signs, random_model, score
from .simulate import SimConfig, SimResult, alpha_grid, run_experiment, simulate
