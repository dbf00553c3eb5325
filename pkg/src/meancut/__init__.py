"""MeanCut graph clustering with maximin path similarity, FastMST and DGF junction handling."""

from .dataset import Dataset, DatasetError, dedup, gen_synthetic, load_csv, mbr_diagonal, minmax_normalize
from .dgf import improved_meancut, knn, dgf_scores
from .graphkernel import Kernel, SimilarityMatrix, degrees, similarity_matrix
from .metrics import acc, ari, evaluate, hungarian, nmi
from .mst import SpanningTree, eps_components, fast_mst, kruskal_full
from .objective import Labeling, greedy_cluster, meancut_cluster
from .pathsim import floyd_warshall_maximin, tree_pathsim

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "DatasetError",
    "load_csv",
    "minmax_normalize",
    "dedup",
    "mbr_diagonal",
    "gen_synthetic",
    "Kernel",
    "SimilarityMatrix",
    "similarity_matrix",
    "degrees",
    "SpanningTree",
    "kruskal_full",
    "fast_mst",
    "eps_components",
    "floyd_warshall_maximin",
    "tree_pathsim",
    "Labeling",
    "greedy_cluster",
    "meancut_cluster",
    "knn",
    "dgf_scores",
    "improved_meancut",
    "acc",
    "nmi",
    "ari",
    "hungarian",
    "evaluate",
]
