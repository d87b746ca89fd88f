"""
wave-cluster: Graph clustering with the discretized wave equation

A Python package that runs the graph wave equation on every node,
reads Laplacian eigenvalues off the oscillation frequencies, and
clusters nodes by the signs of the matching eigenvector components.
"""

__version__ = "0.1.0"
__author__ = "Logan Renz"

from .config import Config
from .graph import Graph, LaplacianRow, Partition, build_graph
from .edge_list import load_edge_list, read_edge_list, write_edge_list
from .wave import WaveConfig, WaveRun, init_run, run_to, step, suggest_t_max
from .spectral import EigenEstimate, Spectrum, estimate_eigenpairs, local_spectrum
from .oracle import DenseSpectral, companion_eigencheck, dense_spectral, oracle_partition
from .clustering import ClusterResult, WaveClusterer
from .comparison import compare_partitions
from .convergence import ConvergencePredictor, measure_convergence, predict_times
from .gossip import orthogonal_iteration_distributed

__all__ = [
    "Config",
    "Graph",
    "LaplacianRow",
    "Partition",
    "build_graph",
    "load_edge_list",
    "read_edge_list",
    "write_edge_list",
    "WaveConfig",
    "WaveRun",
    "init_run",
    "run_to",
    "step",
    "suggest_t_max",
    "EigenEstimate",
    "Spectrum",
    "estimate_eigenpairs",
    "local_spectrum",
    "DenseSpectral",
    "companion_eigencheck",
    "dense_spectral",
    "oracle_partition",
    "ClusterResult",
    "WaveClusterer",
    "compare_partitions",
    "ConvergencePredictor",
    "measure_convergence",
    "predict_times",
    "orthogonal_iteration_distributed",
    "__version__",
]
