"""Exact homomorphism densities of small patterns in host graphs and kernels."""

__version__ = "0.1.0"

from .graph import Graph, GraphError, PatternGraph, build_graph  # noqa: E402
from .homcount import Kernel, density, hom_count, injective_density, kernel_density  # noqa: E402
from .generators import GenSpec, generate, parse_pattern  # noqa: E402

__all__ = ["Graph", "GraphError", "PatternGraph", "build_graph", "Kernel", "density",
           "hom_count", "injective_density", "kernel_density", "GenSpec", "generate",
           "parse_pattern", "__version__"]
