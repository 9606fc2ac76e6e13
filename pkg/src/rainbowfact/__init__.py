"""Rainbow Hamilton paths in 1-factorizations of complete graphs."""
from .graph import (ColouredGraph, ColourPartition, GraphError, NonEdgeError, load_graph, save_graph,
                    verify_rainbow_cycle, verify_rainbow_cycle_all_colours, verify_rainbow_hamilton_path,
                    verify_rainbow_path)
from .factorgen import (canonical_odd_colouring, canonical_one_factorization, count_one_factorizations,
                        enumerate_one_factorizations, odd_to_even, even_to_odd, xor_factorization)
from .absorber import AbsorberConfig, HAbsorber, absorb, absorbing_path, build_absorber
from .search import exact_andersen_path, exact_rainbow_hamilton_path, long_rainbow_path
from .pipeline import RunReport, full_pipeline
from .latin import LatinSquare, colouring_from_square, square_from_colouring

__version__ = "0.1.0"

__all__ = [
    "ColouredGraph", "ColourPartition", "GraphError", "NonEdgeError", "load_graph", "save_graph",
    "verify_rainbow_cycle", "verify_rainbow_cycle_all_colours", "verify_rainbow_hamilton_path",
    "verify_rainbow_path", "canonical_odd_colouring", "canonical_one_factorization",
    "count_one_factorizations", "enumerate_one_factorizations", "odd_to_even", "even_to_odd",
    "xor_factorization", "AbsorberConfig", "HAbsorber", "absorb", "absorbing_path", "build_absorber",
    "exact_andersen_path", "exact_rainbow_hamilton_path", "long_rainbow_path", "RunReport",
    "full_pipeline", "LatinSquare", "colouring_from_square", "square_from_colouring",
]
