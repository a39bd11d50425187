"""Spanning trees and spanning forests of trees times a weighted fiber."""

from .closed_form import distance_distribution, edge_probability_c, fsf_constants
from .exact import CountTable, count_ball, count_by_bags, recursion_a
from .graphs import K2, ProductGraph, TreeGraph, WeightedGraph, build_ball, build_perfect_tree, product
from .kirchhoff import classify_spanning_trees, enumerate_spanning_trees, matrix_tree_count
from .rng import EstimatorReport, RngStream
from .walks import decompose_trips, lerw, loop_erase, memorable_bags, random_walk, wilson_ust

__all__ = [
    "CountTable", "EstimatorReport", "K2", "ProductGraph", "RngStream", "TreeGraph", "WeightedGraph",
    "build_ball", "build_perfect_tree", "classify_spanning_trees", "count_ball", "count_by_bags",
    "decompose_trips", "distance_distribution", "edge_probability_c", "enumerate_spanning_trees",
    "fsf_constants", "lerw", "loop_erase", "matrix_tree_count", "memorable_bags", "product",
    "random_walk", "recursion_a", "wilson_ust",
]
