"""Incremental and offline approximate shortest paths."""
from .apsp import IncAPSP
from .dense import DenseAPSP
from .graph import Digraph, DynGraph, Update, UpdateError, UpdateKind, filter_decreases, generate_random_sequence
from .instance import Instance, InstanceFormatError, format_instance, parse_instance
from .offline import EstimateCollection, OfflineSSSP
from .propagate import EstimateVector, propagate_dijkstra
from .sssp import SourceSSSP

__all__ = [
    "DenseAPSP",
    "Digraph",
    "DynGraph",
    "EstimateCollection",
    "EstimateVector",
    "IncAPSP",
    "Instance",
    "InstanceFormatError",
    "OfflineSSSP",
    "SourceSSSP",
    "Update",
    "UpdateError",
    "UpdateKind",
    "filter_decreases",
    "format_instance",
    "generate_random_sequence",
    "parse_instance",
    "propagate_dijkstra",
]
