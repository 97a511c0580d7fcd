"""Problem classes: instances, DP models and generators."""

from .generate import SplitMix64, generate
from .instance import (
    CLASSES,
    SENSE,
    CoverPackData,
    Instance,
    KnapsackData,
    MccavpData,
    TspData,
    cover_pack,
    evaluate,
    evaluate_many,
    format_instance,
    knapsack,
    mccavp,
    parse_instance,
    read_instance,
    tsp,
    write_instance,
)
from .models import build_model


def packing_example() -> Instance:
    """Three-objective set-packing instance with seven items.

    Pairwise conflicts (x4,x5), (x4,x6), (x5,x7), (x6,x7) plus the triples
    (x1,x2,x3) and (x2,x3,x4).
    """
    rows = [(0, 1, 2), (1, 2, 3), (3, 4), (3, 5), (4, 6), (5, 6)]
    costs = [(4, 5, 3, 4, 2, 1, 2), (8, 7, 1, 5, 3, 3, 8), (2, 6, 8, 4, 6, 5, 2)]
    return cover_pack("setpack", 7, rows, costs)


__all__ = [
    "CLASSES",
    "SENSE",
    "CoverPackData",
    "Instance",
    "KnapsackData",
    "MccavpData",
    "SplitMix64",
    "TspData",
    "build_model",
    "cover_pack",
    "evaluate",
    "evaluate_many",
    "format_instance",
    "generate",
    "knapsack",
    "mccavp",
    "packing_example",
    "parse_instance",
    "read_instance",
    "tsp",
    "write_instance",
]
