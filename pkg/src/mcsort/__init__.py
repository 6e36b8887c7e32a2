"""Metastability-containing Gray code comparators and sorting networks."""

from .gray import ValidGrayWord, decode, encode, enumerate_valid, max_min_oracle, rank_of
from .netlist import Netlist, from_json, metrics, simulate, to_json
from .networks import ComparatorSchedule, Variant, build_n_sort, builtin_schedule
from .synth import build_two_sort
from .ternary import META, ONE, ZERO, Trit, Word, closure_eval

__version__ = "0.1.0"

__all__ = [
    "META",
    "ONE",
    "ZERO",
    "ComparatorSchedule",
    "Netlist",
    "Trit",
    "ValidGrayWord",
    "Variant",
    "Word",
    "build_n_sort",
    "build_two_sort",
    "builtin_schedule",
    "closure_eval",
    "decode",
    "encode",
    "enumerate_valid",
    "from_json",
    "max_min_oracle",
    "metrics",
    "rank_of",
    "simulate",
    "to_json",
]
