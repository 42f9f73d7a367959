"""Leaf-data forests, two-variable logic, and the encoding of SVAS runs."""

from .encoding import (
    DecodeError,
    NotAccepted,
    alphabet,
    data_matching_valid,
    decode_forest,
    emit_formula,
    encode_trace,
    events,
)
from .forest import ForestError, LeafDataForest, Node, Structure
from .formula import (
    FreeVariable,
    evaluate,
    evaluate_naive,
    parse_sexpr,
    to_sexpr,
)
from .mutate import mutate_forest, mutate_forest_described, random_forest, random_sentence
