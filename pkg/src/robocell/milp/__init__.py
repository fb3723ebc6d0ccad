"""MILP formulations of the cyclic scheduling problem."""

from .decode import DecodeError, decode_order, decode_solution
from .formulations import build_flow, build_model, build_mtz, build_vajda
from .model import (
    BINARY,
    CONTINUOUS,
    Constraint,
    MilpModel,
    ModelError,
    Variable,
    read_lp,
    write_lp,
)

__all__ = [
    "BINARY",
    "CONTINUOUS",
    "Constraint",
    "DecodeError",
    "MilpModel",
    "ModelError",
    "Variable",
    "build_flow",
    "build_model",
    "build_mtz",
    "build_vajda",
    "decode_order",
    "decode_solution",
    "read_lp",
    "write_lp",
]
