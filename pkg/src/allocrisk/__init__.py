"""Minimax linear risk and measurement-budget allocation for Gaussian sequence models."""

from . import asymptotics, ellipsoid, hyperrect, montecarlo, numerics, verify
from .model import (
    Allocation,
    ExpSeq,
    ExplicitSeq,
    Pattern,
    PowerSeq,
    SequenceSpec,
    UniformAllocation,
    apply_pattern,
    budget,
    normalize_spec,
    spec_from_json,
    spec_to_json,
)

__all__ = [
    "Allocation",
    "ExpSeq",
    "ExplicitSeq",
    "Pattern",
    "PowerSeq",
    "SequenceSpec",
    "UniformAllocation",
    "apply_pattern",
    "asymptotics",
    "budget",
    "ellipsoid",
    "hyperrect",
    "montecarlo",
    "normalize_spec",
    "numerics",
    "spec_from_json",
    "spec_to_json",
    "verify",
]

__version__ = "0.1.0"
