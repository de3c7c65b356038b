"""Pragma-driven source-to-source optimizer for C/C++ signal-processing code."""

from .emitter import RewritePlan, emit
from .parser import AnnotatedSource, parse
from .registry import Candidate, invoke, load_registry
from .selector import ArchProfile, OpCounts, estimate_cost, load_profile, select

__version__ = "0.1.0"

__all__ = [
    "AnnotatedSource",
    "ArchProfile",
    "Candidate",
    "OpCounts",
    "RewritePlan",
    "emit",
    "estimate_cost",
    "invoke",
    "load_profile",
    "load_registry",
    "parse",
    "select",
]
