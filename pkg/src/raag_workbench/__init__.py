"""Computational toolkit for right-angled Artin groups and their subgroups."""
from .errors import InputError, PreconditionError, VerificationError, WorkbenchError
from .graph_core import SimplicialGraph, clique_number, link
from .trace_words import TraceWord, format_word, normalize, parse_word

__version__ = "0.1.0"

__all__ = [
    "InputError",
    "PreconditionError",
    "VerificationError",
    "WorkbenchError",
    "SimplicialGraph",
    "TraceWord",
    "clique_number",
    "format_word",
    "link",
    "normalize",
    "parse_word",
]
