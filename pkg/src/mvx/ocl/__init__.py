"""The OCL surface language: parsing and pretty-printing."""

from .ast import ClassContext, DeriveContext, OperationContext
from .parser import parse_constraints, parse_expression
from .printer import decl_to_source, to_source

__all__ = [
    "ClassContext",
    "DeriveContext",
    "OperationContext",
    "decl_to_source",
    "parse_constraints",
    "parse_expression",
    "to_source",
]
