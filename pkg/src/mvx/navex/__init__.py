"""NavEx: a navigation expression language with reflective `$` feature access."""

from .parser import parse_navex
from .printer import to_source

__all__ = ["parse_navex", "to_source"]
