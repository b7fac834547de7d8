"""mvx: metamodels, models, and two constraint/query languages over them."""

__version__ = "0.1.0"
