"""Exact adelic blocks, idele classes and their K-theory over Q and quadratic fields."""

from .errors import AdelicError
from .localfield import LocalElement, PlaceRef
from .numberfield import FieldDesc, FieldElement

__all__ = ["AdelicError", "FieldDesc", "FieldElement", "LocalElement", "PlaceRef"]
