"""Exact arithmetic for circle rotations and 3-interval exchange maps."""

from .field import FieldElement, FieldMismatchError, floor_sum, parse_exact
from .cf import (
    ContinuedFraction,
    OstrowskiCode,
    RationalAlphaError,
    cf_expand,
    cf_from_periodic,
    convergents,
    ostrowski_decode,
    ostrowski_encode,
)

__all__ = [
    "FieldElement",
    "FieldMismatchError",
    "floor_sum",
    "parse_exact",
    "ContinuedFraction",
    "OstrowskiCode",
    "RationalAlphaError",
    "cf_expand",
    "cf_from_periodic",
    "convergents",
    "ostrowski_decode",
    "ostrowski_encode",
]

__version__ = "0.1.0"
