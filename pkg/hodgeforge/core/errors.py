"""Exception hierarchy.

Every error carries an optional ``location`` dict so CLI reports and
certificates can point at the offending cell, index or facet.
"""
from typing import Any, Dict, Optional


class HodgeforgeError(Exception):
    def __init__(self, message: str, location: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.location = dict(location or {})

    def __str__(self):
        base = super().__str__()
        if not self.location:
            return base
        where = ", ".join(f"{k}={v}" for k, v in self.location.items())
        return f"{base} ({where})"


# linear algebra / filtrations
class AmbientMismatch(HodgeforgeError):
    pass


class NotNested(HodgeforgeError):
    pass


class NotExhaustive(HodgeforgeError):
    pass


class NotNilpotent(HodgeforgeError):
    pass


# mixed Hodge / rescaling
class NotExact(HodgeforgeError):
    pass


class NotStrict(HodgeforgeError):
    pass


# double complex
class NotAComplex(HodgeforgeError):
    pass


class InjectivityFails(HodgeforgeError):
    pass


# weight spectral sequence
class D1SquareNonzero(HodgeforgeError):
    pass


class DegenerationFails(HodgeforgeError):
    pass


class ExactnessFail(HodgeforgeError):
    pass


class NonHTStrata(HodgeforgeError):
    pass


# geometry
class InvalidIntersectionData(HodgeforgeError):
    pass


class OutOfRange(HodgeforgeError):
    pass


# toric
class NotReflexive(HodgeforgeError):
    pass


class FacetNotUnimodular(HodgeforgeError):
    pass


class RefinementFailed(HodgeforgeError):
    pass


class SupportViolation(HodgeforgeError):
    pass


class NotComplete(HodgeforgeError):
    pass


class NotSmooth(HodgeforgeError):
    pass


# input files
class SchemaError(HodgeforgeError):
    pass
