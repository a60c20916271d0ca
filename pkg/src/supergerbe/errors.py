"""Exception types shared across the package.

Every failure mode carries enough context (tuple names, witnesses) to be
reported verbatim by the CLI.
"""

from __future__ import annotations


class SupergerbeError(Exception):
    """Base class for all library errors."""


# ---------------------------------------------------------------- scalar ring

class UnknownGenerator(SupergerbeError):
    pass


class NonTerminatingReduction(SupergerbeError):
    pass


class NotAUnit(SupergerbeError):
    pass


# -------------------------------------------------------------- superalgebra

class GeneratorMismatch(SupergerbeError):
    pass


class ParityMismatch(SupergerbeError):
    pass


class NonNilpotentArgument(SupergerbeError):
    pass


class NotPureSoul(SupergerbeError):
    pass


class RelationViolation(SupergerbeError):
    pass


# ------------------------------------------------------------- Cech machinery

class MissingComponent(SupergerbeError):
    pass


class NotACocycle(SupergerbeError):
    pass


class SubstitutionFailure(SupergerbeError):
    pass


class NotClosed(SupergerbeError):
    pass


class NonPolynomialBody(SupergerbeError):
    pass


# ------------------------------------------------------------------- gerbes

class CoverMismatch(SupergerbeError):
    pass


class OddParity(SupergerbeError):
    pass


class NotIntegral(SupergerbeError):
    """Raised with a rational witness when an integrality test fails."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NotDescended(SupergerbeError):
    pass


class ObstructionNonzero(SupergerbeError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class UnsupportedBodyData(SupergerbeError):
    pass


class SoulContamination(SupergerbeError):
    pass


# ------------------------------------------------------------------ manifest

class ManifestError(SupergerbeError):
    """Parse or load failure, located in the source text."""

    def __init__(self, message, line=None, col=None):
        loc = ""
        if line is not None:
            loc = f"line {line}" + (f", col {col}" if col is not None else "")
            message = f"{loc}: {message}"
        super().__init__(message)
        self.line = line
        self.col = col
