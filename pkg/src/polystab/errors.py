"""Exception types shared across the package."""

from __future__ import annotations


class PolystabError(Exception):
    """Base class for all package-specific errors."""


class DimensionMismatch(PolystabError):
    """Operands have incompatible shapes."""


class NonSquare(DimensionMismatch):
    """A square matrix was required."""


class SingularShift(PolystabError):
    """The shift z lies in the numerical spectrum of A (z*I - A is singular
    at working precision), so the resolvent is not defined there."""

    def __init__(self, z: complex, cond: float | None = None):
        self.z = z
        self.cond = cond
        msg = f"shift z={z} is in the numerical spectrum"
        if cond is not None:
            msg += f" (condition estimate {cond:.3e})"
        super().__init__(msg)


class ConvergenceFailure(PolystabError):
    """An iterative kernel hit its iteration cap; usually signals
    conditioning beyond ~1e15."""


class Overflow(PolystabError):
    """A computed quantity left the representable floating-point range."""


class SpectrumOnCut(PolystabError):
    """An eigenvalue with nonpositive real part was found; the principal
    branch of the fractional power is undefined."""


class UnstableEigenvalue(PolystabError):
    """A generator eigenvalue has nonnegative real part."""

    def __init__(self, eigenvalue: complex, msg: str | None = None):
        self.eigenvalue = eigenvalue
        super().__init__(msg or f"eigenvalue {eigenvalue} has Re >= 0")


class UnstableDamping(UnstableEigenvalue):
    """The damped-wave generator is not stable for the given damping."""


class InsufficientData(PolystabError):
    """Not enough samples to perform a fit."""


class UnsupportedSpace(PolystabError):
    """The requested computation is not available for this ambient norm."""


class DomainError(PolystabError):
    """A parameter lies outside the admissible range."""


class NyquistOverflow(PolystabError):
    """The sampled signal is not resolved on the grid (too much spectral
    mass near or beyond the Nyquist frequency)."""


class NonIntegrableWeight(PolystabError):
    """The power weight is not integrable against the given function."""


class SymbolOverflow(PolystabError):
    """A multiplier symbol violates its declared growth bound on the grid."""


class ConfigError(PolystabError):
    """An experiment configuration failed validation.

    ``pointer`` is a JSON pointer to the offending field.
    """

    def __init__(self, message: str, pointer: str = ""):
        self.pointer = pointer
        super().__init__(f"{message} (at {pointer or '/'})")
