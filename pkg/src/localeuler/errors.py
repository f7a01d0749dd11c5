"""Exception hierarchy.

Every error carries a short class name that the CLI prints verbatim, so the
names double as stable diagnostic identifiers.
"""


class LocalEulerError(Exception):
    """Base class for all library errors."""


# chain-core
class ComplexError(LocalEulerError):
    pass


class DiamondViolation(ComplexError):
    pass


class SignInconsistency(ComplexError):
    pass


class DimensionZero(ComplexError):
    pass


class DimensionTop(ComplexError):
    pass


class NotPseudomanifold(ComplexError):
    pass


class NotOrientable(ComplexError):
    pass


# exact-linalg
class LinalgError(LocalEulerError):
    pass


class BadDimension(LinalgError):
    pass


class NotClosed(LinalgError):
    pass


class NotExact(LinalgError):
    pass


# bundle-model
class BundleError(LocalEulerError):
    pass


class EmptyTiling(BundleError):
    pass


class LemmaViolation(BundleError):
    pass


class InclusionAmbiguous(BundleError):
    pass


class InclusionMissing(BundleError):
    pass


class ChainMapViolation(BundleError):
    pass


class NonOrientableTransport(BundleError):
    pass


# euler-engine
class EngineError(LocalEulerError):
    pass


class Inconsistent(EngineError):
    pass


class NotClosedFinal(EngineError):
    pass


class CancellationViolation(EngineError):
    pass


class FormulaUnsupported(EngineError):
    pass


class NotCycle(EngineError):
    pass


# oracle-fixtures
class InvalidFiber(LocalEulerError):
    pass


class NotFiberEdge(LocalEulerError):
    pass


# documents
class DocumentError(LocalEulerError):
    """Malformed JSON document (the CLI maps this to exit code 2)."""


class DigestMismatch(LocalEulerError):
    pass
