"""Exception types shared across the workbench."""


class SchemaMatchError(Exception):
    """Base class for all workbench errors."""


class ParseError(SchemaMatchError):
    """Malformed source text; carries a 1-based line/column position."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {message}" if line else message)
        self.line = line
        self.col = col


class ValidationError(SchemaMatchError):
    """A structural invariant is violated (duplicate ids, dangling parent, ...)."""


class VersionError(SchemaMatchError):
    """A persisted document declares an unsupported format version."""


class UnknownIdError(SchemaMatchError, KeyError):
    """An element, schema, concept, or voter id does not resolve."""

    def __str__(self) -> str:  # KeyError quotes its arg; keep the plain message
        return SchemaMatchError.__str__(self)


class RangeBoundsError(SchemaMatchError, ValueError):
    """A range filter was given lo > hi."""


class PairBudgetError(SchemaMatchError):
    """A match would score more pairs than the configured budget allows."""


class ConflictError(SchemaMatchError):
    """A concept assignment would claim an element already owned elsewhere."""


class UnknownPairError(SchemaMatchError):
    """A decision references a pair absent from every match matrix."""


class IllegalTransitionError(SchemaMatchError):
    """A decision status change is not a legal transition."""


class MissingPairError(SchemaMatchError):
    """An N-way analysis is missing one or more pairwise matrices."""

    def __init__(self, missing):
        self.missing = sorted(missing)
        pairs = ", ".join(f"{a}~{b}" for a, b in self.missing)
        super().__init__(f"missing pairwise matrices: {pairs}")


class IntegrityError(SchemaMatchError):
    """A persisted session fails referential or content-hash checks."""
