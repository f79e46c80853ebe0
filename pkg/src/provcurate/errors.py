"""Exception hierarchy shared across the package."""

from __future__ import annotations


class CurationError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(CurationError):
    """Syntax error in Turtle, N-Quads, SPARQL, or delta text."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class UnsupportedDeltaError(CurationError):
    """Delta text uses features outside the restricted ground-data grammar."""


class ReplayIntegrityError(CurationError):
    """Strict delta application failed: the snapshot chain is inconsistent."""


class MissingShapeError(CurationError):
    """A shape referenced via sh:node does not exist in the catalog."""


class NoShapeError(CurationError):
    """No catalogued shape targets any of the entity's classes."""


class ConfigError(CurationError):
    """Invalid server or display-rules configuration."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        where = []
        if path:
            where.append(path)
        if line is not None:
            where.append(f"line {line}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class NoApplicableClauseError(CurationError):
    """No duplicate-rule clause can be instantiated from the given values."""


class CoercionError(CurationError):
    """A lexical form does not conform to the requested datatype."""


class ValidationError(CurationError):
    """A submission failed schema validation; carries the violation list."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__(f"{len(self.violations)} validation violation(s)")


class NoOpError(CurationError):
    """The requested change would not modify anything."""


class ChainError(CurationError):
    """Snapshot chain invariant breached (gaps, corrupt delta, bad ordering)."""


class MergeError(CurationError):
    """Merge precondition failed (self-merge, missing or deleted entity)."""


class NotFoundError(CurationError):
    """Entity, snapshot, or chain does not exist."""


class RestoreError(CurationError):
    """Restore recursion exceeded its depth cap."""


class MintError(CurationError):
    """IRI minting exhausted its collision-retry budget."""


class OrderError(CurationError):
    """Reorder input is not a permutation of the current proxy set."""


class StoreError(CurationError):
    """SPARQL endpoint failure after all configured retries."""


class LockHeldError(CurationError):
    """Entity is locked by another agent."""

    def __init__(self, entity, owner, expires_at):
        self.entity = entity
        self.owner = owner
        self.expires_at = expires_at
        super().__init__(f"{entity} is locked by {owner} until {expires_at}")


class LockTokenError(CurationError):
    """Presented lock token does not match the live lock."""


class LockRequiredError(CurationError):
    """Mutating request arrived without a live lock on the entity."""


class OrphanDecisionRequired(CurationError):
    """Orphan policy is `ask` and candidates need user decisions."""

    def __init__(self, candidates):
        self.candidates = list(candidates)
        super().__init__(f"{len(self.candidates)} orphan candidate(s) need a decision")
