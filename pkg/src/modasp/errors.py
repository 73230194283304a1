"""Exception hierarchy shared by all modasp components."""


class ModaspError(Exception):
    """Base class for every error raised by this package."""


class ParseError(ModaspError):
    """Syntax or validation error in a program or control file."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)


class DeclarationConflictError(ParseError):
    """The same subprogram name was declared with different parameter lists."""


class UnknownSubprogramError(ModaspError):
    """A control file referenced a subprogram that was never declared."""


class ArityMismatchError(ModaspError):
    """A subprogram was used with the wrong number of values."""


class UnboundConstantError(ModaspError):
    """A control expression referenced an undeclared constant."""


class RangeError(ModaspError):
    """An empty or reversed integer range without `allow empty`."""


class SortError(ModaspError):
    """A term violates the sort discipline (e.g. a function term under arithmetic)."""


class NotGroundError(ModaspError):
    """An operation that requires a ground term received a variable."""


class NotPrecomputedError(ModaspError):
    """An operation that requires precomputed terms received an arithmetic term."""


class SafetyError(ModaspError):
    """A rule variable is neither domain-bounded nor bound by a positive body atom."""


class DomainError(ModaspError):
    """An interpretation mentions atoms outside the declared finite domain."""


class PatternError(ModaspError):
    """An intensionality pattern violates its well-formedness conditions."""


class UnboundPlaceholderError(ModaspError):
    """A valuation is missing a placeholder that occurs in the instantiated object."""


class RequirementError(ModaspError):
    """Module patterns escape the global intensionality statement.

    Carries the first offending (predicate, module index, pattern) triple.
    """

    def __init__(self, message, predicate=None, module_index=None, pattern=None):
        self.predicate = predicate
        self.module_index = module_index
        self.pattern = pattern
        super().__init__(message)


class CapacityError(ModaspError):
    """The relevant atom base exceeds the enumeration cap."""


class EngineError(ModaspError):
    """The selected engine is not applicable to the given input."""


class NotIntensionalError(ModaspError):
    """Support checking was asked about an atom outside the intensional region."""
