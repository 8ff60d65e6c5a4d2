"""Exception types shared across the engine."""


class MlncountError(Exception):
    """Base class for all engine errors."""


class FormulaSyntaxError(MlncountError):
    """Raised on malformed formula or model-file text.

    ``line`` and ``column`` are 1-based; ``line`` is 0 for single-formula
    parses where no file context exists.
    """

    def __init__(self, message, line=0, column=0):
        self.line = line
        self.column = column
        if line:
            message = f"line {line}, column {column}: {message}"
        elif column:
            message = f"column {column}: {message}"
        super().__init__(message)


class VocabularyError(MlncountError):
    """Undeclared predicate, arity mismatch, or duplicate declaration."""


class TooManyVariablesError(MlncountError):
    """A formula uses more distinct variables than the engine fragment allows."""


class BruteForceCapError(MlncountError):
    """The ground-atom count exceeds the exhaustive-enumeration cap."""

    def __init__(self, atom_count, cap):
        self.atom_count = atom_count
        self.cap = cap
        super().__init__(
            f"refusing exhaustive enumeration over {atom_count} ground atoms "
            f"(cap {cap})"
        )


class UnsupportedSentenceError(MlncountError):
    """The polynomial-time engine was given input outside its fragment
    (constants, equality atoms, or >2 variables)."""


class NumericOverflowError(MlncountError):
    """An intermediate magnitude left the representable floating range."""


class NumericResidueError(MlncountError):
    """An imaginary or negative residue exceeded its tolerance, indicating an
    upstream numeric fault."""


class InfeasibleConstraintError(MlncountError):
    """All worlds are excluded: the partition mass under the constraints is zero."""
